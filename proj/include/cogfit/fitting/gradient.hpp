#pragma once

#include <cmath>
#include <concepts>
#include <span>
#include <string>
#include <vector>

#include "cogfit/core/error.hpp"

namespace cogfit::fitting {

/// Central differences: g_i = (f(x + eps e_i) - f(x - eps e_i)) / (2 eps).
template <class F>
    requires std::invocable<F&, std::span<const double>>
std::vector<double> central_difference(F&& f, std::span<const double> x, double eps) {
    require(eps > 0.0, ErrorKind::precondition, "finite-difference step must be positive");
    std::vector<double> probe(x.begin(), x.end());
    std::vector<double> grad(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        probe[i] = x[i] + eps;
        const double up = f(std::span<const double>(probe));
        probe[i] = x[i] - eps;
        const double down = f(std::span<const double>(probe));
        probe[i] = x[i];
        if (!std::isfinite(up) || !std::isfinite(down))
            fail(ErrorKind::numeric, "objective not finite around coordinate " + std::to_string(i));
        grad[i] = (up - down) / (2.0 * eps);
    }
    return grad;
}

/// Per-coordinate relative disagreement |a - b| / max(|a|, |b|, floor).
inline double max_relative_error(std::span<const double> a, std::span<const double> b, double floor = 1e-6) {
    require(a.size() == b.size(), ErrorKind::shape, "gradient lengths differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::abs(a[i]), std::abs(b[i]), floor});
        worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
    }
    return worst;
}

}  // namespace cogfit::fitting
