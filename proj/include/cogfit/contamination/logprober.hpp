#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "cogfit/core/error.hpp"
#include "cogfit/core/numeric.hpp"

namespace cogfit::contamination {

/// Cumulative log-likelihood values at positions 1..n.
struct CumulativeCurve {
    std::vector<double> values;
};

struct LogProberFit {
    double A = 0.0;
    double B = 0.0;
    double residual = 0.0;
    bool flagged = false;

    double log_b() const { return std::log(B); }
};

inline constexpr double kMinB = 1e-3;
inline constexpr double kMaxB = 1e3;
inline constexpr int kGridSize = 200;

/// f(x) = -A (1 - exp(-B x)); f(0) = 0.
inline double logprober_curve(double A, double B, double x) { return -A * -std::expm1(-B * x); }

namespace detail {

// Least-squares A >= 0 for fixed B and the resulting residual sum of squares.
// With g(x) = 1 - exp(-Bx), y ~ -A g gives A = -sum(y g) / sum(g^2).
inline std::pair<double, double> solve_amplitude(std::span<const double> y, double B) {
    CompensatedSum gy, gg;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double g = -std::expm1(-B * static_cast<double>(i + 1));
        gy.add(g * y[i]);
        gg.add(g * g);
    }
    const double A = gg.value() > 0.0 ? std::max(0.0, -gy.value() / gg.value()) : 0.0;
    CompensatedSum rss;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double r = y[i] - logprober_curve(A, B, static_cast<double>(i + 1));
        rss.add(r * r);
    }
    return {A, rss.value()};
}

}  // namespace detail

/// Least-squares fit of f(x) = -A (1 - e^{-Bx}) over a 200-point log-spaced
/// grid of B in [1e-3, 1e3] with A in closed form, then golden-section
/// refinement of log B between the grid neighbours of the best point.
inline LogProberFit fit_exponential(const CumulativeCurve& curve, double threshold = 1.0) {
    const auto& y = curve.values;
    require(y.size() >= 3, ErrorKind::precondition, "need at least 3 curve points");
    for (std::size_t i = 0; i < y.size(); ++i) {
        require(std::isfinite(y[i]), ErrorKind::domain, "curve value " + std::to_string(i + 1) + " is not finite");
        if (i && y[i] > y[i - 1])
            fail(ErrorKind::invariant, "cumulative curve increases at position " + std::to_string(i + 1));
    }
    bool all_zero = true;
    for (double v : y) all_zero = all_zero && v == 0.0;
    if (all_zero) return {0.0, kMinB, 0.0, false};

    const double lo = std::log(kMinB), hi = std::log(kMaxB);
    const double step = (hi - lo) / (kGridSize - 1);
    auto rss_at = [&](double log_b) { return detail::solve_amplitude(y, std::exp(log_b)).second; };

    int best = 0;
    double best_rss = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kGridSize; ++k) {
        const double r = rss_at(lo + step * k);
        if (r < best_rss) {
            best_rss = r;
            best = k;
        }
    }

    double a = lo + step * std::max(0, best - 1);
    double b = lo + step * std::min(kGridSize - 1, best + 1);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = rss_at(c), fd = rss_at(d);
    for (int it = 0; it < 200 && b - a > 1e-10; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = rss_at(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = rss_at(d);
        }
    }
    double log_b = 0.5 * (a + b);
    if (best_rss < rss_at(log_b)) log_b = lo + step * best;

    const auto [A, rss] = detail::solve_amplitude(y, std::exp(log_b));
    return {A, std::exp(log_b), rss, log_b >= threshold};
}

/// Builds the cumulative curve from per-token log-likelihoods and fits it.
inline LogProberFit probe(std::span<const double> token_logliks, double threshold = 1.0) {
    require(!token_logliks.empty(), ErrorKind::empty_input, "no token log-likelihoods");
    CumulativeCurve curve;
    double total = 0.0;
    for (std::size_t i = 0; i < token_logliks.size(); ++i) {
        const double v = token_logliks[i];
        if (!(v <= 0.0)) fail(ErrorKind::domain, "token " + std::to_string(i + 1) + " has a positive log-likelihood");
        total += v;
        curve.values.push_back(total);
    }
    return fit_exponential(curve, threshold);
}

}  // namespace cogfit::contamination
