#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cogfit/core/error.hpp"

namespace cogfit::evaluation {

struct HickPoint {
    double entropy = 0.0;
    double rt_ms = 0.0;
    std::string participant;
};

struct HickFit {
    double slope = 0.0;
    std::map<std::string, double> intercepts;
    double r_squared = 0.0;
};

/// RT = intercept[participant] + slope * H by ordinary least squares with one
/// intercept dummy per participant. R^2 is relative to the grand mean.
inline HickFit hicks_fit(std::span<const HickPoint> points) {
    std::set<double> levels;
    std::set<std::string> ids;
    for (const auto& p : points) {
        levels.insert(p.entropy);
        ids.insert(p.participant);
    }
    require(levels.size() >= 2, ErrorKind::precondition, "need at least 2 distinct entropy values");
    const std::vector<std::string> order(ids.begin(), ids.end());
    const auto n = static_cast<Eigen::Index>(points.size());
    const auto k = static_cast<Eigen::Index>(order.size() + 1);

    Eigen::MatrixXd X = Eigen::MatrixXd::Zero(n, k);
    Eigen::VectorXd y(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& p = points[static_cast<std::size_t>(r)];
        X(r, 0) = p.entropy;
        X(r, 1 + (std::lower_bound(order.begin(), order.end(), p.participant) - order.begin())) = 1.0;
        y(r) = p.rt_ms;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() < k)
        fail(ErrorKind::degenerate_design, "entropy is collinear with participant intercepts");
    const Eigen::VectorXd beta = qr.solve(y);

    HickFit out;
    out.slope = beta(0);
    for (std::size_t i = 0; i < order.size(); ++i) out.intercepts[order[i]] = beta(static_cast<Eigen::Index>(i + 1));
    const double ss_res = (y - X * beta).squaredNorm();
    const double ss_tot = (y.array() - y.mean()).matrix().squaredNorm();
    out.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return out;
}

}  // namespace cogfit::evaluation
