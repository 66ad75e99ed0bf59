#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ranges>
#include <span>
#include <vector>

namespace cogfit {

inline double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

// Neumaier-compensated accumulator. Summation order is the caller's order, so
// results are reproducible whenever the order is.
class CompensatedSum {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

template <std::ranges::input_range R>
double compensated_sum(const R& values) {
    CompensatedSum acc;
    for (double v : values) acc.add(v);
    return acc.value();
}

inline double log_sum_exp(std::span<const double> logits) {
    if (logits.empty()) return -std::numeric_limits<double>::infinity();
    const double hi = *std::max_element(logits.begin(), logits.end());
    if (!std::isfinite(hi)) return hi;
    double s = 0.0;
    for (double l : logits) s += std::exp(l - hi);
    return hi + std::log(s);
}

// Softmax with max-subtraction; writes into out (same length as logits).
inline void softmax(std::span<const double> logits, std::span<double> out) {
    const double lse = log_sum_exp(logits);
    for (std::size_t i = 0; i < logits.size(); ++i) out[i] = std::exp(logits[i] - lse);
    // renormalise to absorb the last ulp of rounding
    const double total = std::accumulate(out.begin(), out.end(), 0.0);
    for (double& p : out) p /= total;
}

inline std::vector<double> softmax(std::span<const double> logits) {
    std::vector<double> out(logits.size());
    softmax(logits, out);
    return out;
}

inline double log_softmax_at(std::span<const double> logits, std::size_t index) {
    return logits[index] - log_sum_exp(logits);
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace cogfit
