#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "cogfit/core/numeric.hpp"

namespace cogfit::models {

struct ChoiceDistribution {
    std::vector<std::string> options;
    std::vector<double> probs;

    double prob(const std::string& label) const {
        for (std::size_t i = 0; i < options.size(); ++i)
            if (options[i] == label) return probs[i];
        return 0.0;
    }

    bool valid(double tol = 1e-9) const {
        if (options.size() != probs.size() || probs.empty()) return false;
        double total = 0.0;
        for (double p : probs) {
            if (!(p >= 0.0) || !std::isfinite(p)) return false;
            total += p;
        }
        return std::abs(total - 1.0) <= tol;
    }
};

inline ChoiceDistribution from_logits(std::vector<std::string> options, std::span<const double> logits) {
    return {std::move(options), softmax(logits)};
}

}  // namespace cogfit::models
