#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "cogfit/models/model.hpp"

namespace cogfit::models {

// Generalized context model. Each class scores the summed similarity
// exp(-||x_k - x_t||) of the probe to the stored exemplars of that class:
//   logit_i = beta * sum_{k<t} exp(-||x_k - x_t||_2) * [y_k = i]
// Trials carry the item under "features" and its true class under "label".
class GcmAgent final : public Agent {
public:
    explicit GcmAgent(const ParamVector& p) : beta_(p["beta"]) {}

    void logits(const Trial& trial, std::span<double> out) override {
        require_size(trial, out);
        const auto& probe = trial.vector("features");
        std::fill(out.begin(), out.end(), 0.0);
        for (const auto& [x, label] : exemplars_) {
            if (x.size() != probe.size())
                fail(ErrorKind::malformed_session,
                     "trial " + std::to_string(trial.index) + ": feature dimension changed");
            double sq = 0.0;
            for (std::size_t d = 0; d < x.size(); ++d) sq += (x[d] - probe[d]) * (x[d] - probe[d]);
            const double sim = std::exp(-std::sqrt(sq));
            for (std::size_t i = 0; i < out.size(); ++i)
                if (trial.choice_set[i] == label) out[i] += sim;
        }
        for (double& l : out) l *= beta_;
    }

    void observe(const Trial& trial) override {
        const std::string* label = trial.tag("label");
        if (!label)
            fail(ErrorKind::malformed_session,
                 "trial " + std::to_string(trial.index) + ": missing true class 'label'");
        exemplars_.emplace_back(trial.vector("features"), *label);
    }

private:
    double beta_;
    std::vector<std::pair<std::vector<double>, std::string>> exemplars_;
};

class Gcm final : public Model {
public:
    std::string_view tag() const override { return "gcm"; }
    std::vector<std::string> parameter_names(std::span<const Session>) const override { return {"beta"}; }
    std::unique_ptr<Agent> make_agent(const ParamVector& p) const override {
        return std::make_unique<GcmAgent>(p);
    }
};

inline ChoiceDistribution gcm_probs(const ParamVector& params, const Session& session, std::size_t t) {
    return distribution_at(Gcm{}, params, session, t);
}

}  // namespace cogfit::models
