#pragma once

#include <charconv>
#include <memory>
#include <string>
#include <vector>

#include "cogfit/core/numeric.hpp"
#include "cogfit/models/model.hpp"

namespace cogfit::models {

enum class DeltaRuleVariant { judgment, accept };

// Linear-regression learner trained with the delta rule,
//   w <- w + alpha (r - w.x) x,   w starts at d,
// read out either as an ordinal judgment,
//   logit_i = beta (w.x - level_i)^2 + gamma,
// or as an accept/reject decision, logit(accept) = beta w.x, logit(reject) = 0.
//
// Trials carry "features" and, for learning, feedback r. Judgment levels come
// from "level:<label>" when present, otherwise from the numeric label itself.
// The accept option is named by the "accept" tag, defaulting to the first option.
class DeltaRuleAgent final : public Agent {
public:
    DeltaRuleAgent(const ParamVector& p, DeltaRuleVariant variant)
        : variant_(variant), alpha_(p["alpha"]), beta_(p["beta"]), gamma_(p["gamma"]) {
        for (std::size_t k = 0;; ++k) {
            const auto idx = p.find("d[" + std::to_string(k) + "]");
            if (!idx) break;
            weights_.push_back(p.values()[*idx]);
        }
    }

    void logits(const Trial& trial, std::span<double> out) override {
        require_size(trial, out);
        const double prediction = dot(weights_, features(trial));
        if (variant_ == DeltaRuleVariant::accept) {
            const std::string* accept = trial.tag("accept");
            const std::size_t accept_index = accept ? trial.option_index(*accept) : 0;
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = i == accept_index ? beta_ * prediction : 0.0;
            return;
        }
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double gap = prediction - level(trial, i);
            out[i] = beta_ * gap * gap + gamma_;
        }
    }

    void observe(const Trial& trial) override {
        const auto& x = features(trial);
        const double err = trial.reward() - dot(weights_, x);
        for (std::size_t k = 0; k < x.size(); ++k) weights_[k] += alpha_ * err * x[k];
    }

    const std::vector<double>& weights() const { return weights_; }

private:
    const std::vector<double>& features(const Trial& trial) const {
        const auto& x = trial.vector("features");
        if (x.size() != weights_.size())
            fail(ErrorKind::malformed_session, "trial " + std::to_string(trial.index) +
                                                   ": feature dimension " + std::to_string(x.size()) +
                                                   " differs from " + std::to_string(weights_.size()));
        return x;
    }

    static double level(const Trial& trial, std::size_t i) {
        const std::string& label = trial.choice_set[i];
        if (trial.has("level:" + label)) return trial.scalar("level:" + label);
        double v = 0.0;
        const auto res = std::from_chars(label.data(), label.data() + label.size(), v);
        if (res.ec != std::errc() || res.ptr != label.data() + label.size())
            fail(ErrorKind::malformed_session,
                 "trial " + std::to_string(trial.index) + ": option '" + label + "' has no ordinal level");
        return v;
    }

    DeltaRuleVariant variant_;
    double alpha_, beta_, gamma_;
    std::vector<double> weights_;
};

class DeltaRule final : public Model {
public:
    explicit DeltaRule(DeltaRuleVariant variant) : variant_(variant) {}

    std::string_view tag() const override {
        return variant_ == DeltaRuleVariant::judgment ? "delta_rule_judgment" : "delta_rule_accept";
    }

    std::vector<std::string> parameter_names(std::span<const Session> sessions) const override {
        std::size_t dim = 0;
        bool found = false;
        for (const auto& s : sessions) {
            for (const auto& t : s.trials) {
                if (!t.has("features")) continue;
                const std::size_t d = t.vector("features").size();
                if (found && d != dim)
                    fail(ErrorKind::malformed_session, "feature dimension differs across trials");
                dim = d;
                found = true;
            }
        }
        std::vector<std::string> names{"alpha", "beta", "gamma"};
        for (std::size_t k = 0; k < dim; ++k) names.push_back("d[" + std::to_string(k) + "]");
        return names;
    }

    std::unique_ptr<Agent> make_agent(const ParamVector& p) const override {
        return std::make_unique<DeltaRuleAgent>(p, variant_);
    }

private:
    DeltaRuleVariant variant_;
};

inline ChoiceDistribution delta_rule_probs(const ParamVector& params, const Session& session, std::size_t t,
                                           DeltaRuleVariant variant) {
    return distribution_at(DeltaRule{variant}, params, session, t);
}

}  // namespace cogfit::models
