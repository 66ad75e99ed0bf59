#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cogfit/core/numeric.hpp"
#include "cogfit/models/model.hpp"

namespace cogfit::models {

// Rescorla-Wagner learner with asymmetric learning rates, a stickiness term
// and a choice-count term:
//   logit_i = a V_i + b [c_{t-1} = i] + c #{k < t : c_k = i}
// V of the chosen option moves toward the reward with rate sig(alpha_pos)
// for non-negative prediction errors and sig(alpha_neg) otherwise; V starts
// at d. State resets whenever the "block" stimulus tag changes.
class RescorlaWagnerAgent final : public Agent {
public:
    explicit RescorlaWagnerAgent(const ParamVector& p)
        : rate_pos_(sigmoid(p["alpha_pos"])),
          rate_neg_(sigmoid(p["alpha_neg"])),
          a_(p["a"]),
          b_(p["b"]),
          c_(p["c"]),
          values_(p["d"]) {}

    void logits(const Trial& trial, std::span<double> out) override {
        require_size(trial, out);
        sync(trial);
        for (std::size_t i = 0; i < out.size(); ++i) {
            const std::string& label = trial.choice_set[i];
            const double stick = (last_ && *last_ == label) ? 1.0 : 0.0;
            out[i] = a_ * values_.get(label) + b_ * stick + c_ * counts_.get(label);
        }
    }

    void observe(const Trial& trial) override {
        sync(trial);
        const double r = trial.reward();
        double& v = values_.at(trial.chosen);
        const double delta = r - v;
        v += (delta >= 0.0 ? rate_pos_ : rate_neg_) * delta;
        counts_.at(trial.chosen) += 1.0;
        last_ = trial.chosen;
    }

    double value(const std::string& label) const { return values_.get(label); }

private:
    void sync(const Trial& trial) {
        if (blocks_.changed(trial)) {
            values_.clear();
            counts_.clear();
            last_.reset();
        }
    }

    double rate_pos_, rate_neg_, a_, b_, c_;
    LabelTable<double> values_;
    LabelTable<double> counts_{0.0};
    std::optional<std::string> last_;
    BlockTracker blocks_;
};

// Context-dependent variant: values keyed by (state_tag, option), single
// rate sig(alpha), logit = beta * V_{s,i}, V starts at d.
class RescorlaWagnerContextAgent final : public Agent {
public:
    explicit RescorlaWagnerContextAgent(const ParamVector& p)
        : rate_(sigmoid(p["alpha"])), beta_(p["beta"]), values_(p["d"]) {}

    void logits(const Trial& trial, std::span<double> out) override {
        require_size(trial, out);
        sync(trial);
        const std::string state = trial.state_tag.value_or("");
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = beta_ * values_.get(key(state, trial.choice_set[i]));
    }

    void observe(const Trial& trial) override {
        sync(trial);
        double& v = values_.at(key(trial.state_tag.value_or(""), trial.chosen));
        v += rate_ * (trial.reward() - v);
    }

private:
    static std::string key(const std::string& state, const std::string& option) {
        return state + '\x1f' + option;
    }
    void sync(const Trial& trial) {
        if (blocks_.changed(trial)) values_.clear();
    }

    double rate_, beta_;
    LabelTable<double> values_;
    BlockTracker blocks_;
};

class RescorlaWagner final : public Model {
public:
    std::string_view tag() const override { return "rescorla_wagner"; }
    std::vector<std::string> parameter_names(std::span<const Session>) const override {
        return {"alpha_pos", "alpha_neg", "a", "b", "c", "d"};
    }
    std::unique_ptr<Agent> make_agent(const ParamVector& p) const override {
        return std::make_unique<RescorlaWagnerAgent>(p);
    }
};

class RescorlaWagnerContext final : public Model {
public:
    std::string_view tag() const override { return "rescorla_wagner_context"; }
    std::vector<std::string> parameter_names(std::span<const Session>) const override {
        return {"alpha", "beta", "d"};
    }
    std::unique_ptr<Agent> make_agent(const ParamVector& p) const override {
        return std::make_unique<RescorlaWagnerContextAgent>(p);
    }
};

inline ChoiceDistribution rw_probs(const ParamVector& params, const Session& session, std::size_t t,
                                   bool context_variant = false) {
    if (context_variant) return distribution_at(RescorlaWagnerContext{}, params, session, t);
    return distribution_at(RescorlaWagner{}, params, session, t);
}

}  // namespace cogfit::models
