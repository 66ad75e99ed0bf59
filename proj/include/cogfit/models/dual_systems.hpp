#pragma once

#include <algorithm>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cogfit/core/numeric.hpp"
#include "cogfit/models/model.hpp"

namespace cogfit::models {

/// State tag marking first-stage trials of the two-step task.
inline constexpr const char* kFirstStage = "0";

/// Transition probability from a first-stage option to its common planet.
inline constexpr double kCommonTransition = 0.7;

// Model-based / model-free mixture for the two-step task.
//
// Session layout: a first-stage trial (state_tag "0", stimulus
// "common:<option>" naming each option's common planet) is followed by a
// second-stage trial whose state_tag is the planet reached and whose feedback
// is the reward.
//
//   first stage:  logit_a = beta (w Q_MB(a) + (1 - w) Q_MF(a)) + stick [a = previous a]
//   second stage: logit_b = beta Q2(s, b)
//   Q_MB(a) = 0.7 max_b Q2(common(a), b) + 0.3 max_b Q2(rare(a), b)
//
// with w = sig(tau). After each pair, with shared rate alpha = sig(alpha) and
// eligibility fixed at 1:
//   Q_MF(a) += alpha (Q2(s, b) - Q_MF(a)) + alpha (r - Q2(s, b))
//   Q2(s, b) += alpha (r - Q2(s, b))
class DualSystemsAgent final : public Agent {
public:
    explicit DualSystemsAgent(const ParamVector& p, std::optional<double> pinned_weight = std::nullopt)
        : beta_(p["beta"]),
          weight_(pinned_weight.value_or(sigmoid(p["tau"]))),
          rate_(sigmoid(p["alpha"])),
          stick_(p["stickiness"]) {}

    void logits(const Trial& trial, std::span<double> out) override {
        require_size(trial, out);
        if (is_first_stage(trial)) {
            for (std::size_t i = 0; i < out.size(); ++i) {
                const std::string& a = trial.choice_set[i];
                const double mb = model_based(trial, a);
                const double mf = q1_.get(a);
                const double stick = (previous_ && *previous_ == a) ? 1.0 : 0.0;
                out[i] = beta_ * (weight_ * mb + (1.0 - weight_) * mf) + stick_ * stick;
            }
        } else {
            const std::string& s = *trial.state_tag;
            for (std::size_t i = 0; i < out.size(); ++i) out[i] = beta_ * q2(s, trial.choice_set[i]);
        }
    }

    void observe(const Trial& trial) override {
        if (is_first_stage(trial)) {
            if (pending_)
                fail(ErrorKind::malformed_session,
                     "trial " + std::to_string(pending_index_) + " is missing its second stage");
            pending_ = trial.chosen;
            pending_index_ = trial.index;
            return;
        }
        if (!pending_)
            fail(ErrorKind::malformed_session,
                 "trial " + std::to_string(trial.index) + ": second stage without a first stage");
        const std::string& s = *trial.state_tag;
        auto& options = state_options_.at(s);
        for (const auto& o : trial.choice_set)
            if (std::find(options.begin(), options.end(), o) == options.end()) options.push_back(o);

        const double r = trial.reward();
        double& second = q2_.at(key(s, trial.chosen));
        double& first = q1_.at(*pending_);
        const double delta1 = second - first;
        const double delta2 = r - second;
        first += rate_ * (delta1 + delta2);
        second += rate_ * delta2;
        previous_ = *pending_;
        pending_.reset();
    }

    void finish() override {
        if (pending_)
            fail(ErrorKind::malformed_session,
                 "trial " + std::to_string(pending_index_) + " is missing its second stage");
    }

private:
    static bool is_first_stage(const Trial& t) { return !t.state_tag || *t.state_tag == kFirstStage; }

    static std::string key(const std::string& s, const std::string& o) { return s + '\x1f' + o; }

    double q2(const std::string& s, const std::string& o) const { return q2_.get(key(s, o)); }

    double best(const std::string& s) const {
        double m = 0.0;  // all second-stage values start at 0
        bool any = false;
        for (const auto& [state, opts] : state_options_.entries()) {
            if (state != s) continue;
            for (const auto& o : opts) {
                const double v = q2(s, o);
                m = any ? std::max(m, v) : v;
                any = true;
            }
        }
        return m;
    }

    double model_based(const Trial& trial, const std::string& a) const {
        const std::string* common = trial.tag("common:" + a);
        if (!common)
            fail(ErrorKind::malformed_session,
                 "trial " + std::to_string(trial.index) + ": missing 'common:" + a + "'");
        const std::string* rare = nullptr;
        for (const auto& other : trial.choice_set) {
            if (other == a) continue;
            const std::string* c = trial.tag("common:" + other);
            if (c && *c != *common) rare = c;
        }
        const double rare_value = rare ? best(*rare) : 0.0;
        return kCommonTransition * best(*common) + (1.0 - kCommonTransition) * rare_value;
    }

    double beta_, weight_, rate_, stick_;
    LabelTable<double> q1_{0.0};
    LabelTable<double> q2_{0.0};
    LabelTable<std::vector<std::string>> state_options_;
    std::optional<std::string> pending_;
    std::size_t pending_index_ = 0;
    std::optional<std::string> previous_;
};

class DualSystems final : public Model {
public:
    /// With a pinned weight the mixture ignores tau (1 = model-based, 0 = model-free).
    explicit DualSystems(std::optional<double> pinned_weight = std::nullopt) : pinned_(pinned_weight) {}

    std::string_view tag() const override { return "dual_systems"; }
    std::vector<std::string> parameter_names(std::span<const Session>) const override {
        return {"beta", "tau", "alpha", "stickiness"};
    }
    std::unique_ptr<Agent> make_agent(const ParamVector& p) const override {
        return std::make_unique<DualSystemsAgent>(p, pinned_);
    }

private:
    std::optional<double> pinned_;
};

inline ChoiceDistribution dual_systems_probs(const ParamVector& params, const Session& session, std::size_t t) {
    return distribution_at(DualSystems{}, params, session, t);
}

}  // namespace cogfit::models
