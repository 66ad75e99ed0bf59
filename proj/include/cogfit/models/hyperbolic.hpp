#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cogfit/models/model.hpp"

namespace cogfit::models {

struct DelayedReward {
    double reward = 0.0;
    double delay = 0.0;
};

// logit_i = beta * x_i / (1 + k * delay_i), k = exp(a) so the pole at k*d = -1 is unreachable
inline double discounted_logit(double beta, double k, const DelayedReward& o) {
    if (o.delay < 0.0) fail(ErrorKind::domain, "negative delay");
    return beta * o.reward / (1.0 + k * o.delay);
}

inline double hyperbolic_logit(double beta, double a, const DelayedReward& o) {
    return discounted_logit(beta, std::exp(a), o);
}

inline ChoiceDistribution hyperbolic_probs(const ParamVector& params, std::span<const DelayedReward> options) {
    const double beta = params["beta"], a = params["a"];
    std::vector<double> logits;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < options.size(); ++i) {
        logits.push_back(hyperbolic_logit(beta, a, options[i]));
        labels.push_back(std::to_string(i));
    }
    return from_logits(std::move(labels), logits);
}

// Options read "reward:<label>" and "delay:<label>".
class HyperbolicAgent final : public Agent {
public:
    explicit HyperbolicAgent(const ParamVector& p)
        : beta_(p["beta"]), k_(std::exp(p["a"])), i_beta_(p.index_of("beta")), i_a_(p.index_of("a")) {}

    void logits(const Trial& trial, std::span<double> out) override {
        require_size(trial, out);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = discounted_logit(beta_, k_, option(trial, i));
    }

    void add_logit_gradient(const Trial& trial, std::span<const double> w, std::span<double> grad) override {
        for (std::size_t i = 0; i < w.size(); ++i) {
            const DelayedReward o = option(trial, i);
            const double denom = 1.0 + k_ * o.delay;
            grad[i_beta_] += w[i] * o.reward / denom;
            grad[i_a_] -= w[i] * beta_ * o.reward * o.delay * k_ / (denom * denom);
        }
    }

private:
    static DelayedReward option(const Trial& trial, std::size_t i) {
        const std::string& label = trial.choice_set[i];
        return {trial.scalar("reward:" + label), trial.scalar("delay:" + label)};
    }

    double beta_, k_;
    std::size_t i_beta_, i_a_;
};

class Hyperbolic final : public Model {
public:
    std::string_view tag() const override { return "hyperbolic"; }
    std::vector<std::string> parameter_names(std::span<const Session>) const override { return {"beta", "a"}; }
    std::unique_ptr<Agent> make_agent(const ParamVector& p) const override {
        return std::make_unique<HyperbolicAgent>(p);
    }
    bool has_analytic_gradient() const override { return true; }
};

}  // namespace cogfit::models
