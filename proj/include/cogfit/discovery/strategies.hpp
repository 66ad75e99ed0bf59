#pragma once

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cogfit/core/numeric.hpp"
#include "cogfit/models/model.hpp"

namespace cogfit::discovery {

using models::Agent;
using models::ChoiceDistribution;
using models::Model;
using models::ParamVector;
using models::Session;
using models::Trial;

enum class StrategyKind { wadd, ew, ttb, deepseek_two_regime, srm_mixture };

inline constexpr std::array<StrategyKind, 5> kAllStrategies{StrategyKind::wadd, StrategyKind::ew, StrategyKind::ttb,
                                                            StrategyKind::deepseek_two_regime,
                                                            StrategyKind::srm_mixture};

using Cues = std::array<double, 4>;

inline constexpr Cues kWaddWeights{0.9, 0.8, 0.7, 0.6};
inline constexpr Cues kEwWeights{1.0, 1.0, 1.0, 1.0};
inline constexpr Cues kTtbWeights{1.0, 0.5, 0.25, 0.125};

inline std::string_view to_string(StrategyKind k) {
    switch (k) {
        case StrategyKind::wadd: return "wadd";
        case StrategyKind::ew: return "ew";
        case StrategyKind::ttb: return "ttb";
        case StrategyKind::deepseek_two_regime: return "deepseek_two_regime";
        case StrategyKind::srm_mixture: return "srm_mixture";
    }
    return "?";
}

inline std::optional<StrategyKind> strategy_from_string(std::string_view tag) {
    for (auto k : kAllStrategies)
        if (to_string(k) == tag) return k;
    return std::nullopt;
}

inline std::size_t free_parameters(StrategyKind k) { return k == StrategyKind::srm_mixture ? 2 : 1; }

inline void check_binary(const Cues& x) {
    for (double v : x)
        if (v != 0.0 && v != 1.0) fail(ErrorKind::domain, "cue values must be 0 or 1");
}

inline double cue_sum(const Cues& x) { return x[0] + x[1] + x[2] + x[3]; }

/// Effective weight vector for a pair. sigma_raw only matters for srm_mixture.
inline Cues strategy_weights(StrategyKind k, const Cues& a, const Cues& b, double sigma_raw = 0.0) {
    switch (k) {
        case StrategyKind::wadd: return kWaddWeights;
        case StrategyKind::ew: return kEwWeights;
        case StrategyKind::ttb: return kTtbWeights;
        case StrategyKind::deepseek_two_regime: return cue_sum(a) == cue_sum(b) ? kTtbWeights : kEwWeights;
        case StrategyKind::srm_mixture: {
            const double s = sigmoid(sigma_raw);
            Cues w{};
            for (std::size_t i = 0; i < 4; ++i) w[i] = s * kTtbWeights[i] + (1.0 - s) * kEwWeights[i];
            return w;
        }
    }
    return kEwWeights;
}

inline double weighted_score(const Cues& w, const Cues& x) {
    return w[0] * x[0] + w[1] * x[1] + w[2] * x[2] + w[3] * x[3];
}

/// p over {A, B} with logit = beta * w.x per option.
inline ChoiceDistribution strategy_probs(StrategyKind k, const ParamVector& params, const Cues& a, const Cues& b) {
    check_binary(a);
    check_binary(b);
    const double sigma = k == StrategyKind::srm_mixture ? params["sigma"] : 0.0;
    const Cues w = strategy_weights(k, a, b, sigma);
    const double beta = params["beta"];
    const std::vector<double> logits{beta * weighted_score(w, a), beta * weighted_score(w, b)};
    return models::from_logits({"A", "B"}, logits);
}

/// Cue vector of one option, stored under "cues:<label>".
inline Cues trial_cues(const Trial& t, const std::string& label) {
    const auto& v = t.vector("cues:" + label);
    if (v.size() != 4)
        fail(ErrorKind::malformed_session,
             "trial " + std::to_string(t.index) + ": cue vector of '" + label + "' must have 4 entries");
    Cues c{v[0], v[1], v[2], v[3]};
    check_binary(c);
    return c;
}

class StrategyAgent final : public Agent {
public:
    StrategyAgent(StrategyKind kind, const ParamVector& p)
        : kind_(kind), beta_(p["beta"]), ib_(p.index_of("beta")) {
        if (kind_ == StrategyKind::srm_mixture) {
            sigma_ = p["sigma"];
            is_ = p.index_of("sigma");
        }
    }

    void logits(const Trial& trial, std::span<double> out) override {
        models::require_size(trial, out);
        const auto cues = all_cues(trial);
        const Cues w = weights(cues);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = beta_ * weighted_score(w, cues[i]);
    }

    void add_logit_gradient(const Trial& trial, std::span<const double> wts, std::span<double> grad) override {
        const auto cues = all_cues(trial);
        const Cues w = weights(cues);
        const double s = sigmoid(sigma_);
        for (std::size_t i = 0; i < wts.size(); ++i) {
            grad[ib_] += wts[i] * weighted_score(w, cues[i]);
            if (kind_ == StrategyKind::srm_mixture) {
                // d/dsigma_raw of beta * (s ttb + (1-s) ew).x = beta s(1-s) (ttb - ew).x
                const double diff = weighted_score(kTtbWeights, cues[i]) - weighted_score(kEwWeights, cues[i]);
                grad[is_] += wts[i] * beta_ * s * (1.0 - s) * diff;
            }
        }
    }

private:
    std::vector<Cues> all_cues(const Trial& trial) const {
        if (trial.choice_set.size() != 2)
            fail(ErrorKind::malformed_session, "trial " + std::to_string(trial.index) + " is not a paired comparison");
        return {trial_cues(trial, trial.choice_set[0]), trial_cues(trial, trial.choice_set[1])};
    }
    Cues weights(const std::vector<Cues>& cues) const { return strategy_weights(kind_, cues[0], cues[1], sigma_); }

    StrategyKind kind_;
    double beta_;
    double sigma_ = 0.0;
    std::size_t ib_;
    std::size_t is_ = 0;
};

class Strategy final : public Model {
public:
    explicit Strategy(StrategyKind kind) : kind_(kind) {}

    StrategyKind kind() const { return kind_; }
    std::string_view tag() const override { return to_string(kind_); }
    std::vector<std::string> parameter_names(std::span<const Session>) const override {
        if (kind_ == StrategyKind::srm_mixture) return {"beta", "sigma"};
        return {"beta"};
    }
    std::unique_ptr<Agent> make_agent(const ParamVector& p) const override {
        return std::make_unique<StrategyAgent>(kind_, p);
    }
    bool has_analytic_gradient() const override { return true; }

private:
    StrategyKind kind_;
};

}  // namespace cogfit::discovery
