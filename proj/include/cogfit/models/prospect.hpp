#pragma once

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "cogfit/core/numeric.hpp"
#include "cogfit/models/model.hpp"

namespace cogfit::models {

using corpus::Lottery;

/// Prospect-theory valuation with sigmoid-squashed shape parameters.
///   pi(p) = sig(a) + sig(b) p
///   u(x)  = sig(c) x^sig(d)              for x >= 0
///         = -sig(e) (-sig(f) x)^sig(g)   for x < 0
///   logit = exp(beta) * sum_k pi(p_k) u(x_k)
struct ProspectValuation {
    double scale, a, b, c, d, e, f, g;

    explicit ProspectValuation(const ParamVector& p)
        : scale(std::exp(p["beta"])),
          a(sigmoid(p["a"])),
          b(sigmoid(p["b"])),
          c(sigmoid(p["c"])),
          d(sigmoid(p["d"])),
          e(sigmoid(p["e"])),
          f(sigmoid(p["f"])),
          g(sigmoid(p["g"])) {}

    double weight(double p) const { return a + b * p; }

    double utility(double x) const {
        if (x >= 0.0) return c * std::pow(x, d);
        return -e * std::pow(-f * x, g);
    }

    double logit(const Lottery& lottery) const {
        if (lottery.outcomes.size() != lottery.probs.size())
            fail(ErrorKind::malformed_lottery, "outcome/probability length mismatch");
        double v = 0.0;
        for (std::size_t k = 0; k < lottery.outcomes.size(); ++k) {
            const double p = lottery.probs[k];
            if (!(p >= 0.0 && p <= 1.0)) fail(ErrorKind::domain, "lottery probability outside [0, 1]");
            v += weight(p) * utility(lottery.outcomes[k]);
        }
        return scale * v;
    }
};

inline ChoiceDistribution prospect_probs(const ParamVector& params, std::span<const Lottery> lotteries) {
    const ProspectValuation val(params);
    std::vector<double> logits;
    std::vector<std::string> labels;
    for (std::size_t i = 0; i < lotteries.size(); ++i) {
        logits.push_back(val.logit(lotteries[i]));
        labels.push_back(std::to_string(i));
    }
    return from_logits(std::move(labels), logits);
}

// Options read their gamble from stimulus "lottery:<label>".
class ProspectAgent final : public Agent {
public:
    explicit ProspectAgent(const ParamVector& p) : val_(p) {}

    void logits(const Trial& trial, std::span<double> out) override {
        require_size(trial, out);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = val_.logit(trial.lottery("lottery:" + trial.choice_set[i]));
    }

private:
    ProspectValuation val_;
};

class ProspectTheory final : public Model {
public:
    std::string_view tag() const override { return "prospect"; }
    std::vector<std::string> parameter_names(std::span<const Session>) const override {
        return {"beta", "a", "b", "c", "d", "e", "f", "g"};
    }
    std::unique_ptr<Agent> make_agent(const ParamVector& p) const override {
        return std::make_unique<ProspectAgent>(p);
    }
};

}  // namespace cogfit::models
