#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cogfit/models/model.hpp"

namespace cogfit::models {

struct CardState {
    double x_win = 0.0;
    double x_loss = 0.0;
    double p_win = 0.0;
    double p_loss = 0.0;
};

// Decision-updated reference point model for the Columbia card task:
//   logit(sample) = h (x_win p_win + x_loss p_loss) + i,  logit(stop) = j.
// The value/weighting parameters a..g belong to the model's parameter set
// but do not enter this choice rule.
inline std::pair<double, double> durp_logits(double h, double i, double j, const CardState& s) {
    if (!(s.p_win >= 0.0 && s.p_win <= 1.0 && s.p_loss >= 0.0 && s.p_loss <= 1.0))
        fail(ErrorKind::domain, "card probabilities must lie in [0, 1]");
    return {h * (s.x_win * s.p_win + s.x_loss * s.p_loss) + i, j};
}

inline ChoiceDistribution durp_probs(const ParamVector& params, const CardState& state) {
    const auto [sample, stop] = durp_logits(params["h"], params["i"], params["j"], state);
    const std::vector<double> logits{sample, stop};
    return from_logits({"sample", "stop"}, logits);
}

// Trials carry scalars x_win, x_loss, p_win, p_loss; the "sample" tag names
// the sampling option (default: first option).
class DurpAgent final : public Agent {
public:
    explicit DurpAgent(const ParamVector& p)
        : h_(p["h"]), i_(p["i"]), j_(p["j"]), ih_(p.index_of("h")), ii_(p.index_of("i")), ij_(p.index_of("j")) {}

    void logits(const Trial& trial, std::span<double> out) override {
        require_size(trial, out);
        const std::size_t s = sample_index(trial);
        const auto [sample, stop] = durp_logits(h_, i_, j_, state(trial));
        for (std::size_t k = 0; k < out.size(); ++k) out[k] = k == s ? sample : stop;
    }

    void add_logit_gradient(const Trial& trial, std::span<const double> w, std::span<double> grad) override {
        const std::size_t s = sample_index(trial);
        const CardState st = state(trial);
        for (std::size_t k = 0; k < w.size(); ++k) {
            if (k == s) {
                grad[ih_] += w[k] * (st.x_win * st.p_win + st.x_loss * st.p_loss);
                grad[ii_] += w[k];
            } else {
                grad[ij_] += w[k];
            }
        }
    }

private:
    static std::size_t sample_index(const Trial& trial) {
        if (trial.choice_set.size() != 2)
            fail(ErrorKind::malformed_session, "trial " + std::to_string(trial.index) + ": expected sample/stop pair");
        const std::string* tag = trial.tag("sample");
        return tag ? trial.option_index(*tag) : 0;
    }
    static CardState state(const Trial& t) {
        return {t.scalar("x_win"), t.scalar("x_loss"), t.scalar("p_win"), t.scalar("p_loss")};
    }

    double h_, i_, j_;
    std::size_t ih_, ii_, ij_;
};

class Durp final : public Model {
public:
    std::string_view tag() const override { return "durp"; }
    std::vector<std::string> parameter_names(std::span<const Session>) const override {
        return {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
    }
    std::unique_ptr<Agent> make_agent(const ParamVector& p) const override {
        return std::make_unique<DurpAgent>(p);
    }
    bool has_analytic_gradient() const override { return true; }
};

}  // namespace cogfit::models
