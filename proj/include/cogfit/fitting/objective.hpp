#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cogfit/core/numeric.hpp"
#include "cogfit/core/parallel.hpp"
#include "cogfit/models/model.hpp"

namespace cogfit::fitting {

using models::Model;
using models::ParamVector;
using models::Session;
using models::Trial;

namespace detail {

inline std::string where(const Session& s, const Trial& t) {
    return "session " + s.experiment_id + "/" + s.participant_id + ", trial " + std::to_string(t.index);
}

// Walks one session and calls on_scored(agent, trial, logits, new_response) for
// every non-instructed trial. new_response is false for trials that continue
// the previous trial's response group.
template <class OnScored>
void walk(const Model& model, const ParamVector& params, const Session& session, OnScored&& on_scored) {
    auto agent = model.make_agent(params);
    std::vector<double> logits;
    std::optional<long long> group;
    bool open = false;
    for (const Trial& trial : session.trials) {
        if (!trial.instructed) {
            logits.assign(trial.choice_set.size(), 0.0);
            agent->logits(trial, logits);
            const bool continues = open && trial.response_group && group && *trial.response_group == *group;
            on_scored(*agent, trial, std::span<const double>(logits), !continues);
            group = trial.response_group;
            open = true;
        }
        agent->observe(trial);
    }
    agent->finish();
}

}  // namespace detail

/// Log-likelihood of every response in one session, in trial order. Trials
/// of one response group contribute a single summed entry; instructed trials
/// contribute nothing.
inline std::vector<double> response_logliks(const Model& model, const ParamVector& params, const Session& session) {
    std::vector<double> out;
    detail::walk(model, params, session,
                 [&](models::Agent&, const Trial& trial, std::span<const double> logits, bool fresh) {
                     const double ll = log_softmax_at(logits, trial.chosen_index());
                     if (!std::isfinite(ll))
                         fail(ErrorKind::numeric, "non-finite log-likelihood at " + detail::where(session, trial));
                     if (fresh)
                         out.push_back(ll);
                     else
                         out.back() += ll;
                 });
    return out;
}

/// Per-response log-likelihoods over all sessions, flattened in session order.
inline std::vector<double> response_logliks(const Model& model, const ParamVector& params,
                                            std::span<const Session> sessions, unsigned workers = 1) {
    std::vector<std::vector<double>> slots(sessions.size());
    parallel_for(sessions.size(), workers,
                 [&](std::size_t i) { slots[i] = response_logliks(model, params, sessions[i]); });
    std::vector<double> flat;
    for (auto& s : slots) flat.insert(flat.end(), s.begin(), s.end());
    return flat;
}

/// Per-response negative log-likelihoods; the common path behind mean_nll and evaluate.
inline std::vector<double> response_nlls(const Model& model, const ParamVector& params,
                                         std::span<const Session> sessions, unsigned workers = 1) {
    auto v = response_logliks(model, params, sessions, workers);
    for (double& x : v) x = -x;
    return v;
}

inline double mean_of(std::span<const double> v) {
    if (v.empty()) fail(ErrorKind::empty_input, "no responses to average");
    return compensated_sum(v) / static_cast<double>(v.size());
}

inline double mean_nll(const Model& model, const ParamVector& params, std::span<const Session> sessions,
                       unsigned workers = 1) {
    return mean_of(response_nlls(model, params, sessions, workers));
}

inline std::size_t count_responses(std::span<const Session> sessions) {
    std::size_t n = 0;
    for (const auto& s : sessions) n += s.response_count();
    return n;
}

/// Analytic gradient of mean_nll for models that provide d(logit)/d(theta).
/// Uses d(-log p_c)/d(logit_m) = p_m - 1[m = c].
inline std::vector<double> analytic_gradient(const Model& model, const ParamVector& params,
                                             std::span<const Session> sessions, unsigned workers = 1) {
    require(model.has_analytic_gradient(), ErrorKind::precondition,
            "model '" + std::string(model.tag()) + "' has no analytic gradient");
    const std::size_t dim = params.size();
    std::vector<std::vector<double>> slots(sessions.size(), std::vector<double>(dim, 0.0));
    std::vector<std::size_t> counts(sessions.size(), 0);
    parallel_for(sessions.size(), workers, [&](std::size_t i) {
        std::vector<double> w;
        detail::walk(model, params, sessions[i],
                     [&](models::Agent& agent, const Trial& trial, std::span<const double> logits, bool fresh) {
                         w.assign(logits.size(), 0.0);
                         softmax(logits, w);
                         w[trial.chosen_index()] -= 1.0;
                         agent.add_logit_gradient(trial, w, slots[i]);
                         if (fresh) ++counts[i];
                     });
    });
    std::size_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) fail(ErrorKind::empty_input, "no responses to average");
    std::vector<double> grad(dim);
    for (std::size_t d = 0; d < dim; ++d) {
        CompensatedSum acc;
        for (const auto& s : slots) acc.add(s[d]);
        grad[d] = acc.value() / static_cast<double>(total);
        if (!std::isfinite(grad[d]))
            fail(ErrorKind::numeric, "non-finite gradient for parameter '" + params.names()[d] + "'");
    }
    return grad;
}

}  // namespace cogfit::fitting
