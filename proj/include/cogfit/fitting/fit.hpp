#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cogfit/core/parallel.hpp"
#include "cogfit/fitting/gradient.hpp"
#include "cogfit/fitting/objective.hpp"

namespace cogfit::fitting {

enum class GradientMode { finite_difference, analytic_if_available };

struct FitConfig {
    int epochs = 1000;
    double learning_rate = 0.1;
    GradientMode gradient_mode = GradientMode::analytic_if_available;
    double fd_epsilon = 1e-5;
    std::uint64_t seed = 0;
    // Average the iterates of the second half of training and report that point.
    bool polyak = false;
    unsigned workers = 1;

    void validate() const {
        require(epochs >= 1, ErrorKind::precondition, "epochs must be at least 1");
        require(learning_rate > 0.0, ErrorKind::precondition, "learning rate must be positive");
        require(fd_epsilon > 0.0, ErrorKind::precondition, "fd_epsilon must be positive");
    }
};

struct FitResult {
    std::string model_tag;
    ParamVector params;
    double final_nll_per_response = 0.0;
    std::vector<double> nll_trace;
    std::size_t responses_counted = 0;
    std::vector<std::string> participants;
};

enum class FitMode { joint, per_participant };

inline double aic(double total_loglik, std::size_t k) { return 2.0 * static_cast<double>(k) - 2.0 * total_loglik; }

/// Gradient of mean_nll under cfg.gradient_mode.
inline std::vector<double> nll_gradient(const Model& model, const ParamVector& params,
                                        std::span<const Session> sessions, const FitConfig& cfg) {
    if (cfg.gradient_mode == GradientMode::analytic_if_available && model.has_analytic_gradient())
        return analytic_gradient(model, params, sessions, cfg.workers);
    ParamVector probe = params;
    return central_difference(
        [&](std::span<const double> x) {
            std::copy(x.begin(), x.end(), probe.values().begin());
            return mean_nll(model, probe, sessions, cfg.workers);
        },
        params.values(), cfg.fd_epsilon);
}

namespace detail {

inline std::vector<std::string> sorted_participants(std::span<const Session> sessions) {
    std::set<std::string> ids;
    for (const auto& s : sessions) ids.insert(s.participant_id);
    return {ids.begin(), ids.end()};
}

// Full-batch Adam from `start` (beta1 0.9, beta2 0.999, eps 1e-8, constant step).
inline FitResult adam(const Model& model, ParamVector start, std::span<const Session> sessions,
                      const FitConfig& cfg) {
    constexpr double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const std::size_t dim = start.size();
    FitResult out;
    out.model_tag = std::string(model.tag());
    out.participants = sorted_participants(sessions);
    out.responses_counted = count_responses(sessions);
    if (out.responses_counted == 0) fail(ErrorKind::empty_input, "sessions contain no scored responses");

    ParamVector theta = std::move(start);
    std::vector<double> m(dim, 0.0), v(dim, 0.0), avg(dim, 0.0);
    const int avg_from = cfg.epochs / 2;
    int averaged = 0;
    out.nll_trace.reserve(static_cast<std::size_t>(cfg.epochs));
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        double nll;
        std::vector<double> g;
        try {
            nll = mean_nll(model, theta, sessions, cfg.workers);
            g = dim ? nll_gradient(model, theta, sessions, cfg) : std::vector<double>{};
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::numeric) throw;
            fail(ErrorKind::divergence, "diverged at epoch " + std::to_string(epoch) + ": " + e.what());
        }
        if (!std::isfinite(nll)) fail(ErrorKind::divergence, "diverged at epoch " + std::to_string(epoch));
        out.nll_trace.push_back(nll);

        const double c1 = 1.0 - std::pow(b1, epoch + 1), c2 = 1.0 - std::pow(b2, epoch + 1);
        auto& x = theta.values();
        for (std::size_t i = 0; i < dim; ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * g[i];
            v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
            x[i] -= cfg.learning_rate * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps);
        }
        if (!theta.all_finite())
            fail(ErrorKind::divergence, "parameters became non-finite at epoch " + std::to_string(epoch));
        if (cfg.polyak && epoch >= avg_from) {
            ++averaged;
            for (std::size_t i = 0; i < dim; ++i) avg[i] += (x[i] - avg[i]) / averaged;
        }
    }
    if (cfg.polyak && averaged > 0) theta.values() = avg;
    try {
        out.final_nll_per_response = mean_nll(model, theta, sessions, cfg.workers);
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::numeric) throw;
        fail(ErrorKind::divergence, std::string("diverged after final epoch: ") + e.what());
    }
    out.params = std::move(theta);
    return out;
}

}  // namespace detail

/// Joint maximum-likelihood fit of one parameter vector to all sessions.
inline FitResult fit(const Model& model, std::span<const Session> sessions, const FitConfig& cfg = {}) {
    cfg.validate();
    if (sessions.empty()) fail(ErrorKind::empty_input, "no sessions to fit");
    return detail::adam(model, model.initial_params(sessions, cfg.seed), sessions, cfg);
}

/// Independent fit per participant. Parameter layout comes from all sessions so
/// data-sized models share names across participants. Participants are fitted
/// in parallel; each fit is single-threaded.
inline std::map<std::string, FitResult> fit_per_participant(const Model& model, std::span<const Session> sessions,
                                                            const FitConfig& cfg = {}) {
    cfg.validate();
    if (sessions.empty()) fail(ErrorKind::empty_input, "no sessions to fit");
    const ParamVector start = model.initial_params(sessions, cfg.seed);
    const auto ids = detail::sorted_participants(sessions);
    std::vector<std::vector<Session>> groups(ids.size());
    for (const auto& s : sessions) {
        const auto at = std::lower_bound(ids.begin(), ids.end(), s.participant_id) - ids.begin();
        groups[static_cast<std::size_t>(at)].push_back(s);
    }
    FitConfig inner = cfg;
    inner.workers = 1;
    std::vector<FitResult> results(ids.size());
    parallel_for(ids.size(), cfg.workers,
                 [&](std::size_t i) { results[i] = detail::adam(model, start, groups[i], inner); });
    std::map<std::string, FitResult> out;
    for (std::size_t i = 0; i < ids.size(); ++i) out.emplace(ids[i], std::move(results[i]));
    return out;
}

inline nlohmann::json to_json(const FitResult& r) {
    return {{"model", r.model_tag},
            {"params", models::to_json(r.params)},
            {"final_nll_per_response", r.final_nll_per_response},
            {"nll_trace", r.nll_trace},
            {"responses_counted", r.responses_counted},
            {"participants", r.participants}};
}

inline FitResult fit_result_from_json(const nlohmann::json& j) {
    try {
        FitResult r;
        r.model_tag = j.at("model").get<std::string>();
        r.params = models::params_from_json(j.at("params"));
        r.final_nll_per_response = j.at("final_nll_per_response").get<double>();
        r.nll_trace = j.at("nll_trace").get<std::vector<double>>();
        r.responses_counted = j.at("responses_counted").get<std::size_t>();
        r.participants = j.value("participants", std::vector<std::string>{});
        return r;
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::io, std::string("malformed fit result: ") + e.what());
    }
}

}  // namespace cogfit::fitting
