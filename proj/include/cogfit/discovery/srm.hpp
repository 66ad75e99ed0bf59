#pragma once

#include <algorithm>
#include <array>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "cogfit/discovery/strategies.hpp"
#include "cogfit/evaluation/report.hpp"
#include "cogfit/fitting/fit.hpp"
#include "cogfit/fitting/objective.hpp"
#include "cogfit/tasks/spec.hpp"

namespace cogfit::discovery {

struct StrategyFit {
    ParamVector params;
    double loglik = 0.0;
    double aic = 0.0;
    std::size_t responses = 0;
};

struct StrategyComparison {
    std::vector<StrategyKind> strategies;
    // per participant, per strategy (in `strategies` order)
    std::map<std::string, std::vector<StrategyFit>> fits;
    std::vector<double> aic_sum;
    std::vector<double> aic_mean;

    /// Strategy with the lowest summed AIC; earlier strategies win exact ties.
    StrategyKind best() const {
        std::size_t b = 0;
        for (std::size_t i = 1; i < strategies.size(); ++i)
            if (aic_sum[i] < aic_sum[b]) b = i;
        return strategies[b];
    }

    double summed(StrategyKind k) const {
        for (std::size_t i = 0; i < strategies.size(); ++i)
            if (strategies[i] == k) return aic_sum[i];
        fail(ErrorKind::precondition, "strategy not compared");
    }
};

/// Fits every strategy separately to each participant and sums AIC
/// (k = 1, or 2 for srm_mixture) across participants.
inline StrategyComparison compare_strategies(std::span<const Session> sessions, const fitting::FitConfig& cfg = {},
                                             std::span<const StrategyKind> kinds = kAllStrategies) {
    if (sessions.empty()) fail(ErrorKind::empty_input, "no sessions to compare");
    StrategyComparison out;
    out.strategies.assign(kinds.begin(), kinds.end());
    for (std::size_t s = 0; s < kinds.size(); ++s) {
        const Strategy model(kinds[s]);
        const auto per = fitting::fit_per_participant(model, sessions, cfg);
        for (const auto& [id, r] : per) {
            auto& row = out.fits[id];
            row.resize(kinds.size());
            StrategyFit f;
            f.params = r.params;
            f.responses = r.responses_counted;
            f.loglik = -r.final_nll_per_response * static_cast<double>(r.responses_counted);
            f.aic = fitting::aic(f.loglik, free_parameters(kinds[s]));
            row[s] = std::move(f);
        }
    }
    for (std::size_t s = 0; s < kinds.size(); ++s) {
        CompensatedSum acc;
        for (const auto& [id, row] : out.fits) acc.add(row[s].aic);
        out.aic_sum.push_back(acc.value());
        out.aic_mean.push_back(acc.value() / static_cast<double>(out.fits.size()));
    }
    return out;
}

inline void write_comparison_csv(std::ostream& os, const StrategyComparison& c) {
    os << "participant";
    for (auto k : c.strategies) os << ',' << to_string(k);
    os << '\n';
    for (const auto& [id, row] : c.fits) {
        os << id;
        for (const auto& f : row) os << ',' << evaluation::format_real(f.aic);
        os << '\n';
    }
    os << "sum";
    for (double v : c.aic_sum) os << ',' << evaluation::format_real(v);
    os << "\nmean";
    for (double v : c.aic_mean) os << ',' << evaluation::format_real(v);
    os << '\n';
}

struct RegretItem {
    std::size_t index = 0;
    double reference_loglik = 0.0;
    double candidate_loglik = 0.0;
    double regret = 0.0;
};

inline constexpr std::size_t kDefaultInspectionBudget = 10;

/// Top-k responses by regret = reference - candidate, ties by index.
inline std::vector<RegretItem> regret_rank(std::span<const double> reference, std::span<const double> candidate,
                                           std::size_t k = kDefaultInspectionBudget) {
    if (reference.size() != candidate.size())
        fail(ErrorKind::shape, "reference has " + std::to_string(reference.size()) + " responses, candidate " +
                                   std::to_string(candidate.size()));
    require(k <= reference.size(), ErrorKind::precondition,
            "k = " + std::to_string(k) + " exceeds " + std::to_string(reference.size()) + " responses");
    std::vector<RegretItem> items(reference.size());
    for (std::size_t i = 0; i < items.size(); ++i)
        items[i] = {i, reference[i], candidate[i], reference[i] - candidate[i]};
    std::stable_sort(items.begin(), items.end(),
                     [](const RegretItem& a, const RegretItem& b) { return a.regret > b.regret; });
    items.resize(k);
    return items;
}

/// Per-response log-likelihoods from CSV: one response per row, either a bare
/// value or "index,loglik" with indices 0, 1, 2, ... A non-numeric first row is a header.
inline std::vector<double> read_reference_logliks(std::istream& in) {
    std::vector<double> out;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (const auto body = tasks::trim(line); body.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');) fields.push_back(tasks::trim(f));
        tasks::TaskSpec probe;
        probe.parameters["v"] = fields.back();
        double v;
        try {
            v = probe.real("v", 0.0);
        } catch (const Error&) {
            if (n == 1 && out.empty()) continue;
            fail(ErrorKind::io, "reference line " + std::to_string(n) + ": not a number");
        }
        if (fields.size() >= 2) {
            probe.parameters["v"] = fields.front();
            const auto idx = probe.integer("v", -1);
            if (idx != static_cast<long long>(out.size()))
                fail(ErrorKind::io, "reference line " + std::to_string(n) + ": expected index " +
                                        std::to_string(out.size()));
        }
        out.push_back(v);
    }
    return out;
}

inline std::vector<double> load_reference_logliks(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open reference file '" + path + "'");
    return read_reference_logliks(in);
}

/// Fallback reference predictor: srm_mixture fitted jointly to all sessions.
inline std::vector<double> pooled_srm_reference(std::span<const Session> sessions, const fitting::FitConfig& cfg) {
    const Strategy srm(StrategyKind::srm_mixture);
    const auto fit = fitting::fit(srm, sessions, cfg);
    return fitting::response_logliks(srm, fit.params, sessions, cfg.workers);
}

/// (session, trial) of the first trial of every response, in the order of
/// fitting::response_logliks.
inline std::vector<std::pair<std::size_t, std::size_t>> response_locations(std::span<const Session> sessions) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t s = 0; s < sessions.size(); ++s) {
        std::optional<long long> group;
        bool open = false;
        for (std::size_t t = 0; t < sessions[s].trials.size(); ++t) {
            const Trial& trial = sessions[s].trials[t];
            if (trial.instructed) continue;
            const bool continues = open && trial.response_group && group && *trial.response_group == *group;
            if (!continues) out.emplace_back(s, t);
            group = trial.response_group;
            open = true;
        }
    }
    return out;
}

inline std::string cue_string(const std::vector<double>& v) {
    std::string out;
    for (double x : v) out += x == 0.0 ? '0' : '1';
    return out;
}

/// Regret report rows with the cue vectors and the response behind each item.
inline void write_regret_csv(std::ostream& os, std::span<const RegretItem> items, std::span<const Session> sessions) {
    const auto where = response_locations(sessions);
    os << "rank,response_index,participant,trial,cues_A,cues_B,chosen,reference_loglik,candidate_loglik,regret\n";
    for (std::size_t r = 0; r < items.size(); ++r) {
        const auto& it = items[r];
        os << r + 1 << ',' << it.index << ',';
        if (it.index < where.size()) {
            const auto [s, t] = where[it.index];
            const Trial& trial = sessions[s].trials[t];
            os << sessions[s].participant_id << ',' << trial.index << ',';
            for (std::size_t o = 0; o < 2; ++o) {
                const std::string key = o < trial.choice_set.size() ? "cues:" + trial.choice_set[o] : "";
                os << (trial.has(key) ? cue_string(trial.vector(key)) : "") << ',';
            }
            os << trial.chosen << ',';
        } else {
            os << ",,,,,";
        }
        os << evaluation::format_real(it.reference_loglik) << ',' << evaluation::format_real(it.candidate_loglik)
           << ',' << evaluation::format_real(it.regret) << '\n';
    }
}

}  // namespace cogfit::discovery
