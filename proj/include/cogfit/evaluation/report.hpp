#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cogfit/fitting/fit.hpp"
#include "cogfit/fitting/objective.hpp"
#include "cogfit/models/choice.hpp"

namespace cogfit::evaluation {

using models::Model;
using models::ParamVector;
using models::Session;

struct EvalReport {
    std::string experiment_id;
    std::string model_tag;
    double mean_nll = 0.0;
    double sem_nll = 0.0;
    std::size_t n_responses = 0;
    std::optional<double> aic;
};

/// Mean and standard error (sample sd / sqrt(n)) of per-response values.
inline std::pair<double, double> mean_and_sem(std::span<const double> values) {
    const double mean = fitting::mean_of(values);
    const std::size_t n = values.size();
    if (n < 2) return {mean, 0.0};
    CompensatedSum ss;
    for (double v : values) ss.add((v - mean) * (v - mean));
    const double sd = std::sqrt(ss.value() / static_cast<double>(n - 1));
    return {mean, sd / std::sqrt(static_cast<double>(n))};
}

inline EvalReport make_report(std::string experiment_id, std::string model_tag, std::span<const double> nlls,
                              std::size_t n_params) {
    if (nlls.empty()) fail(ErrorKind::empty_input, "no test responses");
    EvalReport r;
    r.experiment_id = std::move(experiment_id);
    r.model_tag = std::move(model_tag);
    std::tie(r.mean_nll, r.sem_nll) = mean_and_sem(nlls);
    r.n_responses = nlls.size();
    r.aic = fitting::aic(-compensated_sum(nlls), n_params);
    return r;
}

/// Held-out evaluation over all test sessions. The mean goes through the same
/// code path as fitting::mean_nll, so the two agree exactly.
inline EvalReport evaluate(const Model& model, const ParamVector& params, std::span<const Session> test,
                           unsigned workers = 1) {
    if (test.empty()) fail(ErrorKind::empty_input, "empty test set");
    std::string experiment = test.front().experiment_id;
    for (const auto& s : test)
        if (s.experiment_id != experiment) {
            experiment = "*";
            break;
        }
    const auto nlls = fitting::response_nlls(model, params, test, workers);
    return make_report(experiment, std::string(model.tag()), nlls, params.size());
}

/// One report per experiment id, in id order.
inline std::vector<EvalReport> evaluate_by_experiment(const Model& model, const ParamVector& params,
                                                      std::span<const Session> test, unsigned workers = 1) {
    if (test.empty()) fail(ErrorKind::empty_input, "empty test set");
    std::map<std::string, std::vector<Session>> groups;
    for (const auto& s : test) groups[s.experiment_id].push_back(s);
    std::vector<EvalReport> out;
    for (const auto& [id, sessions] : groups) out.push_back(evaluate(model, params, sessions, workers));
    return out;
}

inline nlohmann::json to_json(const EvalReport& r) {
    nlohmann::json j{{"experiment_id", r.experiment_id}, {"model_tag", r.model_tag},
                     {"mean_nll", r.mean_nll},           {"sem_nll", r.sem_nll},
                     {"n_responses", r.n_responses}};
    j["aic"] = r.aic ? nlohmann::json(*r.aic) : nlohmann::json(nullptr);
    return j;
}

inline std::string format_real(double v) {
    if (std::isnan(v)) return "nan";
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

inline void write_reports_csv(std::ostream& os, std::span<const EvalReport> reports) {
    os << "experiment_id,model_tag,mean_nll,sem_nll,n_responses,aic\n";
    for (const auto& r : reports)
        os << r.experiment_id << ',' << r.model_tag << ',' << format_real(r.mean_nll) << ','
           << format_real(r.sem_nll) << ',' << r.n_responses << ',' << (r.aic ? format_real(*r.aic) : "") << '\n';
}

/// Experiments x models grid of mean NLLs with the per-row minimum marked.
struct ComparisonTable {
    std::vector<std::string> experiments;
    std::vector<std::string> models;
    std::map<std::pair<std::string, std::string>, double> cells;

    std::optional<double> cell(const std::string& experiment, const std::string& model) const {
        const auto it = cells.find({experiment, model});
        if (it == cells.end()) return std::nullopt;
        return it->second;
    }

    /// Models attaining the row minimum; several on exact ties.
    std::vector<std::string> best(const std::string& experiment) const {
        std::optional<double> lo;
        for (const auto& m : models)
            if (auto v = cell(experiment, m); v && (!lo || *v < *lo)) lo = v;
        std::vector<std::string> out;
        for (const auto& m : models)
            if (auto v = cell(experiment, m); v && lo && *v == *lo) out.push_back(m);
        return out;
    }
};

/// Rows and columns keep first-appearance order; a later report for the same
/// cell replaces the earlier one.
inline ComparisonTable comparison_table(std::span<const EvalReport> reports) {
    ComparisonTable t;
    for (const auto& r : reports) {
        if (std::find(t.experiments.begin(), t.experiments.end(), r.experiment_id) == t.experiments.end())
            t.experiments.push_back(r.experiment_id);
        if (std::find(t.models.begin(), t.models.end(), r.model_tag) == t.models.end())
            t.models.push_back(r.model_tag);
        t.cells[{r.experiment_id, r.model_tag}] = r.mean_nll;
    }
    return t;
}

/// CSV with one column per model, "nan" for missing cells and a final column
/// naming the best model(s), joined by '|'.
inline void write_table_csv(std::ostream& os, const ComparisonTable& t) {
    os << "experiment";
    for (const auto& m : t.models) os << ',' << m;
    os << ",best\n";
    for (const auto& e : t.experiments) {
        os << e;
        for (const auto& m : t.models) {
            const auto v = t.cell(e, m);
            os << ',' << (v ? format_real(*v) : "nan");
        }
        std::string best;
        for (const auto& b : t.best(e)) best += (best.empty() ? "" : "|") + b;
        os << ',' << best << '\n';
    }
}

inline void write_table_jsonl(std::ostream& os, const ComparisonTable& t) {
    for (const auto& e : t.experiments) {
        nlohmann::json row{{"experiment", e}, {"best", t.best(e)}};
        nlohmann::json cells = nlohmann::json::object();
        for (const auto& m : t.models) {
            const auto v = t.cell(e, m);
            cells[m] = v ? nlohmann::json(*v) : nlohmann::json(nullptr);
        }
        row["nll"] = std::move(cells);
        os << row.dump() << '\n';
    }
}

/// Shannon entropy in nats.
inline double response_entropy(const models::ChoiceDistribution& dist) {
    require(dist.valid(), ErrorKind::precondition, "invalid choice distribution");
    CompensatedSum h;
    for (double p : dist.probs)
        if (p > 0.0) h.add(-p * std::log(p));
    return std::max(0.0, h.value());
}

}  // namespace cogfit::evaluation
