#pragma once

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cogfit/contamination/logprober.hpp"
#include "cogfit/corpus/session_io.hpp"
#include "cogfit/corpus/split.hpp"
#include "cogfit/corpus/templates.hpp"
#include "cogfit/corpus/transcript.hpp"
#include "cogfit/discovery/srm.hpp"
#include "cogfit/evaluation/report.hpp"
#include "cogfit/fitting/fit.hpp"
#include "cogfit/registry.hpp"
#include "cogfit/tasks/simulate.hpp"

namespace cogfit::cli {

namespace fs = std::filesystem;

/// Writes `content` to a sibling temp file and renames it over `path`, so a
/// failed command never leaves a partial output behind.
inline void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) fail(ErrorKind::io, "cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) {
            out.close();
            fs::remove(tmp);
            fail(ErrorKind::io, "write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        fail(ErrorKind::io, "cannot move output into place at '" + path.string() + "': " + ec.message());
    }
}

inline std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(ErrorKind::io, "cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Usage problems detected after flag parsing (exit status 2).
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline std::unique_ptr<models::Model> model_or_usage(const std::string& tag) {
    try {
        return find_model(tag);
    } catch (const Error& e) {
        throw UsageError(e.what());
    }
}

inline std::string join(const std::vector<std::string>& items, const std::string& sep = ", ") {
    std::string out;
    for (const auto& i : items) out += (out.empty() ? "" : sep) + i;
    return out;
}

struct Shared {
    std::optional<std::uint64_t> seed;
    unsigned workers = 1;
    int epochs = 1000;
    double learning_rate = 0.1;
    std::string gradient_mode = "analytic";
    double fd_epsilon = 1e-5;
    bool polyak = false;

    fitting::FitConfig fit_config() const {
        fitting::FitConfig c;
        c.epochs = epochs;
        c.learning_rate = learning_rate;
        c.gradient_mode = gradient_mode == "fd" ? fitting::GradientMode::finite_difference
                                                : fitting::GradientMode::analytic_if_available;
        c.fd_epsilon = fd_epsilon;
        c.seed = seed.value_or(0);
        c.polyak = polyak;
        c.workers = std::max(1u, workers);
        return c;
    }

    std::uint64_t require_seed(const std::string& why) const {
        if (!seed) throw UsageError("--seed is required " + why);
        return *seed;
    }
};

inline std::string fmt(double v) { return evaluation::format_real(v); }

// ---- fit -------------------------------------------------------------------

struct FitArgs {
    std::string model, data, out, mode = "joint";
    std::optional<double> holdout;
};

inline int cmd_fit(const FitArgs& a, const Shared& sh) {
    const auto model = model_or_usage(a.model);
    if (a.model == "odd_one_out") sh.require_seed("for odd_one_out (random initialisation)");
    auto cfg = sh.fit_config();
    auto sessions = corpus::load_sessions(a.data);
    std::vector<corpus::Session> train = sessions, test;
    if (a.holdout) {
        auto split = corpus::split_participants(sessions, *a.holdout, sh.require_seed("with --holdout"));
        train = std::move(split.train);
        test = std::move(split.test);
    }
    std::string body;
    std::ostringstream summary;
    if (a.mode == "per_participant") {
        const auto fits = fitting::fit_per_participant(*model, train, cfg);
        std::size_t responses = 0;
        CompensatedSum nll;
        for (const auto& [id, r] : fits) {
            auto j = fitting::to_json(r);
            j["participant"] = id;
            body += j.dump() + "\n";
            responses += r.responses_counted;
            nll.add(r.final_nll_per_response * static_cast<double>(r.responses_counted));
        }
        summary << "fit model=" << a.model << " mode=per_participant participants=" << fits.size()
                << " n_responses=" << responses << " train_nll=" << fmt(nll.value() / static_cast<double>(responses));
    } else {
        const auto r = fitting::fit(*model, train, cfg);
        auto j = fitting::to_json(r);
        summary << "fit model=" << a.model << " n_responses=" << r.responses_counted
                << " train_nll=" << fmt(r.final_nll_per_response);
        if (!test.empty()) {
            const auto rep = evaluation::evaluate(*model, r.params, test, cfg.workers);
            j["holdout"] = evaluation::to_json(rep);
            std::vector<std::string> ids;
            for (const auto& id : corpus::participants(test)) ids.push_back(id);
            j["holdout"]["participants"] = ids;
            summary << " test_nll=" << fmt(rep.mean_nll) << " test_responses=" << rep.n_responses;
        }
        body = j.dump() + "\n";
    }
    write_atomic(a.out, body);
    std::cout << summary.str() << "\n";
    return 0;
}

// ---- eval ------------------------------------------------------------------

struct EvalArgs {
    std::string model, params, data, out, format = "csv";
    bool by_experiment = false;
};

inline int cmd_eval(const EvalArgs& a, const Shared& sh) {
    const auto model = model_or_usage(a.model);
    const std::string text = read_file(a.params);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text.substr(0, text.find('\n')));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::io, std::string("cannot parse parameter file: ") + e.what());
    }
    const auto fitted = fitting::fit_result_from_json(j);
    if (fitted.model_tag != a.model)
        std::cerr << "warning: parameters were fitted for model '" << fitted.model_tag << "'\n";
    const auto sessions = corpus::load_sessions(a.data);
    const auto ids = corpus::participants(sessions);
    std::vector<std::string> overlap;
    for (const auto& id : fitted.participants)
        if (ids.contains(id)) overlap.push_back(id);
    if (!overlap.empty())
        std::cerr << "warning: " << overlap.size()
                  << " evaluated participant(s) were also in the fitting set: " << join(overlap) << "\n";

    // parameters missing from the file (e.g. new objects) keep their initial values
    auto params = model->initial_params(sessions, sh.seed.value_or(0));
    params.assign_from(fitted.params);
    const unsigned workers = std::max(1u, sh.workers);
    std::vector<evaluation::EvalReport> reports =
        a.by_experiment ? evaluation::evaluate_by_experiment(*model, params, sessions, workers)
                        : std::vector<evaluation::EvalReport>{evaluation::evaluate(*model, params, sessions, workers)};
    std::ostringstream os;
    if (a.format == "jsonl")
        for (const auto& r : reports) os << evaluation::to_json(r).dump() << "\n";
    else
        evaluation::write_reports_csv(os, reports);
    write_atomic(a.out, os.str());
    std::size_t n = 0;
    for (const auto& r : reports) n += r.n_responses;
    std::cout << "eval model=" << a.model << " n_responses=" << n << " mean_nll=" << fmt(reports.front().mean_nll)
              << " sem=" << fmt(reports.front().sem_nll) << "\n";
    return 0;
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
    std::string task, model, out;
    std::optional<std::string> params_file, transcripts;
    std::vector<std::string> param_overrides;
    std::size_t n_sessions = 1;
};

inline int cmd_simulate(const SimulateArgs& a, const Shared& sh) {
    const std::uint64_t seed = sh.require_seed("for simulate");
    const auto model = model_or_usage(a.model);
    const auto spec = tasks::load_task_spec(a.task);
    tasks::check_compatible(*model, spec.kind);

    // layout from one probe session so data-sized models get their names
    const auto probe_env = tasks::make_environment(spec, seed);
    corpus::Session probe;
    probe.experiment_id = std::string(tasks::to_string(spec.kind));
    while (!probe_env->done()) {
        auto t = probe_env->next();
        t.index = probe.trials.size();
        if (t.chosen.empty()) t.chosen = t.choice_set.front();
        probe_env->resolve(t);
        probe.trials.push_back(std::move(t));
    }
    auto params = model->initial_params(std::span<const corpus::Session>(&probe, 1), seed);
    if (a.params_file) {
        const std::string text = read_file(*a.params_file);
        params.assign_from(fitting::fit_result_from_json(nlohmann::json::parse(text.substr(0, text.find('\n')))).params);
    }
    for (const auto& kv : a.param_overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) throw UsageError("--param expects name=value, got '" + kv + "'");
        const std::string name = kv.substr(0, eq);
        if (!params.find(name))
            throw UsageError("model '" + a.model + "' has no parameter '" + name +
                             "'; parameters: " + join(params.names()));
        try {
            params.set(name, std::stod(kv.substr(eq + 1)));
        } catch (const std::logic_error&) {
            throw UsageError("--param value for '" + name + "' is not a number");
        }
    }

    const auto sessions = tasks::simulate_sessions(*model, params, spec, a.n_sessions, seed, std::max(1u, sh.workers));
    std::string transcripts;
    const std::string tmpl = corpus::default_template(sessions.front().experiment_id);
    if (a.transcripts) {
        if (tmpl.empty())
            fail(ErrorKind::unknown_template,
                 "no transcript template for experiment '" + sessions.front().experiment_id + "'");
        for (const auto& s : sessions)
            transcripts += nlohmann::json{{"experiment_id", s.experiment_id},
                                          {"participant_id", s.participant_id},
                                          {"template", tmpl},
                                          {"text", corpus::render_transcript(s, tmpl)}}
                               .dump() +
                           "\n";
    }
    write_atomic(a.out, corpus::dump_sessions(sessions));
    if (a.transcripts) write_atomic(*a.transcripts, transcripts);
    std::size_t responses = 0;
    for (const auto& s : sessions) responses += s.response_count();
    std::cout << "simulate task=" << tasks::to_string(spec.kind) << " model=" << a.model
              << " sessions=" << sessions.size() << " n_responses=" << responses << "\n";
    return 0;
}

// ---- srm -------------------------------------------------------------------

struct SrmArgs {
    std::string data, out, regret_out, candidate = "deepseek_two_regime";
    std::optional<std::string> reference;
    std::size_t k = discovery::kDefaultInspectionBudget;
};

inline int cmd_srm(const SrmArgs& a, const Shared& sh) {
    const auto kind = discovery::strategy_from_string(a.candidate);
    if (!kind) {
        std::vector<std::string> tags;
        for (auto s : discovery::kAllStrategies) tags.emplace_back(discovery::to_string(s));
        throw UsageError("unknown strategy '" + a.candidate + "'; valid: " + join(tags));
    }
    const auto cfg = sh.fit_config();
    const auto sessions = corpus::load_sessions(a.data);
    const auto cmp = discovery::compare_strategies(sessions, cfg);

    // candidate log-likelihoods under per-participant parameters, in session order
    const discovery::Strategy candidate(*kind);
    std::size_t column = 0;
    while (cmp.strategies[column] != *kind) ++column;
    std::vector<double> cand;
    for (const auto& s : sessions) {
        const auto& params = cmp.fits.at(s.participant_id)[column].params;
        const auto ll = fitting::response_logliks(candidate, params, s);
        cand.insert(cand.end(), ll.begin(), ll.end());
    }
    const auto ref = a.reference ? discovery::load_reference_logliks(*a.reference)
                                 : discovery::pooled_srm_reference(sessions, cfg);
    const auto items = discovery::regret_rank(ref, cand, std::min(a.k, cand.size()));

    std::ostringstream table, regret;
    discovery::write_comparison_csv(table, cmp);
    discovery::write_regret_csv(regret, items, sessions);
    write_atomic(a.out, table.str());
    write_atomic(a.regret_out, regret.str());
    std::cout << "srm participants=" << cmp.fits.size() << " n_responses=" << cand.size()
              << " best=" << discovery::to_string(cmp.best()) << " aic=" << fmt(cmp.summed(cmp.best())) << "\n";
    return 0;
}

// ---- logprober -------------------------------------------------------------

struct LogproberArgs {
    std::string in, out;
    double threshold = 1.0;
};

inline int cmd_logprober(const LogproberArgs& a, const Shared& sh) {
    std::istringstream in(read_file(a.in));
    std::vector<std::string> ids;
    std::vector<std::vector<double>> rows;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (tasks::trim(line).empty()) continue;
        std::stringstream ss(line);
        std::string id, field;
        std::getline(ss, id, ',');
        std::vector<double> values;
        bool numeric = true;
        while (std::getline(ss, field, ',')) {
            if (tasks::trim(field).empty()) continue;
            try {
                std::size_t used = 0;
                const std::string f = tasks::trim(field);
                values.push_back(std::stod(f, &used));
                numeric = numeric && used == f.size();
            } catch (const std::logic_error&) {
                numeric = false;
            }
        }
        if (!numeric) {
            if (n == 1 && rows.empty()) continue;  // header
            fail(ErrorKind::io, "line " + std::to_string(n) + ": non-numeric log-likelihood");
        }
        ids.push_back(tasks::trim(id));
        rows.push_back(std::move(values));
    }
    if (rows.empty()) fail(ErrorKind::empty_input, "no sequences in '" + a.in + "'");
    std::vector<contamination::LogProberFit> fits(rows.size());
    std::vector<std::string> errors(rows.size());
    parallel_for(rows.size(), std::max(1u, sh.workers), [&](std::size_t i) {
        try {
            fits[i] = contamination::probe(rows[i], a.threshold);
        } catch (const Error& e) {
            errors[i] = "sequence '" + ids[i] + "': " + e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) fail(ErrorKind::domain, e);
    std::ostringstream os;
    os << "id,A,log_B,residual,flagged\n";
    std::size_t flagged = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        os << ids[i] << ',' << fmt(fits[i].A) << ',' << fmt(fits[i].log_b()) << ',' << fmt(fits[i].residual) << ','
           << (fits[i].flagged ? "true" : "false") << '\n';
        flagged += fits[i].flagged;
    }
    write_atomic(a.out, os.str());
    std::cout << "logprober sequences=" << rows.size() << " flagged=" << flagged << "\n";
    return 0;
}

// ---- parse / render --------------------------------------------------------

struct ParseArgs {
    std::string in, out;
};

inline int cmd_parse(const ParseArgs& a) {
    const auto tr = corpus::parse_transcript(read_file(a.in));
    nlohmann::json spans = nlohmann::json::array();
    for (const auto& s : tr.choice_spans) spans.push_back({{"event", s.event}, {"token", s.token}});
    const nlohmann::json j{{"instruction", tr.instruction}, {"events", tr.events}, {"choice_spans", spans}};
    write_atomic(a.out, j.dump() + "\n");
    std::cout << "parse events=" << tr.events.size() << " n_responses=" << tr.choice_spans.size() << "\n";
    return 0;
}

struct RenderArgs {
    std::string data, out;
    std::optional<std::string> template_id;
};

inline int cmd_render(const RenderArgs& a) {
    const auto sessions = corpus::load_sessions(a.data);
    std::string body;
    std::size_t responses = 0;
    for (const auto& s : sessions) {
        const std::string tmpl = a.template_id.value_or(corpus::default_template(s.experiment_id));
        if (tmpl.empty())
            fail(ErrorKind::unknown_template, "no transcript template for experiment '" + s.experiment_id + "'");
        body += nlohmann::json{{"experiment_id", s.experiment_id},
                               {"participant_id", s.participant_id},
                               {"template", tmpl},
                               {"text", corpus::render_transcript(s, tmpl)}}
                    .dump() +
                "\n";
        responses += s.response_count();
    }
    write_atomic(a.out, body);
    std::cout << "render sessions=" << sessions.size() << " n_responses=" << responses << "\n";
    return 0;
}

// ---- entry point -----------------------------------------------------------

/// Parses argv and dispatches one command. Exit status: 0 success, 1 data or
/// numeric failure, 2 usage error.
inline int run(int argc, const char* const* argv) {
    CLI::App app{"Cognitive model fitting, evaluation and simulation toolkit", "cogfit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "key = value file; keys mirror the long flag names, flags win");
    app.allow_config_extras(CLI::config_extras_mode::error);

    Shared sh;
    app.add_option("--seed", sh.seed, "Seed for randomized steps");
    app.add_option("--workers", sh.workers, "Worker threads (results do not depend on this)")
        ->check(CLI::Range(1u, 1024u));
    app.add_option("--epochs", sh.epochs, "Optimizer epochs")->check(CLI::PositiveNumber);
    app.add_option("--learning-rate,--learning_rate,--lr", sh.learning_rate, "Adam step size")
        ->check(CLI::PositiveNumber);
    app.add_option("--gradient-mode,--gradient_mode", sh.gradient_mode, "analytic (when available) or fd")
        ->check(CLI::IsMember({"analytic", "fd"}));
    app.add_option("--fd-epsilon,--fd_epsilon", sh.fd_epsilon, "Central-difference step")->check(CLI::PositiveNumber);
    app.add_flag("--polyak", sh.polyak, "Report the average of the second-half iterates");

    FitArgs fa;
    auto* fit = app.add_subcommand("fit", "Maximum-likelihood fit of a model to sessions");
    fit->add_option("--model", fa.model, "Model tag")->required();
    fit->add_option("--data", fa.data, "Session file (JSONL)")->required()->check(CLI::ExistingFile);
    fit->add_option("--out", fa.out, "Fit result file (JSON line)")->required();
    fit->add_option("--mode", fa.mode, "joint or per_participant")->check(CLI::IsMember({"joint", "per_participant"}));
    fit->add_option("--holdout", fa.holdout, "Hold out this fraction of participants and report test NLL")
        ->check(CLI::Range(0.0, 1.0));

    EvalArgs ea;
    auto* eval = app.add_subcommand("eval", "Held-out NLL of fitted parameters");
    eval->add_option("--model", ea.model, "Model tag")->required();
    eval->add_option("--params", ea.params, "Fit result file")->required()->check(CLI::ExistingFile);
    eval->add_option("--data", ea.data, "Test sessions (JSONL)")->required()->check(CLI::ExistingFile);
    eval->add_option("--out", ea.out, "Report file")->required();
    eval->add_option("--format", ea.format, "csv or jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
    eval->add_flag("--by-experiment", ea.by_experiment, "One report per experiment id");

    SimulateArgs sa;
    auto* sim = app.add_subcommand("simulate", "Open-loop simulation of a model on a generated task");
    sim->add_option("--task", sa.task, "Task spec file (key = value)")->required()->check(CLI::ExistingFile);
    sim->add_option("--model", sa.model, "Model tag")->required();
    sim->add_option("--params", sa.params_file, "Fit result file supplying parameters")->check(CLI::ExistingFile);
    sim->add_option("--param", sa.param_overrides, "name=value raw parameter override (repeatable)");
    sim->add_option("--n-sessions,--n_sessions", sa.n_sessions, "Number of sessions")->check(CLI::PositiveNumber);
    sim->add_option("--out", sa.out, "Session file (JSONL)")->required();
    sim->add_option("--transcripts", sa.transcripts, "Also write rendered transcripts (JSONL)");

    SrmArgs ra;
    auto* srm = app.add_subcommand("srm", "Strategy comparison and regret ranking on multi-attribute data");
    srm->add_option("--data", ra.data, "Multi-attribute sessions (JSONL)")->required()->check(CLI::ExistingFile);
    srm->add_option("--reference", ra.reference, "Reference per-response log-likelihood CSV")
        ->check(CLI::ExistingFile);
    srm->add_option("--candidate", ra.candidate, "Strategy whose misses are ranked");
    srm->add_option("--k", ra.k, "Number of regret items to report");
    srm->add_option("--out", ra.out, "AIC table CSV")->required();
    srm->add_option("--regret-out,--regret_out", ra.regret_out, "Regret report CSV")->required();

    LogproberArgs la;
    auto* lp = app.add_subcommand("logprober", "Fit cumulative log-likelihood curves and flag memorization");
    lp->add_option("--in", la.in, "CSV: id, then per-token log-likelihoods")->required()->check(CLI::ExistingFile);
    lp->add_option("--out", la.out, "Result CSV")->required();
    lp->add_option("--threshold", la.threshold, "Flag when log B is at least this");

    ParseArgs pa;
    auto* parse = app.add_subcommand("parse", "Extract events and choice tokens from a transcript");
    parse->add_option("--in", pa.in, "Transcript text file")->required()->check(CLI::ExistingFile);
    parse->add_option("--out", pa.out, "JSON output")->required();

    RenderArgs na;
    auto* render = app.add_subcommand("render", "Render sessions as transcripts");
    render->add_option("--data", na.data, "Session file (JSONL)")->required()->check(CLI::ExistingFile);
    render->add_option("--template", na.template_id, "Template id (default: per experiment)");
    render->add_option("--out", na.out, "Transcript JSONL output")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*fit) return cmd_fit(fa, sh);
        if (*eval) return cmd_eval(ea, sh);
        if (*sim) return cmd_simulate(sa, sh);
        if (*srm) return cmd_srm(ra, sh);
        if (*lp) return cmd_logprober(la, sh);
        if (*parse) return cmd_parse(pa);
        if (*render) return cmd_render(na);
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}

}  // namespace cogfit::cli
