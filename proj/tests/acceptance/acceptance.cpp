// Acceptance checks, one line per criterion. Exit status is nonzero if any
// required check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "cogfit/contamination/logprober.hpp"
#include "cogfit/corpus/split.hpp"
#include "cogfit/corpus/templates.hpp"
#include "cogfit/corpus/transcript.hpp"
#include "cogfit/discovery/srm.hpp"
#include "cogfit/evaluation/hicks.hpp"
#include "cogfit/fitting/fit.hpp"
#include "cogfit/registry.hpp"
#include "cogfit/tasks/simulate.hpp"

using namespace cogfit;
using corpus::Session;
using corpus::Trial;
using models::ParamVector;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double v, int precision = 4) {
    std::ostringstream os;
    os.precision(precision);
    os << v;
    return os.str();
}

// ---- random sessions for every model tag ------------------------------------

std::vector<Session> simulated(const std::string& spec, std::size_t n, std::uint64_t seed) {
    return tasks::simulate_sessions(*find_model("uniform"), {}, tasks::parse_task_spec(spec), n, seed);
}

Trial blank(std::size_t index, std::vector<std::string> options, SplitMix64& rng) {
    Trial t;
    t.index = index;
    t.chosen = options[rng.below(options.size())];
    t.choice_set = std::move(options);
    return t;
}

Session wrap(std::vector<Trial> trials, const std::string& experiment) {
    Session s;
    s.experiment_id = experiment;
    s.participant_id = "r";
    s.trials = std::move(trials);
    return s;
}

Session random_session(const std::string& tag, SplitMix64& rng) {
    const std::uint64_t seed = rng.next_u64();
    const std::size_t n = 4 + rng.below(5);
    std::vector<Trial> trials;
    if (tag == "gcm") {
        for (std::size_t i = 0; i < n; ++i) {
            Trial t = blank(i, {"A", "B"}, rng);
            t.stimulus["features"] = std::vector<double>{rng.normal(), rng.normal()};
            t.stimulus["label"] = std::string(rng.below(2) ? "A" : "B");
            trials.push_back(t);
        }
        return wrap(trials, "categories");
    }
    if (tag == "prospect") {
        for (std::size_t i = 0; i < n; ++i) {
            Trial t = blank(i, {"A", "B", "C"}, rng);
            for (const auto& o : t.choice_set) {
                corpus::Lottery l;
                const std::size_t k = 1 + rng.below(3);
                double total = 0;
                for (std::size_t j = 0; j < k; ++j) {
                    l.outcomes.push_back(std::round(rng.normal() * 20));
                    l.probs.push_back(rng.uniform() + 0.05);
                    total += l.probs.back();
                }
                for (double& p : l.probs) p /= total;
                t.stimulus["lottery:" + o] = l;
            }
            trials.push_back(t);
        }
        return wrap(trials, "choices13k");
    }
    if (tag == "delta_rule_judgment" || tag == "delta_rule_accept") {
        const bool accept = tag == "delta_rule_accept";
        for (std::size_t i = 0; i < n; ++i) {
            Trial t = blank(i, accept ? std::vector<std::string>{"accept", "reject"}
                                      : std::vector<std::string>{"1", "2", "3", "4", "5"},
                            rng);
            t.stimulus["features"] = std::vector<double>{rng.normal(), rng.normal(), 1.0};
            if (accept) t.stimulus["accept"] = std::string("accept");
            t.feedback = rng.normal() * 3;
            trials.push_back(t);
        }
        return wrap(trials, "learning");
    }
    if (tag == "odd_one_out") {
        const std::vector<std::string> objects{"o1", "o2", "o3", "o4", "o5", "o6"};
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<std::string> pool = objects;
            rng.shuffle(pool);
            trials.push_back(blank(i, {pool[0], pool[1], pool[2]}, rng));
        }
        return wrap(trials, "things");
    }
    if (tag == "durp") {
        for (std::size_t i = 0; i < n; ++i) {
            Trial t = blank(i, {"sample", "stop"}, rng);
            t.stimulus["x_win"] = std::vector<double>{std::round(rng.uniform() * 50)};
            t.stimulus["x_loss"] = std::vector<double>{-std::round(rng.uniform() * 50)};
            t.stimulus["p_win"] = std::vector<double>{rng.uniform()};
            t.stimulus["p_loss"] = std::vector<double>{rng.uniform()};
            trials.push_back(t);
        }
        return wrap(trials, "cards");
    }
    if (tag == "rational") {
        for (std::size_t i = 0; i < n; ++i) {
            Trial t = blank(i, {"0", "1", "2", "3"}, rng);
            t.stimulus["optimal"] = t.choice_set[rng.below(4)];
            trials.push_back(t);
        }
        return wrap(trials, "optimal");
    }
    if (tag == "hyperbolic") return simulated("kind = intertemporal\nn_trials = 6", 1, seed).front();
    if (tag == "dual_systems") return simulated("kind = two_step\nn_trials = 5", 1, seed).front();
    if (tag == "gp_ucb") return simulated("kind = spatial_bandit\nn_blocks = 2\nn_trials = 4", 1, seed).front();
    if (tag == "rescorla_wagner" || tag == "rescorla_wagner_context")
        return simulated("kind = horizon\nn_games = 2", 1, seed).front();
    if (tag == "lookup" || tag == "uniform") return simulated("kind = bandit\nn_arms = 3\nn_trials = 6", 1, seed).front();
    // strategies
    return simulated("kind = multi_attribute\nn_trials = 6", 1, seed).front();
}

ParamVector random_params(const models::Model& model, std::span<const Session> sessions, SplitMix64& rng,
                          double scale) {
    ParamVector p(model.parameter_names(sessions));
    for (double& v : p.values()) v = rng.normal() * scale;
    return p;
}

// ---- criteria --------------------------------------------------------------

Outcome normalization() {
    SplitMix64 rng(101);
    std::size_t draws = 0, bad = 0;
    std::string first_bad;
    for (const auto& tag : model_tags()) {
        const auto model = find_model(tag);
        for (int d = 0; d < 1000; ++d) {
            const Session s = random_session(tag, rng);
            const auto p = random_params(*model, std::span(&s, 1), rng, 2.0);
            fitting::detail::walk(*model, p, s, [&](models::Agent&, const Trial& t, std::span<const double> logits,
                                                    bool) {
                const auto dist = models::from_logits(t.choice_set, logits);
                double total = 0.0;
                bool ok = true;
                for (double q : dist.probs) {
                    ok = ok && q >= 0.0 && std::isfinite(q);
                    total += q;
                }
                if (!ok || std::abs(total - 1.0) > 1e-9) {
                    if (bad++ == 0) first_bad = tag;
                }
            });
            ++draws;
        }
    }
    return {bad == 0, std::to_string(draws) + " draws over " + std::to_string(model_tags().size()) + " tags, " +
                          std::to_string(bad) + " bad distributions" + (bad ? " (first: " + first_bad + ")" : "")};
}

Outcome uniform_baseline() {
    double worst = 0.0;
    for (std::size_t k : {2u, 3u, 4u}) {
        std::vector<Session> sessions;
        SplitMix64 rng(k);
        for (int s = 0; s < 5; ++s) {
            std::vector<Trial> trials;
            for (std::size_t i = 0; i < 20; ++i) {
                std::vector<std::string> options;
                for (std::size_t o = 0; o < k; ++o) options.push_back(std::string(1, char('A' + o)));
                trials.push_back(blank(i, options, rng));
            }
            sessions.push_back(wrap(trials, "k" + std::to_string(k)));
        }
        const double nll = fitting::mean_nll(*find_model("uniform"), {}, sessions);
        worst = std::max(worst, std::abs(nll - std::log(double(k))));
    }
    return {worst <= 1e-12, "max |mean_nll - ln K| = " + num(worst, 3)};
}

Outcome gradient_suite() {
    SplitMix64 rng(202);
    double worst = 0.0;
    std::string worst_tag;
    std::size_t models_checked = 0;
    for (const auto& tag : model_tags()) {
        const auto model = find_model(tag);
        if (!model->has_analytic_gradient()) continue;
        ++models_checked;
        for (int point = 0; point < 20; ++point) {
            std::vector<Session> sessions;
            for (int s = 0; s < 3; ++s) sessions.push_back(random_session(tag, rng));
            if (tag == "lookup") {
                // lookup rows follow trial indices; keep all sessions the same length
                sessions = simulated("kind = bandit\nn_arms = 3\nn_trials = 6", 3, rng.next_u64());
            }
            for (std::size_t i = 0; i < sessions.size(); ++i) sessions[i].participant_id = "r" + std::to_string(i);
            const auto p = random_params(*model, sessions, rng, 1.0);
            fitting::FitConfig analytic, fd;
            fd.gradient_mode = fitting::GradientMode::finite_difference;
            const auto ga = fitting::nll_gradient(*model, p, sessions, analytic);
            const auto gf = fitting::nll_gradient(*model, p, sessions, fd);
            const double err = fitting::max_relative_error(ga, gf);
            if (err > worst) {
                worst = err;
                worst_tag = tag;
            }
        }
    }
    return {worst <= 1e-4, std::to_string(models_checked) + " models x 20 points, max relative error " +
                               num(worst, 3) + (worst_tag.empty() ? "" : " (" + worst_tag + ")")};
}

struct RecoveryCase {
    std::string tag, spec;
    ParamVector truth;
};

Outcome parameter_recovery() {
    const std::vector<RecoveryCase> cases{
        {"rescorla_wagner", "kind = bandit\nn_trials = 60",
         {{"alpha_pos", 0.5}, {"alpha_neg", -0.5}, {"a", 2.0}, {"b", 0.5}, {"c", 0.0}, {"d", 0.0}}},
        {"hyperbolic", "kind = intertemporal\nn_trials = 40", {{"beta", 1.0}, {"a", std::log(0.1)}}},
        {"wadd", "kind = multi_attribute\nn_trials = 40", {{"beta", 2.0}}},
        {"srm_mixture", "kind = multi_attribute\nn_trials = 40", {{"beta", 3.0}, {"sigma", 1.0}}},
        {"gp_ucb", "kind = spatial_bandit\nn_blocks = 2\nn_trials = 10",
         {{"beta", 2.0}, {"gamma", -0.5}, {"length_scale", 0.5}, {"noise", -1.0}}}};
    bool all = true;
    std::string detail;
    for (const auto& c : cases) {
        const auto model = find_model(c.tag);
        const auto sessions = tasks::simulate_sessions(*model, c.truth, tasks::parse_task_spec(c.spec), 250, 303);
        const auto split = corpus::split_participants(sessions, 0.2, 304);
        const auto fit = fitting::fit(*model, split.train, fitting::FitConfig{});
        const double fitted = fitting::mean_nll(*model, fit.params, split.test);
        const double generator = fitting::mean_nll(*model, c.truth, split.test);
        const bool ok = std::abs(fitted - generator) <= 0.01;
        all = all && ok;
        detail += (detail.empty() ? "" : "; ") + c.tag + " " + num(fitted) + " vs " + num(generator) +
                  (ok ? "" : " FAIL");
    }
    return {all, "held-out NLL fitted vs generating: " + detail};
}

Outcome srm_selection() {
    const auto spec = tasks::parse_task_spec("kind = multi_attribute\nn_trials = 100");
    int srm_wins = 0, ew_ok = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const discovery::Strategy srm(discovery::StrategyKind::srm_mixture), ew(discovery::StrategyKind::ew);
        const auto mixed = tasks::simulate_sessions(srm, {{"beta", 4.0}, {"sigma", 1.0}}, spec, 8, 400 + seed);
        const auto cmp = discovery::compare_strategies(mixed, fitting::FitConfig{});
        srm_wins += cmp.best() == discovery::StrategyKind::srm_mixture;

        const auto pure = tasks::simulate_sessions(ew, {{"beta", 2.0}}, spec, 8, 500 + seed);
        const std::array<discovery::StrategyKind, 2> pair{discovery::StrategyKind::ew,
                                                          discovery::StrategyKind::srm_mixture};
        const auto cmp_ew = discovery::compare_strategies(pure, fitting::FitConfig{}, pair);
        ew_ok += cmp_ew.summed(discovery::StrategyKind::ew) <= cmp_ew.summed(discovery::StrategyKind::srm_mixture) + 2;
    }
    return {srm_wins >= 18 && ew_ok >= 18, "srm_mixture lowest AIC in " + std::to_string(srm_wins) +
                                               "/20, ew within 2 of srm on EW data in " + std::to_string(ew_ok) +
                                               "/20"};
}

Outcome regret_example() {
    // data from a TTB-leaning mixture; the probe trial has fewer positive ratings on A
    const auto spec = tasks::parse_task_spec("kind = multi_attribute\nn_trials = 100");
    const discovery::Strategy srm(discovery::StrategyKind::srm_mixture),
        deepseek(discovery::StrategyKind::deepseek_two_regime);
    const auto sessions = tasks::simulate_sessions(srm, {{"beta", 4.0}, {"sigma", 3.0}}, spec, 20, 600);
    const auto srm_fit = fitting::fit(srm, sessions);
    const auto ds_fit = fitting::fit(deepseek, sessions);
    const discovery::Cues a{1, 0, 0, 1}, b{0, 1, 1, 1};
    const double p_ds = discovery::strategy_probs(deepseek.kind(), ds_fit.params, a, b).prob("A");
    const double p_srm = discovery::strategy_probs(srm.kind(), srm_fit.params, a, b).prob("A");
    const double sigma = sigmoid(srm_fit.params["sigma"]);
    return {p_ds < 0.5 && p_srm > 0.5, "p(A) deepseek_two_regime " + num(p_ds) + ", srm_mixture " + num(p_srm) +
                                           " (TTB weight " + num(sigma, 3) + ")"};
}

Outcome logprober_recovery() {
    bool all = true;
    std::string detail;
    for (double lb : {-1.0, 0.0, 0.5, 1.5, 2.0}) {
        contamination::CumulativeCurve c;
        for (int x = 1; x <= 50; ++x) c.values.push_back(contamination::logprober_curve(40.0, std::exp(lb), x));
        const auto fit = contamination::fit_exponential(c, 1.0);
        const bool ok = std::abs(fit.log_b() - lb) <= 0.05 && fit.flagged == (lb >= 1.0);
        all = all && ok;
        detail += (detail.empty() ? "" : ", ") + num(lb) + "->" + num(fit.log_b()) + (fit.flagged ? "*" : "");
    }
    return {all, "log B true->fitted (* flagged): " + detail};
}

Outcome codec_round_trip() {
    const std::vector<std::pair<std::string, std::string>> tasks_and_models{
        {"kind = horizon\nn_games = 4", "rescorla_wagner"},
        {"kind = two_step\nn_trials = 20", "dual_systems"},
        {"kind = multi_attribute\nn_trials = 20", "srm_mixture"}};
    std::size_t sessions = 0, mismatches = 0, tokens = 0;
    for (std::size_t k = 0; k < tasks_and_models.size(); ++k) {
        const auto& [spec, tag] = tasks_and_models[k];
        const auto model = find_model(tag);
        const std::size_t n = k == 0 ? 334 : 333;
        ParamVector p(model->parameter_names({}));
        for (double& v : p.values()) v = 0.5;
        for (const auto& s : tasks::simulate_sessions(*model, p, tasks::parse_task_spec(spec), n, 700 + k)) {
            std::vector<std::string> chosen;
            for (const auto& t : s.trials)
                if (!t.instructed) chosen.push_back(t.chosen);
            const auto parsed =
                corpus::parse_transcript(corpus::render_transcript(s, corpus::default_template(s.experiment_id)));
            mismatches += parsed.tokens() != chosen;
            tokens += chosen.size();
            ++sessions;
        }
    }
    return {sessions == 1000 && mismatches == 0, std::to_string(sessions) + " sessions, " + std::to_string(tokens) +
                                                     " choice tokens, " + std::to_string(mismatches) +
                                                     " mismatched sessions"};
}

std::vector<evaluation::HickPoint> hick_data(double slope, double noise_fraction, std::uint64_t seed) {
    SplitMix64 rng(seed);
    std::vector<evaluation::HickPoint> pts;
    for (int p = 0; p < 20; ++p) {
        const double intercept = 300.0 + 20.0 * rng.normal();
        for (int t = 0; t < 50; ++t) {
            // entropy of a random 4-way choice distribution
            std::vector<double> logits{rng.normal() * 2, rng.normal() * 2, rng.normal() * 2, rng.normal() * 2};
            const double h =
                evaluation::response_entropy(models::from_logits({"a", "b", "c", "d"}, logits));
            pts.push_back({h, intercept + slope * h, "p" + std::to_string(p)});
        }
    }
    if (noise_fraction > 0.0) {
        double lo = pts.front().rt_ms, hi = lo;
        for (const auto& pt : pts) {
            lo = std::min(lo, pt.rt_ms);
            hi = std::max(hi, pt.rt_ms);
        }
        for (auto& pt : pts) pt.rt_ms += rng.normal() * noise_fraction * (hi - lo);
    }
    return pts;
}

Outcome hick_regression() {
    const double b = 200.0;
    const auto exact = evaluation::hicks_fit(hick_data(b, 0.0, 800));
    const bool noiseless = std::abs(exact.slope - b) <= 1e-3 * b && std::abs(exact.r_squared - 1.0) <= 1e-9;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto fit = evaluation::hicks_fit(hick_data(b, 0.10, 900 + seed));
        worst = std::max(worst, std::abs(fit.slope - b) / b);
    }
    return {noiseless && worst <= 0.05, "noiseless slope " + num(exact.slope, 8) + " R^2 " +
                                            num(exact.r_squared, 12) + "; noisy worst relative slope error " +
                                            num(100 * worst, 3) + "% over 10 seeds"};
}

}  // namespace

int main() {
    struct Criterion {
        std::string name;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {"normalization suite", normalization},
        {"uniform baseline", uniform_baseline},
        {"gradient suite", gradient_suite},
        {"parameter recovery", parameter_recovery},
        {"srm model selection", srm_selection},
        {"regret example fidelity", regret_example},
        {"logprober recovery", logprober_recovery},
        {"codec round trip", codec_round_trip},
        {"hick regression", hick_regression},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << c.name << ": " << o.detail << " (" << num(secs, 3) << " s)"
                  << std::endl;
        failed += !o.pass;
    }
    std::cout << "[NOT RUN] table reproduction on Psych-101: needs the external dataset, not bundled" << std::endl;
    std::cout << (failed ? std::to_string(failed) + " criteria failed" : "all criteria passed") << std::endl;
    return failed ? 1 : 0;
}
