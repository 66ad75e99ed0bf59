#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "cogfit/fitting/objective.hpp"
#include "cogfit/registry.hpp"
#include "cogfit/tasks/simulate.hpp"

using namespace cogfit;
using namespace cogfit::tasks;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& err) {
        return err.kind();
    }
    ADD_FAILURE() << "no cogfit::Error thrown";
    return ErrorKind::invariant;
}

models::ParamVector rw_params(double a) {
    models::ParamVector p(find_model("rescorla_wagner")->parameter_names({}));
    p.set("a", a);
    return p;
}

}  // namespace

TEST(TaskSpec, ParsesKeysCommentsAndQuotes) {
    const auto spec = parse_task_spec("# demo\nkind = bandit\nn_arms = 3  # three\nlabels = \"X,Y,Z\"\n");
    EXPECT_EQ(spec.kind, TaskKind::bandit);
    EXPECT_EQ(spec.count("n_arms", 2), 3u);
    EXPECT_EQ(spec.list("labels", ""), (std::vector<std::string>{"X", "Y", "Z"}));
    EXPECT_EQ(spec.count("n_trials", 100), 100u);
}

TEST(TaskSpec, Errors) {
    EXPECT_EQ(kind_of([] { parse_task_spec("n_trials = 3\n"); }), ErrorKind::spec);
    EXPECT_EQ(kind_of([] { parse_task_spec("kind = chess\n"); }), ErrorKind::spec);
    EXPECT_EQ(kind_of([] { parse_task_spec("kind = bandit\nn_trials = 0\n").count("n_trials", 1); }),
              ErrorKind::spec);
    EXPECT_EQ(kind_of([] { parse_task_spec("kind = bandit\nnoise_std = abc\n").real("noise_std", 1); }),
              ErrorKind::spec);
}

TEST(Horizon, FourInstructedTrialsPerGame) {
    const auto inst = gen_horizon(parse_task_spec("kind = horizon\nn_games = 50"), 3);
    auto env = make_environment(parse_task_spec("kind = horizon\nn_games = 50"), 3);
    const auto s = simulate_agent(*find_model("uniform"), {}, *env, 4);
    std::size_t i = 0;
    for (const auto& g : inst.games) {
        for (std::size_t k = 0; k < kInstructedTrials; ++k) EXPECT_TRUE(s.trials[i + k].instructed);
        for (int k = 0; k < g.horizon; ++k) EXPECT_FALSE(s.trials[i + kInstructedTrials + k].instructed);
        i += kInstructedTrials + g.horizon;
    }
    EXPECT_EQ(i, s.trials.size());
}

TEST(Horizon, ShortGameFractionNearHalf) {
    const auto inst = gen_horizon(parse_task_spec("kind = horizon\nn_games = 1000"), 21);
    std::size_t short_games = 0;
    for (const auto& g : inst.games) short_games += g.horizon == 1;
    const double frac = double(short_games) / 1000.0;
    EXPECT_GT(frac, 0.45);
    EXPECT_LT(frac, 0.55);
}

TEST(Horizon, PayoutsInRangeAndDeterministic) {
    const auto spec = parse_task_spec("kind = horizon\nn_games = 30");
    const auto a = gen_horizon(spec, 8), b = gen_horizon(spec, 8);
    for (std::size_t g = 0; g < a.games.size(); ++g)
        for (int arm = 0; arm < 2; ++arm) {
            EXPECT_EQ(a.games[g].payouts[arm], b.games[g].payouts[arm]);
            for (double v : a.games[g].payouts[arm]) {
                EXPECT_GE(v, 1.0);
                EXPECT_LE(v, 100.0);
                EXPECT_EQ(v, std::round(v));
            }
        }
}

TEST(TwoStep, RewardProbabilitiesStayInBounds) {
    const auto inst = gen_two_step(parse_task_spec("kind = two_step\nn_trials = 10000"), 5);
    ASSERT_EQ(inst.reward_probs.size(), 10000u);
    for (const auto& t : inst.reward_probs)
        for (const auto& planet : t)
            for (double p : planet) {
                EXPECT_GE(p, 0.25);
                EXPECT_LE(p, 0.75);
            }
}

TEST(TwoStep, CommonTransitionFrequency) {
    auto env = make_environment(parse_task_spec("kind = two_step\nn_trials = 10000"), 9);
    const auto s = simulate_agent(*find_model("uniform"), {}, *env, 10);
    std::size_t common = 0, pairs = 0;
    for (std::size_t i = 0; i + 1 < s.trials.size(); i += 2) {
        const auto& first = s.trials[i];
        ASSERT_EQ(first.state_tag, std::optional<std::string>("0"));
        common += *first.tag("common:" + first.chosen) == *s.trials[i + 1].state_tag;
        ++pairs;
    }
    EXPECT_EQ(pairs, 10000u);
    EXPECT_NEAR(double(common) / double(pairs), 0.7, 0.02);
}

TEST(MultiAttribute, DistinctPairsAndDeterminism) {
    const auto spec = parse_task_spec("kind = multi_attribute\nn_trials = 500");
    const auto a = gen_multi_attribute(spec, 2), b = gen_multi_attribute(spec, 2), c = gen_multi_attribute(spec, 3);
    ASSERT_EQ(a.size(), 500u);
    bool differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        EXPECT_NE(a[i].a, a[i].b);
        EXPECT_EQ(a[i].a, b[i].a);
        EXPECT_EQ(a[i].b, b[i].b);
        differs = differs || a[i].a != c[i].a;
        for (double x : a[i].a) EXPECT_TRUE(x == 0.0 || x == 1.0);
    }
    EXPECT_TRUE(differs);
}

TEST(Simulate, UniformChoiceFrequency) {
    auto env = make_environment(parse_task_spec("kind = bandit\nn_trials = 10000"), 1);
    const auto s = simulate_agent(*find_model("uniform"), {}, *env, 2);
    std::size_t a = 0;
    for (const auto& t : s.trials) a += t.chosen == "A";
    EXPECT_NEAR(double(a) / 10000.0, 0.5, 0.015);
}

TEST(Simulate, DegenerateLookupAlwaysPicksFirst) {
    const auto spec = parse_task_spec("kind = bandit\nn_trials = 50");
    const auto probe = simulate_sessions(*find_model("uniform"), {}, spec, 1, 0);
    models::ParamVector p(find_model("lookup")->parameter_names(probe));
    for (std::size_t t = 0; t < 50; ++t) p.set(models::table_name(t, 0), 60.0);
    for (const auto& s : simulate_sessions(*find_model("lookup"), p, spec, 5, 7))
        for (const auto& t : s.trials) EXPECT_EQ(t.chosen, "A");
}

TEST(Simulate, RescorlaWagnerFindsBestArm) {
    const auto spec = parse_task_spec("kind = bandit\nn_trials = 100\nmeans = 0,2");
    const auto sessions = simulate_sessions(*find_model("rescorla_wagner"), rw_params(3.0), spec, 20, 4);
    std::size_t best = 0, total = 0;
    for (const auto& s : sessions)
        for (const auto& t : s.trials) {
            best += t.chosen == "B";
            ++total;
        }
    EXPECT_GT(double(best) / double(total), 0.9);
}

TEST(Simulate, ModelTaskMismatch) {
    auto env = make_environment(parse_task_spec("kind = bandit"), 1);
    EXPECT_EQ(kind_of([&] { simulate_agent(*find_model("hyperbolic"), {{"beta", 1}, {"a", 0}}, *env, 1); }),
              ErrorKind::model_task_mismatch);
}

TEST(Simulate, GeneratingModelBeatsUniform) {
    const auto spec = parse_task_spec("kind = bandit\nn_trials = 100");
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto sessions = simulate_sessions(*find_model("rescorla_wagner"), rw_params(2.0), spec, 5, seed);
        EXPECT_LT(fitting::mean_nll(*find_model("rescorla_wagner"), rw_params(2.0), sessions),
                  fitting::mean_nll(*find_model("uniform"), {}, sessions))
            << "seed " << seed;
    }
}

TEST(Simulate, WorkersDoNotChangeSessions) {
    const auto spec = parse_task_spec("kind = spatial_bandit\nn_blocks = 2");
    const auto gp = find_model("gp_ucb");
    const models::ParamVector p{{"beta", 1.0}, {"gamma", 0.0}, {"length_scale", 0.5}, {"noise", -1.0}};
    const auto one = simulate_sessions(*gp, p, spec, 6, 3, 1);
    const auto four = simulate_sessions(*gp, p, spec, 6, 3, 4);
    for (std::size_t i = 0; i < one.size(); ++i) {
        EXPECT_EQ(one[i].participant_id, four[i].participant_id);
        ASSERT_EQ(one[i].trials.size(), 40u);
        for (std::size_t t = 0; t < one[i].trials.size(); ++t) {
            EXPECT_EQ(one[i].trials[t].chosen, four[i].trials[t].chosen);
            EXPECT_EQ(one[i].trials[t].feedback, four[i].trials[t].feedback);
        }
    }
    EXPECT_EQ(one[0].trials[0].choice_set.front(), "1");
}

TEST(Simulate, IntertemporalStimuli) {
    auto env = make_environment(parse_task_spec("kind = intertemporal\nn_trials = 200"), 6);
    const auto s = simulate_agent(*find_model("uniform"), {}, *env, 6);
    for (const auto& t : s.trials) {
        const double now = t.scalar("reward:A"), later = t.scalar("reward:B");
        EXPECT_GE(now, 1.0);
        EXPECT_LE(now, 10.0);
        EXPECT_GT(later, now);
        EXPECT_EQ(t.scalar("delay:A"), 0.0);
        EXPECT_GE(t.scalar("delay:B"), 1.0);
        EXPECT_LE(t.scalar("delay:B"), 60.0);
    }
}
