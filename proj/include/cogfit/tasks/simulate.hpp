#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "cogfit/core/numeric.hpp"
#include "cogfit/core/parallel.hpp"
#include "cogfit/core/rng.hpp"
#include "cogfit/corpus/session.hpp"
#include "cogfit/models/model.hpp"
#include "cogfit/tasks/generators.hpp"

namespace cogfit::tasks {

using corpus::Session;
using corpus::Trial;

/// A task the simulator walks through. next() returns the upcoming trial
/// without a choice (instructed trials come with `chosen` filled in);
/// resolve() receives the trial with its choice and adds the outcome.
class Environment {
public:
    virtual ~Environment() = default;
    virtual TaskKind kind() const = 0;
    virtual bool done() const = 0;
    virtual Trial next() = 0;
    virtual void resolve(Trial& trial) = 0;
};

class HorizonEnvironment final : public Environment {
public:
    explicit HorizonEnvironment(HorizonInstance inst) : inst_(std::move(inst)) {}

    TaskKind kind() const override { return TaskKind::horizon; }
    bool done() const override { return game_ >= inst_.games.size(); }

    Trial next() override {
        const HorizonGame& g = inst_.games[game_];
        Trial t;
        t.choice_set = inst_.labels;
        t.stimulus["block"] = std::to_string(game_ + 1);
        if (step_ < kInstructedTrials) {
            t.instructed = true;
            t.chosen = inst_.labels[g.instructed[step_]];
        }
        return t;
    }

    void resolve(Trial& trial) override {
        const HorizonGame& g = inst_.games[game_];
        trial.feedback = g.payouts[trial.chosen_index()][step_];
        if (++step_ == kInstructedTrials + static_cast<std::size_t>(g.horizon)) {
            step_ = 0;
            ++game_;
        }
    }

private:
    HorizonInstance inst_;
    std::size_t game_ = 0, step_ = 0;
};

class TwoStepEnvironment final : public Environment {
public:
    explicit TwoStepEnvironment(TwoStepInstance inst) : inst_(std::move(inst)) {}

    TaskKind kind() const override { return TaskKind::two_step; }
    bool done() const override { return day_ >= inst_.reward_probs.size(); }

    Trial next() override {
        Trial t;
        if (!planet_) {
            t.choice_set = {kSpaceships[0], kSpaceships[1]};
            t.state_tag = "0";
            for (std::size_t i = 0; i < 2; ++i)
                t.stimulus[std::string("common:") + kSpaceships[i]] = std::string(kPlanets[i]);
        } else {
            t.choice_set = {kAliens[*planet_][0], kAliens[*planet_][1]};
            t.state_tag = kPlanets[*planet_];
        }
        return t;
    }

    void resolve(Trial& trial) override {
        if (!planet_) {
            const std::size_t ship = trial.chosen_index();
            const bool common = inst_.transition_draws[day_] < inst_.transition_common;
            planet_ = common ? ship : 1 - ship;
            return;
        }
        const std::size_t alien = trial.chosen_index();
        trial.feedback = inst_.reward_draws[day_] < inst_.reward_probs[day_][*planet_][alien] ? 1.0 : 0.0;
        planet_.reset();
        ++day_;
    }

private:
    TwoStepInstance inst_;
    std::size_t day_ = 0;
    std::optional<std::size_t> planet_;
};

class MultiAttributeEnvironment final : public Environment {
public:
    explicit MultiAttributeEnvironment(std::vector<CuePair> pairs) : pairs_(std::move(pairs)) {}

    TaskKind kind() const override { return TaskKind::multi_attribute; }
    bool done() const override { return t_ >= pairs_.size(); }

    Trial next() override {
        Trial t;
        t.choice_set = {"A", "B"};
        const auto& p = pairs_[t_];
        t.stimulus["cues:A"] = std::vector<double>(p.a.begin(), p.a.end());
        t.stimulus["cues:B"] = std::vector<double>(p.b.begin(), p.b.end());
        return t;
    }

    void resolve(Trial&) override { ++t_; }

private:
    std::vector<CuePair> pairs_;
    std::size_t t_ = 0;
};

class BanditEnvironment final : public Environment {
public:
    explicit BanditEnvironment(BanditInstance inst) : inst_(std::move(inst)) {}

    TaskKind kind() const override { return TaskKind::bandit; }
    bool done() const override { return block_ >= inst_.payouts.size(); }

    Trial next() override {
        Trial t;
        t.choice_set = inst_.labels;
        t.stimulus["block"] = std::to_string(block_ + 1);
        return t;
    }

    void resolve(Trial& trial) override {
        trial.feedback = inst_.payouts[block_][trial.chosen_index()][step_];
        if (++step_ == inst_.trials_per_block) {
            step_ = 0;
            ++block_;
        }
    }

private:
    BanditInstance inst_;
    std::size_t block_ = 0, step_ = 0;
};

class IntertemporalEnvironment final : public Environment {
public:
    explicit IntertemporalEnvironment(IntertemporalInstance inst) : inst_(std::move(inst)) {}

    TaskKind kind() const override { return TaskKind::intertemporal; }
    bool done() const override { return t_ >= inst_.trials.size(); }

    Trial next() override {
        Trial t;
        t.choice_set = {"A", "B"};
        const auto& opts = inst_.trials[t_];
        for (std::size_t i = 0; i < 2; ++i) {
            t.stimulus["reward:" + t.choice_set[i]] = std::vector<double>{opts[i].reward};
            t.stimulus["delay:" + t.choice_set[i]] = std::vector<double>{opts[i].delay};
        }
        return t;
    }

    void resolve(Trial&) override { ++t_; }

private:
    IntertemporalInstance inst_;
    std::size_t t_ = 0;
};

class SpatialBanditEnvironment final : public Environment {
public:
    explicit SpatialBanditEnvironment(SpatialInstance inst) : inst_(std::move(inst)) {
        for (std::size_t i = 1; i <= inst_.n_options; ++i) labels_.push_back(std::to_string(i));
    }

    TaskKind kind() const override { return TaskKind::spatial_bandit; }
    bool done() const override { return block_ >= inst_.payouts.size(); }

    Trial next() override {
        Trial t;
        t.choice_set = labels_;
        t.stimulus["block"] = std::to_string(block_ + 1);
        return t;
    }

    void resolve(Trial& trial) override {
        trial.feedback = inst_.payouts[block_][trial.chosen_index()][step_];
        if (++step_ == inst_.trials_per_block) {
            step_ = 0;
            ++block_;
        }
    }

private:
    SpatialInstance inst_;
    std::vector<std::string> labels_;
    std::size_t block_ = 0, step_ = 0;
};

inline std::unique_ptr<Environment> make_environment(const TaskSpec& spec, std::uint64_t seed) {
    switch (spec.kind) {
        case TaskKind::horizon: return std::make_unique<HorizonEnvironment>(gen_horizon(spec, seed));
        case TaskKind::two_step: return std::make_unique<TwoStepEnvironment>(gen_two_step(spec, seed));
        case TaskKind::multi_attribute:
            return std::make_unique<MultiAttributeEnvironment>(gen_multi_attribute(spec, seed));
        case TaskKind::bandit: return std::make_unique<BanditEnvironment>(gen_bandit(spec, seed));
        case TaskKind::intertemporal:
            return std::make_unique<IntertemporalEnvironment>(gen_intertemporal(spec, seed));
        case TaskKind::spatial_bandit:
            return std::make_unique<SpatialBanditEnvironment>(gen_spatial_bandit(spec, seed));
    }
    fail(ErrorKind::spec, "unsupported task kind");
}

/// Model tags that can act in each task.
inline std::vector<std::string> compatible_models(TaskKind kind) {
    switch (kind) {
        case TaskKind::horizon:
        case TaskKind::bandit:
            return {"uniform", "rescorla_wagner", "rescorla_wagner_context", "gp_ucb", "lookup"};
        case TaskKind::spatial_bandit: return {"uniform", "gp_ucb", "rescorla_wagner", "rescorla_wagner_context"};
        case TaskKind::two_step: return {"uniform", "dual_systems", "rescorla_wagner_context"};
        case TaskKind::multi_attribute: return {"uniform", "wadd", "ew", "ttb", "deepseek_two_regime", "srm_mixture"};
        case TaskKind::intertemporal: return {"uniform", "hyperbolic"};
    }
    return {};
}

inline void check_compatible(const models::Model& model, TaskKind kind) {
    const auto ok = compatible_models(kind);
    if (std::find(ok.begin(), ok.end(), model.tag()) == ok.end()) {
        std::string list;
        for (const auto& m : ok) list += (list.empty() ? "" : ", ") + m;
        fail(ErrorKind::model_task_mismatch, "model '" + std::string(model.tag()) + "' cannot act in the " +
                                                 std::string(to_string(kind)) + " task (supported: " + list + ")");
    }
}

/// Open-loop simulation: free choices are sampled from the model's choice
/// distribution and fed back as the agent's own history.
inline Session simulate_agent(const models::Model& model, const models::ParamVector& params, Environment& env,
                              std::uint64_t seed, std::string participant_id = "sim") {
    check_compatible(model, env.kind());
    SplitMix64 rng(seed);
    auto agent = model.make_agent(params);
    Session s;
    s.experiment_id = std::string(to_string(env.kind()));
    s.participant_id = std::move(participant_id);
    std::vector<double> logits, probs;
    while (!env.done()) {
        Trial t = env.next();
        t.index = s.trials.size();
        if (!t.instructed) {
            logits.assign(t.choice_set.size(), 0.0);
            agent->logits(t, logits);
            probs.assign(logits.size(), 0.0);
            softmax(logits, probs);
            t.chosen = t.choice_set[rng.categorical(probs)];
        }
        env.resolve(t);
        agent->observe(t);
        s.trials.push_back(std::move(t));
    }
    agent->finish();
    corpus::validate(s);
    return s;
}

/// n independent sessions; session i uses task seed derive_seed(seed, 2i) and
/// choice seed derive_seed(seed, 2i + 1), so output does not depend on workers.
inline std::vector<Session> simulate_sessions(const models::Model& model, const models::ParamVector& params,
                                              const TaskSpec& spec, std::size_t n, std::uint64_t seed,
                                              unsigned workers = 1, const std::string& id_prefix = "p") {
    std::vector<Session> out(n);
    const std::size_t width = std::to_string(n > 0 ? n - 1 : 0).size();
    parallel_for(n, workers, [&](std::size_t i) {
        auto env = make_environment(spec, derive_seed(seed, 2 * i));
        std::string id = std::to_string(i);
        id.insert(0, width - id.size(), '0');
        out[i] = simulate_agent(model, params, *env, derive_seed(seed, 2 * i + 1), id_prefix + id);
    });
    return out;
}

}  // namespace cogfit::tasks
