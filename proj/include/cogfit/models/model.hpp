#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cogfit/core/error.hpp"
#include "cogfit/corpus/session.hpp"
#include "cogfit/models/choice.hpp"
#include "cogfit/models/param_vector.hpp"

namespace cogfit::models {

using corpus::Session;
using corpus::Trial;

/// A model bound to one parameter vector and walked through one session.
///
/// For each trial the caller asks for logits (one per option of the trial's
/// choice set, in order), then reveals the trial through observe(). Agents
/// carry all learning state, so a fresh agent is needed per session.
class Agent {
public:
    virtual ~Agent() = default;

    virtual void logits(const Trial& trial, std::span<double> out) = 0;

    virtual void observe(const Trial& /*trial*/) {}

    /// Called after the last trial of a session; models that need paired
    /// trials use it to report an unterminated pair.
    virtual void finish() {}

    /// Adds sum_m weights[m] * d(logit_m)/d(theta) to grad. Only models whose
    /// logits do not depend on the trial history implement this.
    virtual void add_logit_gradient(const Trial& /*trial*/, std::span<const double> /*weights*/,
                                    std::span<double> /*grad*/) {
        fail(ErrorKind::precondition, "model provides no analytic gradient");
    }
};

class Model {
public:
    virtual ~Model() = default;

    virtual std::string_view tag() const = 0;

    /// Parameter layout; data-dependent for models whose size follows the data
    /// (feature dimension, object set, table shape).
    virtual std::vector<std::string> parameter_names(std::span<const Session> sessions) const = 0;

    virtual std::unique_ptr<Agent> make_agent(const ParamVector& params) const = 0;

    virtual bool has_analytic_gradient() const { return false; }

    /// Starting point for fitting. Raw zero everywhere unless a model has a
    /// stationary point there.
    virtual std::vector<double> initial_values(const std::vector<std::string>& names,
                                               std::uint64_t /*seed*/) const {
        return std::vector<double>(names.size(), 0.0);
    }

    ParamVector initial_params(std::span<const Session> sessions, std::uint64_t seed = 0) const {
        auto names = parameter_names(sessions);
        auto values = initial_values(names, seed);
        return ParamVector(std::move(names), std::move(values));
    }
};

/// Choice distribution at trial t after conditioning on trials 0..t-1.
inline ChoiceDistribution distribution_at(const Model& model, const ParamVector& params,
                                          const Session& session, std::size_t t) {
    require(t < session.trials.size(), ErrorKind::precondition,
            "trial index " + std::to_string(t) + " out of range");
    auto agent = model.make_agent(params);
    std::vector<double> scratch;
    for (std::size_t k = 0; k < t; ++k) agent->observe(session.trials[k]);
    const Trial& trial = session.trials[t];
    scratch.assign(trial.choice_set.size(), 0.0);
    agent->logits(trial, scratch);
    return from_logits(trial.choice_set, scratch);
}

/// Small insertion-ordered map keyed by option label; option sets are tiny.
template <class T>
class LabelTable {
public:
    explicit LabelTable(T init = T{}) : init_(init) {}

    T& at(const std::string& label) {
        for (auto& [k, v] : entries_)
            if (k == label) return v;
        entries_.emplace_back(label, init_);
        return entries_.back().second;
    }

    T get(const std::string& label) const {
        for (const auto& [k, v] : entries_)
            if (k == label) return v;
        return init_;
    }

    const std::vector<std::pair<std::string, T>>& entries() const { return entries_; }
    void clear() { entries_.clear(); }

private:
    T init_;
    std::vector<std::pair<std::string, T>> entries_;
};

/// Tracks the "block" stimulus tag; reports when a new block (e.g. a new
/// bandit game) starts so learners can reset.
class BlockTracker {
public:
    bool changed(const Trial& trial) {
        const std::string* tag = trial.tag("block");
        const std::string now = tag ? *tag : std::string();
        const bool fresh = started_ && now != current_;
        current_ = now;
        started_ = true;
        return fresh;
    }

private:
    bool started_ = false;
    std::string current_;
};

inline void require_size(const Trial& trial, std::span<double> out) {
    require(out.size() == trial.choice_set.size(), ErrorKind::shape,
            "logit buffer does not match choice set of trial " + std::to_string(trial.index));
}

}  // namespace cogfit::models
