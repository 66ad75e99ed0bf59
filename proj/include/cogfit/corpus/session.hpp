#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "cogfit/core/error.hpp"

namespace cogfit::corpus {

/// A discrete gamble: outcome values and their probabilities.
struct Lottery {
    std::vector<double> outcomes;
    std::vector<double> probs;

    bool operator==(const Lottery&) const = default;
};

/// One named stimulus feature: a real vector, a categorical tag or a lottery.
using Feature = std::variant<std::vector<double>, std::string, Lottery>;

struct Trial {
    std::size_t index = 0;
    std::vector<std::string> choice_set;
    std::string chosen;
    std::map<std::string, Feature> stimulus;
    std::optional<double> feedback;
    std::optional<std::string> state_tag;
    std::optional<double> response_time_ms;
    // Forced choices (e.g. instructed horizon trials) shape learning but are not responses.
    bool instructed = false;
    // Consecutive trials sharing a group count as one response with summed log-likelihood.
    std::optional<long long> response_group;
    // Fields not part of the schema, carried through load/save untouched.
    nlohmann::json extra = nlohmann::json::object();

    std::size_t option_index(const std::string& label) const {
        const auto it = std::find(choice_set.begin(), choice_set.end(), label);
        if (it == choice_set.end())
            fail(ErrorKind::malformed_session,
                 "trial " + std::to_string(index) + ": option '" + label + "' not in choice set");
        return static_cast<std::size_t>(it - choice_set.begin());
    }
    std::size_t chosen_index() const { return option_index(chosen); }

    bool has(const std::string& key) const { return stimulus.contains(key); }

    const std::vector<double>& vector(const std::string& key) const {
        const auto it = stimulus.find(key);
        if (it == stimulus.end() || !std::holds_alternative<std::vector<double>>(it->second))
            fail(ErrorKind::malformed_session,
                 "trial " + std::to_string(index) + ": missing vector feature '" + key + "'");
        return std::get<std::vector<double>>(it->second);
    }

    double scalar(const std::string& key) const {
        const auto& v = vector(key);
        if (v.size() != 1)
            fail(ErrorKind::malformed_session,
                 "trial " + std::to_string(index) + ": feature '" + key + "' is not a scalar");
        return v.front();
    }

    const std::string* tag(const std::string& key) const {
        const auto it = stimulus.find(key);
        if (it == stimulus.end()) return nullptr;
        return std::get_if<std::string>(&it->second);
    }

    const Lottery& lottery(const std::string& key) const {
        const auto it = stimulus.find(key);
        if (it == stimulus.end() || !std::holds_alternative<Lottery>(it->second))
            fail(ErrorKind::malformed_session,
                 "trial " + std::to_string(index) + ": missing lottery '" + key + "'");
        return std::get<Lottery>(it->second);
    }

    double reward() const {
        if (!feedback)
            fail(ErrorKind::malformed_session,
                 "trial " + std::to_string(index) + ": missing reward");
        return *feedback;
    }
};

struct Session {
    std::string experiment_id;
    std::string participant_id;
    std::vector<Trial> trials;
    nlohmann::json extra = nlohmann::json::object();

    /// Number of scored responses (non-instructed trials, grouped trials counted once).
    std::size_t response_count() const {
        std::size_t n = 0;
        std::optional<long long> last_group;
        for (const auto& t : trials) {
            if (t.instructed) continue;
            if (t.response_group && last_group && *t.response_group == *last_group) continue;
            ++n;
            last_group = t.response_group;
        }
        return n;
    }
};

/// Checks the Session/Trial invariants; throws malformed_session on violation.
inline void validate(const Session& s) {
    const std::string who = "session " + s.experiment_id + "/" + s.participant_id;
    require(!s.trials.empty(), ErrorKind::malformed_session, who + ": no trials");
    for (std::size_t i = 0; i < s.trials.size(); ++i) {
        const Trial& t = s.trials[i];
        require(t.index == i, ErrorKind::malformed_session,
                who + ": trial indices must increase from 0 (got " + std::to_string(t.index) +
                    " at position " + std::to_string(i) + ")");
        require(!t.choice_set.empty(), ErrorKind::malformed_session,
                who + ": trial " + std::to_string(i) + " has an empty choice set");
        std::set<std::string> distinct(t.choice_set.begin(), t.choice_set.end());
        require(distinct.size() == t.choice_set.size(), ErrorKind::malformed_session,
                who + ": trial " + std::to_string(i) + " has duplicate options");
        require(distinct.contains(t.chosen), ErrorKind::malformed_session,
                who + ": trial " + std::to_string(i) + " chose '" + t.chosen +
                    "' outside its choice set");
        if (t.response_time_ms)
            require(*t.response_time_ms > 0.0 && std::isfinite(*t.response_time_ms),
                    ErrorKind::malformed_session,
                    who + ": trial " + std::to_string(i) + " has non-positive response time");
    }
}

inline std::set<std::string> participants(const std::vector<Session>& sessions) {
    std::set<std::string> ids;
    for (const auto& s : sessions) ids.insert(s.participant_id);
    return ids;
}

}  // namespace cogfit::corpus
