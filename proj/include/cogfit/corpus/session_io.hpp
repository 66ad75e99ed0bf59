#pragma once

// Line-delimited JSON storage for sessions: one session object per line.
//
//   {"experiment_id": str, "participant_id": str, "trials": [trial, ...], ...}
//   trial = {"index": int, "choice_set": [str], "chosen": str,
//            "stimulus": {name: [num, ...] | str | {"outcomes": [num], "probs": [num]}},
//            "feedback"?: num, "state_tag"?: str, "response_time_ms"?: num,
//            "instructed"?: bool, "response_group"?: int, ...}
//
// Unknown keys at session and trial level are preserved. Output keys are
// sorted, so save(load(x)) is the canonical form of x.

#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cogfit/core/error.hpp"
#include "cogfit/corpus/session.hpp"

namespace cogfit::corpus {

namespace detail {

inline const std::set<std::string>& trial_keys() {
    static const std::set<std::string> keys{"index",    "choice_set",       "chosen",
                                            "stimulus", "feedback",         "state_tag",
                                            "response_time_ms", "instructed", "response_group"};
    return keys;
}

inline const std::set<std::string>& session_keys() {
    static const std::set<std::string> keys{"experiment_id", "participant_id", "trials"};
    return keys;
}

inline nlohmann::json feature_to_json(const Feature& f) {
    return std::visit(
        [](const auto& v) -> nlohmann::json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, Lottery>)
                return {{"outcomes", v.outcomes}, {"probs", v.probs}};
            else
                return v;
        },
        f);
}

inline Feature feature_from_json(const nlohmann::json& j, const std::string& name) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number()) return std::vector<double>{j.get<double>()};
    if (j.is_array()) return j.get<std::vector<double>>();
    if (j.is_object() && j.contains("outcomes") && j.contains("probs")) {
        Lottery l{j.at("outcomes").get<std::vector<double>>(), j.at("probs").get<std::vector<double>>()};
        if (l.outcomes.size() != l.probs.size())
            fail(ErrorKind::malformed_lottery, "feature '" + name + "': outcome/probability length mismatch");
        return l;
    }
    fail(ErrorKind::malformed_session, "feature '" + name + "' has an unsupported type");
}

}  // namespace detail

inline nlohmann::json to_json(const Trial& t) {
    nlohmann::json j = t.extra.is_object() ? t.extra : nlohmann::json::object();
    j["index"] = t.index;
    j["choice_set"] = t.choice_set;
    j["chosen"] = t.chosen;
    nlohmann::json stim = nlohmann::json::object();
    for (const auto& [k, v] : t.stimulus) stim[k] = detail::feature_to_json(v);
    j["stimulus"] = std::move(stim);
    if (t.feedback) j["feedback"] = *t.feedback;
    if (t.state_tag) j["state_tag"] = *t.state_tag;
    if (t.response_time_ms) j["response_time_ms"] = *t.response_time_ms;
    if (t.instructed) j["instructed"] = true;
    if (t.response_group) j["response_group"] = *t.response_group;
    return j;
}

inline nlohmann::json to_json(const Session& s) {
    nlohmann::json j = s.extra.is_object() ? s.extra : nlohmann::json::object();
    j["experiment_id"] = s.experiment_id;
    j["participant_id"] = s.participant_id;
    nlohmann::json trials = nlohmann::json::array();
    for (const auto& t : s.trials) trials.push_back(to_json(t));
    j["trials"] = std::move(trials);
    return j;
}

inline Trial trial_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail(ErrorKind::malformed_session, "trial is not an object");
    Trial t;
    try {
        t.index = j.at("index").get<std::size_t>();
        t.choice_set = j.at("choice_set").get<std::vector<std::string>>();
        t.chosen = j.at("chosen").get<std::string>();
        if (j.contains("stimulus"))
            for (const auto& [k, v] : j.at("stimulus").items())
                t.stimulus.emplace(k, detail::feature_from_json(v, k));
        if (j.contains("feedback") && !j["feedback"].is_null()) t.feedback = j["feedback"].get<double>();
        if (j.contains("state_tag") && !j["state_tag"].is_null())
            t.state_tag = j["state_tag"].get<std::string>();
        if (j.contains("response_time_ms") && !j["response_time_ms"].is_null())
            t.response_time_ms = j["response_time_ms"].get<double>();
        if (j.contains("instructed")) t.instructed = j["instructed"].get<bool>();
        if (j.contains("response_group") && !j["response_group"].is_null())
            t.response_group = j["response_group"].get<long long>();
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::malformed_session, std::string("bad trial field: ") + e.what());
    }
    for (const auto& [k, v] : j.items())
        if (!detail::trial_keys().contains(k)) t.extra[k] = v;
    return t;
}

inline Session session_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail(ErrorKind::malformed_session, "session is not an object");
    Session s;
    try {
        s.experiment_id = j.at("experiment_id").get<std::string>();
        s.participant_id = j.at("participant_id").get<std::string>();
        for (const auto& tj : j.at("trials")) s.trials.push_back(trial_from_json(tj));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::malformed_session, std::string("bad session field: ") + e.what());
    }
    for (const auto& [k, v] : j.items())
        if (!detail::session_keys().contains(k)) s.extra[k] = v;
    validate(s);
    return s;
}

inline std::vector<Session> read_sessions(std::istream& in) {
    std::vector<Session> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            fail(ErrorKind::malformed_session, "line " + std::to_string(line_no) + ": " + e.what());
        }
        try {
            out.push_back(session_from_json(j));
        } catch (const Error& e) {
            throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<Session> load_sessions(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open " + path.string());
    return read_sessions(in);
}

inline void write_sessions(std::ostream& out, const std::vector<Session>& sessions) {
    for (const auto& s : sessions) out << to_json(s).dump() << '\n';
}

inline std::string dump_sessions(const std::vector<Session>& sessions) {
    std::ostringstream os;
    write_sessions(os, sessions);
    return os.str();
}

}  // namespace cogfit::corpus
