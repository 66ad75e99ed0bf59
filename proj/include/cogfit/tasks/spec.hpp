#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "cogfit/core/error.hpp"

namespace cogfit::tasks {

enum class TaskKind { horizon, two_step, multi_attribute, bandit, intertemporal, spatial_bandit };

inline std::string_view to_string(TaskKind k) {
    switch (k) {
        case TaskKind::horizon: return "horizon";
        case TaskKind::two_step: return "two_step";
        case TaskKind::multi_attribute: return "multi_attribute";
        case TaskKind::bandit: return "bandit";
        case TaskKind::intertemporal: return "intertemporal";
        case TaskKind::spatial_bandit: return "spatial_bandit";
    }
    return "?";
}

inline std::optional<TaskKind> task_kind_from_string(std::string_view s) {
    for (auto k : {TaskKind::horizon, TaskKind::two_step, TaskKind::multi_attribute, TaskKind::bandit,
                   TaskKind::intertemporal, TaskKind::spatial_bandit})
        if (to_string(k) == s) return k;
    return std::nullopt;
}

inline std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

/// A task kind plus free-form key=value parameters. Accessors apply the
/// documented defaults and raise spec errors for unparsable values.
struct TaskSpec {
    TaskKind kind = TaskKind::bandit;
    std::map<std::string, std::string> parameters;

    bool has(const std::string& key) const { return parameters.contains(key); }

    double real(const std::string& key, double fallback) const {
        const auto it = parameters.find(key);
        if (it == parameters.end()) return fallback;
        double v = 0.0;
        const auto& s = it->second;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v))
            fail(ErrorKind::spec, "'" + key + "' is not a real number: '" + s + "'");
        return v;
    }

    long long integer(const std::string& key, long long fallback) const {
        const auto it = parameters.find(key);
        if (it == parameters.end()) return fallback;
        long long v = 0;
        const auto& s = it->second;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            fail(ErrorKind::spec, "'" + key + "' is not an integer: '" + s + "'");
        return v;
    }

    std::size_t count(const std::string& key, long long fallback) const {
        const long long v = integer(key, fallback);
        if (v < 1) fail(ErrorKind::spec, "'" + key + "' must be at least 1");
        return static_cast<std::size_t>(v);
    }

    double probability(const std::string& key, double fallback) const {
        const double v = real(key, fallback);
        if (v < 0.0 || v > 1.0) fail(ErrorKind::spec, "'" + key + "' must lie in [0, 1]");
        return v;
    }

    double nonnegative(const std::string& key, double fallback) const {
        const double v = real(key, fallback);
        if (v < 0.0) fail(ErrorKind::spec, "'" + key + "' must be non-negative");
        return v;
    }

    std::string text(const std::string& key, std::string fallback) const {
        const auto it = parameters.find(key);
        return it == parameters.end() ? fallback : it->second;
    }

    /// Comma-separated list.
    std::vector<std::string> list(const std::string& key, const std::string& fallback) const {
        std::vector<std::string> out;
        std::stringstream ss(text(key, fallback));
        for (std::string item; std::getline(ss, item, ',');)
            if (auto t = trim(item); !t.empty()) out.push_back(t);
        return out;
    }

    std::vector<double> reals(const std::string& key, const std::string& fallback) const {
        std::vector<double> out;
        for (const auto& item : list(key, fallback)) {
            TaskSpec one;
            one.parameters["v"] = item;
            try {
                out.push_back(one.real("v", 0.0));
            } catch (const Error&) {
                fail(ErrorKind::spec, "'" + key + "' has a non-numeric entry '" + item + "'");
            }
        }
        return out;
    }
};

/// Parses "key = value" lines; '#' starts a comment. The key "kind" selects the task.
inline TaskSpec parse_task_spec(std::istream& in) {
    TaskSpec spec;
    bool has_kind = false;
    std::string line;
    for (std::size_t n = 1; std::getline(in, line); ++n) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string body = trim(line);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) fail(ErrorKind::spec, "line " + std::to_string(n) + ": expected key = value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        std::string value = trim(std::string_view(body).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        if (key.empty()) fail(ErrorKind::spec, "line " + std::to_string(n) + ": empty key");
        if (key == "kind") {
            const auto k = task_kind_from_string(value);
            if (!k) fail(ErrorKind::spec, "unknown task kind '" + value + "'");
            spec.kind = *k;
            has_kind = true;
        } else {
            spec.parameters[key] = value;
        }
    }
    if (!has_kind) fail(ErrorKind::spec, "task spec has no 'kind'");
    return spec;
}

inline TaskSpec parse_task_spec(const std::string& text) {
    std::istringstream in(text);
    return parse_task_spec(in);
}

inline TaskSpec load_task_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::io, "cannot open task spec '" + path + "'");
    return parse_task_spec(in);
}

}  // namespace cogfit::tasks
