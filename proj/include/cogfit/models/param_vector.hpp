#pragma once

#include <cmath>
#include <initializer_list>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cogfit/core/error.hpp"

namespace cogfit::models {

/// Named, unconstrained real parameters. Transforms (sigmoid, exp) are applied
/// inside each model's equations, never here.
class ParamVector {
public:
    ParamVector() = default;

    ParamVector(std::vector<std::string> names, std::vector<double> values)
        : names_(std::move(names)), values_(std::move(values)) {
        check();
    }

    explicit ParamVector(std::vector<std::string> names)
        : names_(std::move(names)), values_(names_.size(), 0.0) {
        check();
    }

    ParamVector(std::initializer_list<std::pair<std::string, double>> entries) {
        for (const auto& [n, v] : entries) {
            names_.push_back(n);
            values_.push_back(v);
        }
        check();
    }

    std::size_t size() const { return values_.size(); }
    const std::vector<std::string>& names() const { return names_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    std::optional<std::size_t> find(std::string_view name) const {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == name) return i;
        return std::nullopt;
    }

    std::size_t index_of(std::string_view name) const {
        if (auto i = find(name)) return *i;
        fail(ErrorKind::precondition, "parameter '" + std::string(name) + "' not present");
    }

    double operator[](std::string_view name) const { return values_[index_of(name)]; }

    void set(std::string_view name, double v) { values_[index_of(name)] = v; }

    /// Copies values for every shared name from `other`.
    ParamVector& assign_from(const ParamVector& other) {
        for (std::size_t i = 0; i < names_.size(); ++i)
            if (auto j = other.find(names_[i])) values_[i] = other.values_[*j];
        return *this;
    }

    bool all_finite() const {
        for (double v : values_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    bool operator==(const ParamVector&) const = default;

private:
    void check() const {
        require(names_.size() == values_.size(), ErrorKind::shape, "parameter names/values length mismatch");
        std::set<std::string> seen(names_.begin(), names_.end());
        require(seen.size() == names_.size(), ErrorKind::precondition, "duplicate parameter names");
    }

    std::vector<std::string> names_;
    std::vector<double> values_;
};

inline nlohmann::json to_json(const ParamVector& p) {
    return {{"names", p.names()}, {"values", p.values()}};
}

inline ParamVector params_from_json(const nlohmann::json& j) {
    try {
        return ParamVector(j.at("names").get<std::vector<std::string>>(),
                           j.at("values").get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::precondition, std::string("bad parameter vector: ") + e.what());
    }
}

}  // namespace cogfit::models
