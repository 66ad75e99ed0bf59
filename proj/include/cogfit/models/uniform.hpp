#pragma once

#include <algorithm>
#include <memory>

#include "cogfit/models/model.hpp"

namespace cogfit::models {

// Baseline: equal probability on every option, no parameters.
class UniformAgent final : public Agent {
public:
    void logits(const Trial& trial, std::span<double> out) override {
        require_size(trial, out);
        std::fill(out.begin(), out.end(), 0.0);
    }
    void add_logit_gradient(const Trial&, std::span<const double>, std::span<double>) override {}
};

class Uniform final : public Model {
public:
    std::string_view tag() const override { return "uniform"; }
    std::vector<std::string> parameter_names(std::span<const Session>) const override { return {}; }
    std::unique_ptr<Agent> make_agent(const ParamVector&) const override { return std::make_unique<UniformAgent>(); }
    bool has_analytic_gradient() const override { return true; }
};

}  // namespace cogfit::models
