#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cogfit/core/numeric.hpp"
#include "cogfit/core/rng.hpp"
#include "cogfit/models/model.hpp"

namespace cogfit::models {

inline constexpr std::size_t kEmbeddingDim = 16;

inline std::string embedding_name(const std::string& object, std::size_t k) {
    return "x[" + object + "][" + std::to_string(k) + "]";
}

/// Index of each object's first embedding coordinate in a parameter vector.
/// Coordinates of one object are stored contiguously.
inline std::map<std::string, std::size_t> embedding_offsets(const ParamVector& p) {
    std::map<std::string, std::size_t> out;
    const auto& names = p.names();
    for (std::size_t i = 0; i < names.size(); ++i) {
        const std::string& n = names[i];
        if (n.size() < 7 || n.compare(0, 2, "x[") != 0 || n.compare(n.size() - 4, 4, "][0]") != 0) continue;
        const std::string object = n.substr(2, n.size() - 6);
        if (i + kEmbeddingDim > names.size() || names[i + kEmbeddingDim - 1] != embedding_name(object, kEmbeddingDim - 1))
            fail(ErrorKind::precondition, "embedding of '" + object + "' is not stored contiguously");
        out.emplace(object, i);
    }
    return out;
}

// Triplet odd-one-out: the probability of picking option i grows with the
// similarity x_j.x_k of the two remaining objects.
class OddOneOutAgent final : public Agent {
public:
    explicit OddOneOutAgent(const ParamVector& p) : values_(p.values()), offsets_(embedding_offsets(p)) {}

    void logits(const Trial& trial, std::span<double> out) override {
        require_size(trial, out);
        const auto idx = resolve(trial);
        for (std::size_t i = 0; i < 3; ++i) {
            const std::size_t j = idx[(i + 1) % 3], k = idx[(i + 2) % 3];
            out[i] = dot(embedding(j), embedding(k));
        }
    }

    void add_logit_gradient(const Trial& trial, std::span<const double> w, std::span<double> grad) override {
        const auto idx = resolve(trial);
        for (std::size_t i = 0; i < 3; ++i) {
            const std::size_t j = idx[(i + 1) % 3], k = idx[(i + 2) % 3];
            for (std::size_t d = 0; d < kEmbeddingDim; ++d) {
                grad[j + d] += w[i] * values_[k + d];
                grad[k + d] += w[i] * values_[j + d];
            }
        }
    }

private:
    std::span<const double> embedding(std::size_t offset) const {
        return std::span<const double>(values_).subspan(offset, kEmbeddingDim);
    }

    std::array<std::size_t, 3> resolve(const Trial& trial) const {
        if (trial.choice_set.size() != 3)
            fail(ErrorKind::malformed_session, "trial " + std::to_string(trial.index) + " is not a triplet");
        std::array<std::size_t, 3> idx{};
        for (std::size_t i = 0; i < 3; ++i) {
            const auto it = offsets_.find(trial.choice_set[i]);
            if (it == offsets_.end())
                fail(ErrorKind::unknown_object, "no embedding for object '" + trial.choice_set[i] + "'");
            idx[i] = it->second;
        }
        return idx;
    }

    std::vector<double> values_;
    std::map<std::string, std::size_t> offsets_;
};

class OddOneOut final : public Model {
public:
    std::string_view tag() const override { return "odd_one_out"; }

    std::vector<std::string> parameter_names(std::span<const Session> sessions) const override {
        std::set<std::string> objects;
        for (const auto& s : sessions)
            for (const auto& t : s.trials) objects.insert(t.choice_set.begin(), t.choice_set.end());
        std::vector<std::string> names;
        for (const auto& o : objects)
            for (std::size_t k = 0; k < kEmbeddingDim; ++k) names.push_back(embedding_name(o, k));
        return names;
    }

    std::unique_ptr<Agent> make_agent(const ParamVector& p) const override {
        return std::make_unique<OddOneOutAgent>(p);
    }

    bool has_analytic_gradient() const override { return true; }

    // Zero embeddings are a stationary point of the likelihood, so fitting
    // starts from small seeded Gaussian coordinates instead.
    std::vector<double> initial_values(const std::vector<std::string>& names, std::uint64_t seed) const override {
        SplitMix64 rng(seed);
        std::vector<double> v(names.size());
        for (double& x : v) x = rng.normal(0.0, 0.1);
        return v;
    }
};

inline ChoiceDistribution odd_one_out_probs(const ParamVector& params, const std::array<std::string, 3>& triplet) {
    Trial t;
    t.choice_set = {triplet[0], triplet[1], triplet[2]};
    t.chosen = triplet[0];
    OddOneOutAgent agent(params);
    std::vector<double> logits(3);
    agent.logits(t, logits);
    return from_logits(t.choice_set, logits);
}

}  // namespace cogfit::models
