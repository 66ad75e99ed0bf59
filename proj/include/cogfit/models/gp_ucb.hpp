#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "cogfit/models/model.hpp"

namespace cogfit::models {

inline constexpr double kKernelJitter = 1e-8;

struct GpObservation {
    std::size_t option = 1;  // 1-based grid position
    double reward = 0.0;
};

struct GpPosterior {
    std::vector<double> mean;
    std::vector<double> sd;
};

inline double rbf_kernel(double i, double j, double length_scale) {
    const double d = i - j;
    return std::exp(-d * d / (2.0 * length_scale * length_scale));
}

/// Exact GP regression over grid positions 1..n_options with an RBF kernel
/// of length exp(length_raw), noise variance exp(noise_raw) and zero prior
/// mean. The Gram matrix gets a 1e-8 jitter; if the Cholesky factorisation
/// still fails the jitter is raised tenfold up to 1e-4 before giving up.
inline GpPosterior gp_posterior(std::span<const GpObservation> observations, std::size_t n_options,
                                double length_raw, double noise_raw) {
    const double ell = std::exp(length_raw);
    const double noise = std::exp(noise_raw);
    GpPosterior out{std::vector<double>(n_options, 0.0), std::vector<double>(n_options, 1.0)};
    const auto m = static_cast<Eigen::Index>(observations.size());
    if (m == 0) return out;
    for (const auto& o : observations)
        if (o.option < 1 || o.option > n_options)
            fail(ErrorKind::domain, "observation at option " + std::to_string(o.option) + " outside 1.." +
                                        std::to_string(n_options));

    Eigen::MatrixXd gram(m, m);
    Eigen::VectorXd y(m);
    for (Eigen::Index a = 0; a < m; ++a) {
        y(a) = observations[a].reward;
        for (Eigen::Index b = 0; b < m; ++b)
            gram(a, b) = rbf_kernel(static_cast<double>(observations[a].option),
                                    static_cast<double>(observations[b].option), ell);
    }
    Eigen::LLT<Eigen::MatrixXd> llt;
    double jitter = kKernelJitter;
    for (;; jitter *= 10.0) {
        Eigen::MatrixXd system = gram;
        system.diagonal().array() += noise + jitter;
        llt.compute(system);
        if (llt.info() == Eigen::Success) break;
        if (jitter >= 1e-4) fail(ErrorKind::ill_conditioned, "GP Gram matrix is not positive definite");
    }
    const Eigen::VectorXd weights = llt.solve(y);
    for (std::size_t i = 0; i < n_options; ++i) {
        Eigen::VectorXd k(m);
        for (Eigen::Index a = 0; a < m; ++a)
            k(a) = rbf_kernel(static_cast<double>(i + 1), static_cast<double>(observations[a].option), ell);
        out.mean[i] = k.dot(weights);
        const Eigen::VectorXd v = llt.matrixL().solve(k);
        out.sd[i] = std::sqrt(std::max(0.0, 1.0 - v.squaredNorm()));
    }
    return out;
}

// GP-UCB choice rule, logit_i = beta (m_i + exp(gamma) s_i). Options are the
// positions of the trial's choice set, the posterior comes from previous
// (choice, reward) pairs in the same block. The posterior is maintained by
// exact rank-one conditioning on each observation, which equals the batch
// solve in gp_posterior with the same jitter.
class GpUcbAgent final : public Agent {
public:
    explicit GpUcbAgent(const ParamVector& p)
        : beta_(p["beta"]),
          bonus_(std::exp(p["gamma"])),
          ell_(std::exp(p["length_scale"])),
          noise_(std::exp(p["noise"])) {}

    void logits(const Trial& trial, std::span<double> out) override {
        require_size(trial, out);
        sync(trial);
        for (std::size_t i = 0; i < n_; ++i)
            out[i] = beta_ * (mean_[i] + bonus_ * std::sqrt(std::max(0.0, cov_[i * n_ + i])));
    }

    void observe(const Trial& trial) override {
        sync(trial);
        const std::size_t c = trial.chosen_index();
        const double y = trial.reward();
        const double s = cov_[c * n_ + c] + noise_ + kKernelJitter;
        std::vector<double> k(cov_.begin() + static_cast<long>(c * n_),
                              cov_.begin() + static_cast<long>((c + 1) * n_));
        const double resid = (y - mean_[c]) / s;
        for (std::size_t i = 0; i < n_; ++i) {
            mean_[i] += k[i] * resid;
            for (std::size_t j = 0; j < n_; ++j) cov_[i * n_ + j] -= k[i] * k[j] / s;
        }
    }

    GpPosterior posterior() const {
        GpPosterior p{mean_, std::vector<double>(n_)};
        for (std::size_t i = 0; i < n_; ++i) p.sd[i] = std::sqrt(std::max(0.0, cov_[i * n_ + i]));
        return p;
    }

private:
    void sync(const Trial& trial) {
        const bool new_block = blocks_.changed(trial);
        if (n_ == 0 || new_block) {
            reset(trial.choice_set.size());
        } else if (trial.choice_set.size() != n_) {
            fail(ErrorKind::malformed_session,
                 "trial " + std::to_string(trial.index) + ": option grid size changed within a block");
        }
    }

    void reset(std::size_t n) {
        n_ = n;
        mean_.assign(n, 0.0);
        cov_.assign(n * n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                cov_[i * n + j] = rbf_kernel(static_cast<double>(i), static_cast<double>(j), ell_);
    }

    double beta_, bonus_, ell_, noise_;
    std::size_t n_ = 0;
    std::vector<double> mean_;
    std::vector<double> cov_;
    BlockTracker blocks_;
};

class GpUcb final : public Model {
public:
    std::string_view tag() const override { return "gp_ucb"; }
    std::vector<std::string> parameter_names(std::span<const Session>) const override {
        return {"beta", "gamma", "length_scale", "noise"};
    }
    std::unique_ptr<Agent> make_agent(const ParamVector& p) const override {
        return std::make_unique<GpUcbAgent>(p);
    }
};

inline ChoiceDistribution gp_ucb_probs(const ParamVector& params, const Session& session, std::size_t t) {
    return distribution_at(GpUcb{}, params, session, t);
}

}  // namespace cogfit::models
