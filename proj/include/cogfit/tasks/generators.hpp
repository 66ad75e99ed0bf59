#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include "cogfit/core/rng.hpp"
#include "cogfit/tasks/spec.hpp"

namespace cogfit::tasks {

inline void require_kind(const TaskSpec& spec, TaskKind kind) {
    if (spec.kind != kind)
        fail(ErrorKind::spec, "expected a " + std::string(to_string(kind)) + " spec, got " +
                                  std::string(to_string(spec.kind)));
}

inline std::vector<std::string> option_labels(const TaskSpec& spec, const std::string& fallback, std::size_t n) {
    auto labels = spec.list("labels", fallback);
    std::set<std::string> distinct(labels.begin(), labels.end());
    if (labels.size() != n || distinct.size() != n)
        fail(ErrorKind::spec, "'labels' must list " + std::to_string(n) + " distinct labels");
    return labels;
}

// ---- horizon task ------------------------------------------------------
//
// Keys: n_games (20), noise_std (8), p_long (0.5, share of horizon-6 games),
// horizons ("1,6"), labels ("F,J"). One arm's latent mean is 40 or 60 and the
// other differs by a gap drawn from {4, 8, 12, 20, 30} in either direction.
// Payouts are rounded and clipped to 1..100.

struct HorizonGame {
    std::array<double, 2> means{};
    int horizon = 1;
    std::array<std::size_t, 4> instructed{};
    // payouts[arm][k] is what the arm pays on trial k of the game
    std::array<std::vector<double>, 2> payouts;
};

struct HorizonInstance {
    std::vector<std::string> labels;
    std::vector<HorizonGame> games;
};

inline constexpr std::size_t kInstructedTrials = 4;

inline HorizonInstance gen_horizon(const TaskSpec& spec, std::uint64_t seed) {
    require_kind(spec, TaskKind::horizon);
    const std::size_t n_games = spec.count("n_games", 20);
    const double noise = spec.nonnegative("noise_std", 8.0);
    const double p_long = spec.probability("p_long", 0.5);
    const auto horizons = spec.reals("horizons", "1,6");
    bool has_short = false, has_long = false;
    for (double h : horizons) {
        if (h != 1.0 && h != 6.0) fail(ErrorKind::spec, "horizon lengths must be 1 or 6");
        has_short = has_short || h == 1.0;
        has_long = has_long || h == 6.0;
    }
    if (horizons.empty()) fail(ErrorKind::spec, "no horizon lengths given");

    HorizonInstance inst;
    inst.labels = option_labels(spec, "F,J", 2);
    SplitMix64 rng(seed);
    constexpr std::array<double, 5> gaps{4, 8, 12, 20, 30};
    for (std::size_t g = 0; g < n_games; ++g) {
        HorizonGame game;
        const double base = rng.bernoulli(0.5) ? 60.0 : 40.0;
        const double gap = gaps[rng.below(gaps.size())] * (rng.bernoulli(0.5) ? 1.0 : -1.0);
        const bool swap = rng.bernoulli(0.5);
        game.means = swap ? std::array<double, 2>{base + gap, base} : std::array<double, 2>{base, base + gap};

        const bool is_long = rng.bernoulli(p_long);
        game.horizon = (has_long && (is_long || !has_short)) ? 6 : 1;

        // 1, 2 or 3 instructed pulls of arm 0, in shuffled order
        const std::size_t n_first = 1 + rng.below(3);
        std::vector<std::size_t> order(kInstructedTrials, 1);
        std::fill(order.begin(), order.begin() + static_cast<long>(n_first), 0);
        rng.shuffle(order);
        std::copy(order.begin(), order.end(), game.instructed.begin());

        const std::size_t length = kInstructedTrials + static_cast<std::size_t>(game.horizon);
        for (std::size_t arm = 0; arm < 2; ++arm)
            for (std::size_t k = 0; k < length; ++k)
                game.payouts[arm].push_back(std::clamp(std::round(rng.normal(game.means[arm], noise)), 1.0, 100.0));
        inst.games.push_back(std::move(game));
    }
    return inst;
}

// ---- two-step task -----------------------------------------------------
//
// Keys: n_trials (200), transition_common (0.7), drift_std (0.025),
// p_min (0.25), p_max (0.75). Spaceships F and V commonly reach planets M and S.
// Each of the four aliens pays 1 with a probability that follows a Gaussian
// random walk reflected at [p_min, p_max].

inline constexpr std::array<const char*, 2> kSpaceships{"F", "V"};
inline constexpr std::array<const char*, 2> kPlanets{"M", "S"};
inline constexpr std::array<std::array<const char*, 2>, 2> kAliens{{{"G", "W"}, {"Q", "T"}}};

struct TwoStepInstance {
    double transition_common = 0.7;
    double p_min = 0.25, p_max = 0.75;
    // reward_probs[t][planet][alien]
    std::vector<std::array<std::array<double, 2>, 2>> reward_probs;
    std::vector<double> transition_draws;
    std::vector<double> reward_draws;
};

inline double reflect(double p, double lo, double hi) {
    while (p < lo || p > hi) {
        if (p > hi) p = 2.0 * hi - p;
        if (p < lo) p = 2.0 * lo - p;
    }
    return p;
}

inline TwoStepInstance gen_two_step(const TaskSpec& spec, std::uint64_t seed) {
    require_kind(spec, TaskKind::two_step);
    TwoStepInstance inst;
    const std::size_t n = spec.count("n_trials", 200);
    inst.transition_common = spec.probability("transition_common", 0.7);
    const double drift = spec.nonnegative("drift_std", 0.025);
    inst.p_min = spec.probability("p_min", 0.25);
    inst.p_max = spec.probability("p_max", 0.75);
    if (!(inst.p_min < inst.p_max)) fail(ErrorKind::spec, "p_min must be below p_max");

    SplitMix64 rng(seed);
    std::array<std::array<double, 2>, 2> p{};
    for (auto& planet : p)
        for (double& v : planet) v = rng.uniform(inst.p_min, inst.p_max);
    for (std::size_t t = 0; t < n; ++t) {
        inst.reward_probs.push_back(p);
        inst.transition_draws.push_back(rng.uniform());
        inst.reward_draws.push_back(rng.uniform());
        for (auto& planet : p)
            for (double& v : planet) v = reflect(v + rng.normal(0.0, drift), inst.p_min, inst.p_max);
    }
    return inst;
}

// ---- multi-attribute decisions ----------------------------------------
//
// Keys: n_trials (100). Each trial pairs two distinct 4-bit expert-rating vectors.

struct CuePair {
    std::array<double, 4> a{};
    std::array<double, 4> b{};
};

inline std::array<double, 4> bits_of(std::uint64_t code) {
    return {double((code >> 3) & 1u), double((code >> 2) & 1u), double((code >> 1) & 1u), double(code & 1u)};
}

inline std::vector<CuePair> gen_multi_attribute(const TaskSpec& spec, std::uint64_t seed) {
    require_kind(spec, TaskKind::multi_attribute);
    const std::size_t n = spec.count("n_trials", 100);
    SplitMix64 rng(seed);
    std::vector<CuePair> out;
    out.reserve(n);
    for (std::size_t t = 0; t < n; ++t) {
        const std::uint64_t x = rng.below(16);
        std::uint64_t y = rng.below(15);
        if (y >= x) ++y;
        out.push_back({bits_of(x), bits_of(y)});
    }
    return out;
}

// ---- k-armed bandit ----------------------------------------------------
//
// Keys: n_arms (2), n_trials (100), n_blocks (1), noise_std (1), means
// (comma list; otherwise drawn N(0, 1) per block). Labels default to A, B, ...

struct BanditInstance {
    std::vector<std::string> labels;
    std::size_t trials_per_block = 0;
    // payouts[block][arm][k]
    std::vector<std::vector<std::vector<double>>> payouts;
};

inline std::string letter_labels(std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i) out += ',';
        out += i < 26 ? std::string(1, static_cast<char>('A' + i)) : "O" + std::to_string(i);
    }
    return out;
}

inline BanditInstance gen_bandit(const TaskSpec& spec, std::uint64_t seed) {
    require_kind(spec, TaskKind::bandit);
    const std::size_t arms = spec.count("n_arms", 2);
    BanditInstance inst;
    inst.labels = option_labels(spec, letter_labels(arms), arms);
    inst.trials_per_block = spec.count("n_trials", 100);
    const std::size_t blocks = spec.count("n_blocks", 1);
    const double noise = spec.nonnegative("noise_std", 1.0);
    std::vector<double> fixed;
    if (spec.has("means")) {
        fixed = spec.reals("means", "");
        if (fixed.size() != arms) fail(ErrorKind::spec, "'means' must list one value per arm");
    }
    SplitMix64 rng(seed);
    for (std::size_t b = 0; b < blocks; ++b) {
        std::vector<double> means = fixed;
        if (means.empty())
            for (std::size_t a = 0; a < arms; ++a) means.push_back(rng.normal());
        std::vector<std::vector<double>> block(arms);
        for (std::size_t a = 0; a < arms; ++a)
            for (std::size_t k = 0; k < inst.trials_per_block; ++k) block[a].push_back(rng.normal(means[a], noise));
        inst.payouts.push_back(std::move(block));
    }
    return inst;
}

// ---- intertemporal choice ---------------------------------------------
//
// Keys: n_trials (100). A smaller-sooner reward x in [1, 10] at delay 0 against
// a larger-later reward x (1 + g), g in [0.1, 1.5], at a delay of 1..60 days.

struct IntertemporalOption {
    double reward = 0.0;
    double delay = 0.0;
};

struct IntertemporalInstance {
    std::vector<std::array<IntertemporalOption, 2>> trials;
};

inline IntertemporalInstance gen_intertemporal(const TaskSpec& spec, std::uint64_t seed) {
    require_kind(spec, TaskKind::intertemporal);
    const std::size_t n = spec.count("n_trials", 100);
    SplitMix64 rng(seed);
    IntertemporalInstance inst;
    for (std::size_t t = 0; t < n; ++t) {
        const double now = std::round(rng.uniform(1.0, 10.0) * 10.0) / 10.0;
        const double later = std::round(now * (1.0 + rng.uniform(0.1, 1.5)) * 10.0) / 10.0;
        const double delay = static_cast<double>(1 + rng.below(60));
        inst.trials.push_back({IntertemporalOption{now, 0.0}, IntertemporalOption{later, delay}});
    }
    return inst;
}

// ---- spatially correlated bandit --------------------------------------
//
// Keys: n_options (8), n_trials (20 per block), n_blocks (10),
// length_scale (2), noise_std (0.3). Each block draws a latent payoff
// function over positions 1..n from a zero-mean RBF Gaussian process.

struct SpatialInstance {
    std::size_t n_options = 0;
    std::size_t trials_per_block = 0;
    std::vector<std::vector<double>> latent;   // [block][option]
    std::vector<std::vector<std::vector<double>>> payouts;  // [block][option][k]
};

inline SpatialInstance gen_spatial_bandit(const TaskSpec& spec, std::uint64_t seed) {
    require_kind(spec, TaskKind::spatial_bandit);
    SpatialInstance inst;
    inst.n_options = spec.count("n_options", 8);
    inst.trials_per_block = spec.count("n_trials", 20);
    const std::size_t blocks = spec.count("n_blocks", 10);
    const double ell = spec.real("length_scale", 2.0);
    const double noise = spec.nonnegative("noise_std", 0.3);
    if (!(ell > 0.0)) fail(ErrorKind::spec, "'length_scale' must be positive");

    const auto n = static_cast<Eigen::Index>(inst.n_options);
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double d = static_cast<double>(i - j);
            k(i, j) = std::exp(-d * d / (2.0 * ell * ell)) + (i == j ? 1e-6 : 0.0);
        }
    const Eigen::MatrixXd chol = Eigen::LLT<Eigen::MatrixXd>(k).matrixL();

    SplitMix64 rng(seed);
    for (std::size_t b = 0; b < blocks; ++b) {
        Eigen::VectorXd z(n);
        for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
        const Eigen::VectorXd f = chol * z;
        std::vector<double> latent(f.data(), f.data() + n);
        std::vector<std::vector<double>> block(inst.n_options);
        for (std::size_t o = 0; o < inst.n_options; ++o)
            for (std::size_t t = 0; t < inst.trials_per_block; ++t) block[o].push_back(rng.normal(latent[o], noise));
        inst.latent.push_back(std::move(latent));
        inst.payouts.push_back(std::move(block));
    }
    return inst;
}

}  // namespace cogfit::tasks
