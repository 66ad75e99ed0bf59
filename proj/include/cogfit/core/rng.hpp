#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

namespace cogfit {

/// Counter-based SplitMix64 generator.
///
/// The k-th output (k = 1, 2, ...) is mix64(seed + k * 0x9E3779B97F4A7C15), so
/// a stream is fully described by (seed, counter) and reproduces bit-for-bit
/// in any language with 64-bit unsigned arithmetic. Floating-point draws use
/// the top 53 bits; normals use Box-Muller; integer draws use rejection on
/// the 64-bit range. None of the std:: distributions are used because their
/// algorithms are implementation-defined.
class SplitMix64 {
public:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

    explicit SplitMix64(std::uint64_t seed = 0, std::uint64_t counter = 0)
        : seed_(seed), counter_(counter) {}

    static constexpr std::uint64_t mix64(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t next_u64() {
        ++counter_;
        return mix64(seed_ + counter_ * kGamma);
    }

    /// Uniform on [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = next_u64();
        } while (x >= limit);
        return x % n;
    }

    double normal(double mean = 0.0, double sd = 1.0) {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        return mean + sd * r * std::cos(2.0 * std::numbers::pi * u2);
    }

    bool bernoulli(double p) { return uniform() < p; }

    /// Samples an index from a probability vector (assumed normalised).
    std::size_t categorical(std::span<const double> probs) {
        const double u = uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return i;
        }
        // u landed in the rounding gap above the cumulative sum
        for (std::size_t i = probs.size(); i-- > 0;)
            if (probs[i] > 0.0) return i;
        return probs.size() - 1;
    }

    template <class T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const auto j = static_cast<std::size_t>(below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_;
};

/// Independent child seed for a numbered sub-stream (e.g. one per game or session).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64::mix64(seed ^ SplitMix64::mix64(stream + SplitMix64::kGamma));
}

}  // namespace cogfit
