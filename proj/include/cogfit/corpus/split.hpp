#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cogfit/core/error.hpp"
#include "cogfit/core/rng.hpp"
#include "cogfit/corpus/session.hpp"

namespace cogfit::corpus {

struct Split {
    std::vector<Session> train;
    std::vector<Session> test;
};

/// Participant-level holdout: round(fraction * n) participants (at least 1,
/// at most n - 1) go to the test half. Participant ids are sorted before a
/// seeded Fisher-Yates shuffle, so the partition depends only on the id set
/// and the seed. Session order within each half follows the input.
inline Split split_participants(const std::vector<Session>& sessions, double test_fraction,
                                std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        fail(ErrorKind::precondition, "test fraction must lie in (0, 1)");
    const std::set<std::string> ids = participants(sessions);
    if (ids.size() < 2)
        fail(ErrorKind::cannot_split, "need at least 2 distinct participants, got " +
                                          std::to_string(ids.size()));

    std::vector<std::string> order(ids.begin(), ids.end());
    SplitMix64 rng(seed);
    rng.shuffle(order);

    const auto n = static_cast<double>(order.size());
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * n));
    n_test = std::clamp<std::size_t>(n_test, 1, order.size() - 1);
    const std::set<std::string> test_ids(order.begin(), order.begin() + static_cast<long>(n_test));

    Split out;
    for (const auto& s : sessions) (test_ids.contains(s.participant_id) ? out.test : out.train).push_back(s);
    return out;
}

}  // namespace cogfit::corpus
