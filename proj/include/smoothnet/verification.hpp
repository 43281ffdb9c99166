#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "smoothnet/engine.hpp"
#include "smoothnet/schedule.hpp"

namespace smoothnet {

struct VerificationReport {
    std::string check;
    bool pass = false;
    double worst = 0.0;     // worst-case statistic seen
    double threshold = 0.0; // pass iff worst <= threshold
    std::uint64_t samples = 0;
    std::string detail;     // names the worst balancer/pair on failure

    std::string one_line() const;
};

struct BalancerRef {
    std::uint32_t round = 0; // 1-based
    std::uint32_t index = 0; // position in the round's balancer list

    bool operator==(const BalancerRef&) const = default;
};

// Monte Carlo odd-indicator statistics. `odd` is round-major flat counts;
// pair entries hold the 2x2 joint table (n00 = trials - n11 - n10 - n01).
struct OddStats {
    std::uint64_t trials = 0;
    std::vector<std::uint64_t> odd;
    std::vector<std::size_t> round_offset; // flat index of each round's first balancer

    struct PairCounts {
        BalancerRef a, b;
        std::uint64_t n11 = 0, n10 = 0, n01 = 0;
    };
    std::vector<PairCounts> pairs;

    struct TripleCounts {
        BalancerRef a, b, c;
        std::uint64_t all_odd = 0; // joint count of a=b=c=1
    };
    std::vector<TripleCounts> triples;

    std::size_t flat_index(const BalancerRef& r) const {
        return round_offset[r.round - 1] + r.index;
    }
    double odd_fraction(const BalancerRef& r) const {
        return static_cast<double>(odd[flat_index(r)]) / static_cast<double>(trials);
    }
    double pearson(const PairCounts& p) const;
};

using BalancerPairs = std::vector<std::pair<BalancerRef, BalancerRef>>;
using BalancerTriples = std::vector<std::array<BalancerRef, 3>>;

// Runs `trials` independent inputs through the unperturbed schedule and
// counts odd indicators, plus joint counts for the requested pairs and
// triples. Parallel over trials with per-thread counters merged at the end;
// the serial version is the reference kept for testing.
OddStats collect_odd_stats(const Schedule& s, std::uint64_t trials,
                           std::uint64_t base_seed, const InputDist& dist,
                           const BalancerPairs& pairs = {},
                           const BalancerTriples& triples = {});
OddStats collect_odd_stats_serial(const Schedule& s, std::uint64_t trials,
                                  std::uint64_t base_seed, const InputDist& dist,
                                  const BalancerPairs& pairs = {},
                                  const BalancerTriples& triples = {});

// Every balancer of a fixed-orientation CCC sees an odd sum with empirical
// probability 1/2 (up to `tolerance`) under per-wire uniform inputs. The
// input distribution is a parameter so callers can demonstrate that the
// property genuinely needs uniform inputs.
VerificationReport verify_odd_half(const Schedule& ccc, std::uint64_t trials,
                                   std::uint64_t seed, double tolerance,
                                   const InputDist& dist = InputDist::uniform());

// Pairwise independence proxy over the balancers affecting `wire`: max
// |Pearson r| over at most `max_pairs` sampled pairs, always including the
// consecutive-layer pairs connected by a path. With check_triples set, also
// compares the all-odd frequency of sampled triples against the product of
// their marginals (the third-order term pairwise tests cannot see).
VerificationReport verify_odd_independence(const Schedule& ccc, std::uint32_t wire,
                                           std::uint64_t trials, std::uint64_t seed,
                                           double corr_threshold,
                                           std::size_t max_pairs = 500,
                                           OddStats* stats_out = nullptr,
                                           bool check_triples = false);

// Exact identity y^(t) - xi^(t) == unfolded rounding deviation, checked on
// random schedules / orientations / inputs at every t. Zero tolerance.
VerificationReport verify_eq3_identity(std::uint32_t max_n, std::size_t max_rounds,
                                       std::size_t cases, std::uint64_t seed);

// Structure of the CCC tail products: closed-form entries equal the dense
// matching-matrix products exactly, the full product has off-ones norm 0,
// and the last x layers split into disjoint blocks of 2^x wires.
VerificationReport verify_ccc_structure(int log_n);

// Distribution equivalence of (orientation, alpha) and (flipped
// orientation, 1 - alpha): per-balancer effective-orientation frequencies
// agree within 4/sqrt(trials).
VerificationReport verify_remark2_symmetry(const Schedule& s, double alpha,
                                           std::uint64_t trials, std::uint64_t seed);

// Detail CSV for odd statistics: balancer id, layer, p_hat, |p_hat - 0.5|.
void write_odd_stats_csv(const Schedule& s, const OddStats& stats, std::ostream& out);

} // namespace smoothnet
