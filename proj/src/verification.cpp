#include "smoothnet/verification.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "smoothnet/parallel.hpp"
#include "smoothnet/rng.hpp"
#include "smoothnet/spectral.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace smoothnet {

std::string VerificationReport::one_line() const {
    char buf[512];
    std::snprintf(buf, sizeof(buf), "%s %s worst=%.6g threshold=%.6g samples=%llu%s%s",
                  pass ? "PASS" : "FAIL", check.c_str(), worst, threshold,
                  static_cast<unsigned long long>(samples),
                  detail.empty() ? "" : " ", detail.c_str());
    return buf;
}

double OddStats::pearson(const PairCounts& p) const {
    const double n = static_cast<double>(trials);
    const double pa = static_cast<double>(p.n11 + p.n10) / n;
    const double pb = static_cast<double>(p.n11 + p.n01) / n;
    const double va = pa * (1.0 - pa);
    const double vb = pb * (1.0 - pb);
    if (va <= 0.0 || vb <= 0.0) return 0.0;
    const double cov = static_cast<double>(p.n11) / n - pa * pb;
    return cov / std::sqrt(va * vb);
}

namespace {

struct OddLayout {
    std::vector<std::size_t> round_offset;
    std::size_t total = 0;
};

OddLayout layout_of(const Schedule& s) {
    OddLayout l;
    l.round_offset.reserve(s.num_rounds());
    for (std::size_t r = 1; r <= s.num_rounds(); ++r) {
        l.round_offset.push_back(l.total);
        l.total += s.round(r).balancers.size();
    }
    return l;
}

struct TrialAccum {
    std::vector<std::uint64_t> odd;
    std::vector<std::uint64_t> n11, n10, n01;
    std::vector<std::uint64_t> all3;

    void init(std::size_t balancers, std::size_t pairs, std::size_t triples) {
        odd.assign(balancers, 0);
        n11.assign(pairs, 0);
        n10.assign(pairs, 0);
        n01.assign(pairs, 0);
        all3.assign(triples, 0);
    }
    void merge(const TrialAccum& other) {
        for (std::size_t i = 0; i < odd.size(); ++i) odd[i] += other.odd[i];
        for (std::size_t i = 0; i < n11.size(); ++i) {
            n11[i] += other.n11[i];
            n10[i] += other.n10[i];
            n01[i] += other.n01[i];
        }
        for (std::size_t i = 0; i < all3.size(); ++i) all3[i] += other.all3[i];
    }
};

// One trial: draw an input, run the unperturbed schedule, fold the odd
// indicators into the accumulator.
void run_trial(const Schedule& s, const PerturbationPlan& no_flips,
               const InputDist& dist, std::uint64_t seed, const OddLayout& layout,
               const std::vector<std::pair<std::size_t, std::size_t>>& flat_pairs,
               const std::vector<std::array<std::size_t, 3>>& flat_triples,
               TrialAccum& acc, std::vector<std::uint8_t>& odd_bits) {
    Rng rng(seed);
    const LoadVector input = sample_input(dist, s.n(), rng);
    RunTrace trace;
    run_discrete(s, no_flips, input, RunOptions{.trace = true}, &trace);
    for (std::size_t r = 0; r < trace.rho_sign.size(); ++r) {
        const auto& signs = trace.rho_sign[r];
        const std::size_t base = layout.round_offset[r];
        for (std::size_t i = 0; i < signs.size(); ++i) {
            const bool odd = signs[i] != 0;
            odd_bits[base + i] = odd;
            acc.odd[base + i] += odd;
        }
    }
    for (std::size_t p = 0; p < flat_pairs.size(); ++p) {
        const bool a = odd_bits[flat_pairs[p].first];
        const bool b = odd_bits[flat_pairs[p].second];
        if (a && b) ++acc.n11[p];
        else if (a) ++acc.n10[p];
        else if (b) ++acc.n01[p];
    }
    for (std::size_t t = 0; t < flat_triples.size(); ++t)
        acc.all3[t] += odd_bits[flat_triples[t][0]] && odd_bits[flat_triples[t][1]] &&
                       odd_bits[flat_triples[t][2]];
}

OddStats collect_impl(const Schedule& s, std::uint64_t trials, std::uint64_t base_seed,
                      const InputDist& dist, const BalancerPairs& pairs,
                      const BalancerTriples& triples, bool parallel) {
    if (trials == 0) throw std::invalid_argument("collect_odd_stats: trials must be >= 1");
    const OddLayout layout = layout_of(s);
    std::vector<std::pair<std::size_t, std::size_t>> flat_pairs;
    flat_pairs.reserve(pairs.size());
    for (const auto& [a, b] : pairs)
        flat_pairs.emplace_back(layout.round_offset[a.round - 1] + a.index,
                                layout.round_offset[b.round - 1] + b.index);
    std::vector<std::array<std::size_t, 3>> flat_triples;
    flat_triples.reserve(triples.size());
    for (const auto& t : triples)
        flat_triples.push_back({layout.round_offset[t[0].round - 1] + t[0].index,
                                layout.round_offset[t[1].round - 1] + t[1].index,
                                layout.round_offset[t[2].round - 1] + t[2].index});

    const PerturbationPlan no_flips = sample_plan(s, 0.0, 0);
    const int nt = parallel ? worker_count() : 1;
    std::vector<TrialAccum> accums(static_cast<std::size_t>(nt));
    for (auto& a : accums) a.init(layout.total, flat_pairs.size(), flat_triples.size());

#pragma omp parallel num_threads(nt) if (parallel)
    {
#ifdef _OPENMP
        const int tid = omp_get_thread_num();
#else
        const int tid = 0;
#endif
        std::vector<std::uint8_t> odd_bits(layout.total, 0);
#pragma omp for schedule(static)
        for (std::int64_t t = 0; t < static_cast<std::int64_t>(trials); ++t)
            run_trial(s, no_flips, dist, base_seed + static_cast<std::uint64_t>(t),
                      layout, flat_pairs, flat_triples,
                      accums[static_cast<std::size_t>(tid)], odd_bits);
    }

    for (std::size_t i = 1; i < accums.size(); ++i) accums[0].merge(accums[i]);

    OddStats stats;
    stats.trials = trials;
    stats.odd = std::move(accums[0].odd);
    stats.round_offset = layout.round_offset;
    stats.pairs.reserve(pairs.size());
    for (std::size_t p = 0; p < pairs.size(); ++p)
        stats.pairs.push_back(OddStats::PairCounts{pairs[p].first, pairs[p].second,
                                                   accums[0].n11[p], accums[0].n10[p],
                                                   accums[0].n01[p]});
    stats.triples.reserve(triples.size());
    for (std::size_t t = 0; t < triples.size(); ++t)
        stats.triples.push_back(OddStats::TripleCounts{triples[t][0], triples[t][1],
                                                       triples[t][2], accums[0].all3[t]});
    return stats;
}

} // namespace

OddStats collect_odd_stats(const Schedule& s, std::uint64_t trials,
                           std::uint64_t base_seed, const InputDist& dist,
                           const BalancerPairs& pairs, const BalancerTriples& triples) {
    return collect_impl(s, trials, base_seed, dist, pairs, triples, true);
}

OddStats collect_odd_stats_serial(const Schedule& s, std::uint64_t trials,
                                  std::uint64_t base_seed, const InputDist& dist,
                                  const BalancerPairs& pairs,
                                  const BalancerTriples& triples) {
    return collect_impl(s, trials, base_seed, dist, pairs, triples, false);
}

VerificationReport verify_odd_half(const Schedule& ccc, std::uint64_t trials,
                                   std::uint64_t seed, double tolerance,
                                   const InputDist& dist) {
    if (!ccc_log_n(ccc))
        throw std::invalid_argument("verify_odd_half: schedule is not a CCC");
    if (trials < 1000)
        throw std::invalid_argument("verify_odd_half: need at least 1000 trials");

    const OddStats stats = collect_odd_stats(ccc, trials, seed, dist);
    VerificationReport rep;
    rep.check = "odd-half";
    rep.threshold = tolerance;
    rep.samples = trials;
    double worst = 0.0;
    std::size_t worst_round = 0, worst_idx = 0;
    std::size_t flat = 0;
    for (std::size_t r = 1; r <= ccc.num_rounds(); ++r)
        for (std::size_t i = 0; i < ccc.round(r).balancers.size(); ++i, ++flat) {
            const double p = static_cast<double>(stats.odd[flat]) /
                             static_cast<double>(trials);
            const double dev = std::abs(p - 0.5);
            if (dev > worst) {
                worst = dev;
                worst_round = r;
                worst_idx = i;
            }
        }
    rep.worst = worst;
    rep.pass = worst <= tolerance;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "worst balancer: round %zu index %zu",
                  worst_round, worst_idx);
    rep.detail = buf;
    return rep;
}

VerificationReport verify_odd_independence(const Schedule& ccc, std::uint32_t wire,
                                           std::uint64_t trials, std::uint64_t seed,
                                           double corr_threshold, std::size_t max_pairs,
                                           OddStats* stats_out, bool check_triples) {
    const auto log_n = ccc_log_n(ccc);
    if (!log_n)
        throw std::invalid_argument("verify_odd_independence: schedule is not a CCC");
    if (wire >= ccc.n())
        throw std::invalid_argument("verify_odd_independence: wire out of range");
    if (trials < 10000)
        throw std::invalid_argument("verify_odd_independence: need at least 10^4 trials");

    const AffectingSet aff = affecting_sets(ccc, wire);
    std::vector<BalancerRef> members;
    for (std::size_t r = 1; r <= ccc.num_rounds(); ++r)
        for (std::uint32_t idx : aff.per_round[r - 1])
            members.push_back(BalancerRef{static_cast<std::uint32_t>(r), idx});

    // Consecutive-layer pairs connected by a path first (the interesting
    // case), then uniformly sampled distinct pairs up to the budget.
    std::vector<std::pair<BalancerRef, BalancerRef>> selected;
    for (std::size_t r = 1; r < ccc.num_rounds(); ++r) {
        for (std::uint32_t ia : aff.per_round[r - 1]) {
            const Balancer& a = ccc.round(r).balancers[ia];
            for (std::uint32_t ib : aff.per_round[r]) {
                const Balancer& b = ccc.round(r + 1).balancers[ib];
                const bool connected = a.u == b.u || a.u == b.v || a.v == b.u || a.v == b.v;
                if (connected && selected.size() < max_pairs)
                    selected.emplace_back(BalancerRef{static_cast<std::uint32_t>(r), ia},
                                          BalancerRef{static_cast<std::uint32_t>(r + 1), ib});
            }
        }
    }
    Rng rng(seed ^ 0x70617273ULL);
    const std::size_t want = std::min(
        max_pairs, members.size() * (members.size() - 1) / 2);
    std::size_t attempts = 0;
    while (selected.size() < want && attempts < 50 * max_pairs) {
        ++attempts;
        const std::size_t i = rng.next_below(members.size());
        const std::size_t j = rng.next_below(members.size());
        if (i == j) continue;
        auto cand = std::pair{members[std::min(i, j)], members[std::max(i, j)]};
        if (std::find(selected.begin(), selected.end(), cand) != selected.end()) continue;
        selected.push_back(cand);
    }

    BalancerTriples triples;
    if (check_triples && members.size() >= 3) {
        const std::size_t want3 = std::min<std::size_t>(200, max_pairs);
        while (triples.size() < want3) {
            std::size_t i = rng.next_below(members.size());
            std::size_t j = rng.next_below(members.size());
            std::size_t k = rng.next_below(members.size());
            if (i == j || j == k || i == k) continue;
            if (i > j) std::swap(i, j);
            if (j > k) std::swap(j, k);
            if (i > j) std::swap(i, j);
            triples.push_back({members[i], members[j], members[k]});
        }
    }

    const OddStats stats =
        collect_odd_stats(ccc, trials, seed, InputDist::uniform(), selected, triples);
    VerificationReport rep;
    rep.check = "odd-independence";
    rep.threshold = corr_threshold;
    rep.samples = trials;
    double worst = 0.0;
    std::size_t worst_pair = 0;
    for (std::size_t p = 0; p < stats.pairs.size(); ++p) {
        const double r = std::abs(stats.pearson(stats.pairs[p]));
        if (r > worst) {
            worst = r;
            worst_pair = p;
        }
    }
    rep.worst = worst;
    rep.pass = worst <= corr_threshold;
    if (!stats.pairs.empty()) {
        const auto& wp = stats.pairs[worst_pair];
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "pairs=%zu worst pair: (round %u idx %u)-(round %u idx %u)",
                      stats.pairs.size(), wp.a.round, wp.a.index, wp.b.round, wp.b.index);
        rep.detail = buf;
    }

    if (!stats.triples.empty()) {
        // third-order term: all-odd frequency vs product of marginals,
        // 4 sigma of a Bernoulli(1/8) frequency under independence
        const double n = static_cast<double>(trials);
        const double triple_threshold = 4.0 * std::sqrt((1.0 / 8.0) * (7.0 / 8.0) / n);
        double worst3 = 0.0;
        for (const auto& t : stats.triples) {
            const double pa = stats.odd_fraction(t.a);
            const double pb = stats.odd_fraction(t.b);
            const double pc = stats.odd_fraction(t.c);
            const double joint = static_cast<double>(t.all_odd) / n;
            worst3 = std::max(worst3, std::abs(joint - pa * pb * pc));
        }
        char buf[96];
        std::snprintf(buf, sizeof(buf), " triples=%zu worst3=%.4f threshold3=%.4f",
                      stats.triples.size(), worst3, triple_threshold);
        rep.detail += buf;
        if (worst3 > triple_threshold) rep.pass = false;
    }
    if (stats_out) *stats_out = stats;
    return rep;
}

namespace {

Matching random_matching(std::uint32_t n, Rng& rng) {
    std::vector<std::uint32_t> perm(n);
    for (std::uint32_t i = 0; i < n; ++i) perm[i] = i;
    for (std::uint32_t i = n - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.next_below(i + 1)]);
    Matching m;
    for (std::uint32_t i = 0; i + 1 < n; i += 2) {
        if (rng.next_unit() < 0.25) continue; // keep some vertices unmatched
        const std::uint32_t u = std::min(perm[i], perm[i + 1]);
        const std::uint32_t v = std::max(perm[i], perm[i + 1]);
        m.balancers.push_back(Balancer{u, v,
                                       rng.next_bernoulli(0.5) ? Orientation::TowardU
                                                               : Orientation::TowardV});
    }
    return m;
}

} // namespace

VerificationReport verify_eq3_identity(std::uint32_t max_n, std::size_t max_rounds,
                                       std::size_t cases, std::uint64_t seed) {
    VerificationReport rep;
    rep.check = "deviation-unfolding";
    rep.threshold = 0.0; // exact identity, zero tolerance
    rep.samples = cases;
    rep.pass = true;

    static const double kAlphas[] = {0.0, 0.25, 0.5};
    Rng rng(seed);
    for (std::size_t c = 0; c < cases; ++c) {
        const std::uint32_t n = 2 + static_cast<std::uint32_t>(rng.next_below(max_n - 1));
        const std::size_t rounds = 1 + rng.next_below(max_rounds);
        std::vector<Matching> ms(rounds);
        for (auto& m : ms) m = random_matching(n, rng);
        const Schedule s(n, std::move(ms));
        const double alpha = kAlphas[rng.next_below(3)];
        const PerturbationPlan plan = sample_plan(s, alpha, rng.next_u64());
        LoadVector input(n);
        for (auto& x : input) x = static_cast<std::int64_t>(rng.next_below(2 * n));

        RunTrace trace;
        run_discrete(s, plan, input, RunOptions{.trace = true, .snapshots = true}, &trace);

        // exact ideal prefix at full scale, advanced round by round
        const int scale = static_cast<int>(rounds);
        DyadicVector ideal = make_dyadic(input, scale);
        for (std::size_t t = 1; t <= rounds; ++t) {
            for (const Balancer& b : s.round(t).balancers)
                average_entry_pair(ideal, b.u, b.v);
            const DyadicVector dev = unfold_deviation(s, trace, t);
            const LoadVector& y = trace.snapshots[t];
            for (std::uint32_t i = 0; i < n; ++i) {
                const int128 lhs = (static_cast<int128>(y[i]) << scale) - ideal.num[i];
                const int128 rhs = dev.num[i] << (scale - static_cast<int>(t));
                if (lhs != rhs) {
                    rep.pass = false;
                    rep.worst = 1.0;
                    rep.detail = "case " + std::to_string(c) + " t=" + std::to_string(t) +
                                 " vertex " + std::to_string(i);
                    return rep;
                }
            }
        }
    }
    return rep;
}

VerificationReport verify_ccc_structure(int log_n) {
    if (log_n < 1 || log_n > 8)
        throw std::invalid_argument("verify_ccc_structure: log_n must be in [1,8]");
    VerificationReport rep;
    rep.check = "ccc-structure";
    rep.threshold = 1e-9;
    rep.pass = true;

    const Schedule s = build_ccc(log_n, CccOrientation::AllUp);
    const std::uint32_t n = s.n();
    rep.samples = static_cast<std::uint64_t>(log_n + 1) * n * n;

    // tail products against the closed form, exact dyadic equality
    DenseMatrix tail = DenseMatrix::identity(n); // P^[k, log n] for k = log n + 1
    for (int k = log_n + 1; k >= 1; --k) {
        for (std::uint32_t u = 0; u < n; ++u)
            for (std::uint32_t v = 0; v < n; ++v) {
                if (tail.at(u, v) != ccc_product_entry(log_n, k, u, v).value()) {
                    rep.pass = false;
                    rep.worst = 1.0;
                    rep.detail = "product entry mismatch at k=" + std::to_string(k);
                    return rep;
                }
            }
        if (k > 1)
            tail = multiply(matching_matrix(s.round(static_cast<std::size_t>(k - 1)), n),
                            tail);
    }

    const double lam = lambda_offones(s, 1, s.num_rounds());
    rep.worst = std::max(rep.worst, lam);
    if (lam > 1e-9) {
        rep.pass = false;
        rep.detail = "full product off-ones norm " + std::to_string(lam);
        return rep;
    }

    // last x layers decompose into n/2^x disjoint blocks of 2^x wires
    for (int x = 1; x <= log_n; ++x) {
        for (std::size_t r = static_cast<std::size_t>(log_n - x + 1);
             r <= s.num_rounds(); ++r)
            for (const Balancer& b : s.round(r).balancers)
                if ((b.u >> x) != (b.v >> x)) {
                    rep.pass = false;
                    rep.worst = 1.0;
                    rep.detail = "block decomposition violated at x=" + std::to_string(x);
                    return rep;
                }
    }
    return rep;
}

VerificationReport verify_remark2_symmetry(const Schedule& s, double alpha,
                                           std::uint64_t trials, std::uint64_t seed) {
    if (trials < 10000)
        throw std::invalid_argument("verify_remark2_symmetry: need at least 10^4 trials");
    const Schedule flipped = flip_all_orientations(s);
    const std::size_t count = s.balancer_count();
    std::vector<std::uint64_t> up_a(count, 0), up_b(count, 0);

    for (std::uint64_t t = 0; t < trials; ++t) {
        const PerturbationPlan pa = sample_plan(s, alpha, seed + t);
        const PerturbationPlan pb = sample_plan(flipped, 1.0 - alpha, seed + trials + t);
        std::size_t flat = 0;
        for (std::size_t r = 1; r <= s.num_rounds(); ++r)
            for (std::size_t i = 0; i < s.round(r).balancers.size(); ++i, ++flat) {
                if (effective_orientation(s.round(r).balancers[i], pa.flipped(r, i)) ==
                    Orientation::TowardU)
                    ++up_a[flat];
                if (effective_orientation(flipped.round(r).balancers[i], pb.flipped(r, i)) ==
                    Orientation::TowardU)
                    ++up_b[flat];
            }
    }

    VerificationReport rep;
    rep.check = "flip-symmetry";
    rep.threshold = 4.0 / std::sqrt(static_cast<double>(trials));
    rep.samples = trials;
    double worst = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double fa = static_cast<double>(up_a[i]) / static_cast<double>(trials);
        const double fb = static_cast<double>(up_b[i]) / static_cast<double>(trials);
        worst = std::max(worst, std::abs(fa - fb));
    }
    rep.worst = worst;
    rep.pass = worst <= rep.threshold;
    return rep;
}

void write_odd_stats_csv(const Schedule& s, const OddStats& stats, std::ostream& out) {
    out << "round,index,u,v,p_hat,abs_dev\n";
    std::size_t flat = 0;
    for (std::size_t r = 1; r <= s.num_rounds(); ++r)
        for (std::size_t i = 0; i < s.round(r).balancers.size(); ++i, ++flat) {
            const Balancer& b = s.round(r).balancers[i];
            const double p =
                static_cast<double>(stats.odd[flat]) / static_cast<double>(stats.trials);
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%zu,%zu,%u,%u,%.6f,%.6f\n", r, i, b.u, b.v,
                          p, std::abs(p - 0.5));
            out << buf;
        }
}

} // namespace smoothnet
