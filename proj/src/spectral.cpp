#include "smoothnet/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "smoothnet/parallel.hpp"
#include "smoothnet/rng.hpp"

namespace smoothnet {

namespace {

constexpr std::size_t kJacobiMaxN = 256;  // full decomposition below, power iteration above
constexpr std::size_t kDenseMaxN = 1024;  // largest n for dense product chains

double log2n(std::uint32_t n) { return std::log2(static_cast<double>(n)); }

} // namespace

DenseMatrix DenseMatrix::identity(std::size_t n) {
    DenseMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
    return m;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
    const std::size_t n = a.n();
    if (b.n() != n) throw std::invalid_argument("multiply: size mismatch");
    DenseMatrix c(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const double aik = a.at(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) c.at(i, j) += aik * b.at(k, j);
        }
    return c;
}

DenseMatrix matching_matrix(const Matching& m, std::uint32_t n) {
    DenseMatrix p = DenseMatrix::identity(n);
    for (const Balancer& b : m.balancers) {
        if (b.v >= n) throw std::invalid_argument("matching_matrix: vertex out of range");
        p.at(b.u, b.u) = 0.5;
        p.at(b.v, b.v) = 0.5;
        p.at(b.u, b.v) = 0.5;
        p.at(b.v, b.u) = 0.5;
    }
    return p;
}

DenseMatrix schedule_product(const Schedule& s, std::size_t first, std::size_t last) {
    if (last > s.num_rounds())
        throw std::invalid_argument("schedule_product: round range out of bounds");
    if (s.n() > kDenseMaxN)
        throw std::invalid_argument("schedule_product: n too large for dense matrices");
    DenseMatrix acc = DenseMatrix::identity(s.n());
    if (first <= last)
        for (std::size_t r = first; r <= last; ++r)
            acc = multiply(acc, matching_matrix(s.round(r), s.n()));
    return acc;
}

void apply_matching(std::vector<double>& v, const Matching& m) {
    for (const Balancer& b : m.balancers) {
        const double avg = 0.5 * (v[b.u] + v[b.v]);
        v[b.u] = avg;
        v[b.v] = avg;
    }
}

std::vector<double> symmetric_eigenvalues(DenseMatrix m) {
    const std::size_t n = m.n();
    // cyclic Jacobi; plenty for the sizes the dense path allows
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += m.at(p, q) * m.at(p, q);
        if (off < 1e-26) break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m.at(p, q);
                if (std::abs(apq) < 1e-300) continue;
                const double app = m.at(p, p), aqq = m.at(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double sn = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = m.at(k, p), akq = m.at(k, q);
                    m.at(k, p) = c * akp - sn * akq;
                    m.at(k, q) = sn * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = m.at(p, k), aqk = m.at(q, k);
                    m.at(p, k) = c * apk - sn * aqk;
                    m.at(q, k) = sn * apk + c * aqk;
                }
            }
    }
    std::vector<double> eig(n);
    for (std::size_t i = 0; i < n; ++i) eig[i] = m.at(i, i);
    std::sort(eig.begin(), eig.end());
    return eig;
}

namespace {

void check_doubly_stochastic(const DenseMatrix& a) {
    const std::size_t n = a.n();
    for (std::size_t i = 0; i < n; ++i) {
        double row = 0.0, col = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            row += a.at(i, j);
            col += a.at(j, i);
        }
        if (std::abs(row - 1.0) > 1e-9 || std::abs(col - 1.0) > 1e-9)
            throw std::invalid_argument("lambda_offones: matrix is not doubly stochastic");
    }
}

void deflate_ones(std::vector<double>& v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    for (double& x : v) x -= mean;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

// Power iteration for the largest eigenvalue of M restricted to ones-perp,
// where apply_m computes w = M v for a symmetric PSD operator M.
template <typename ApplyM>
double power_iteration_offones(std::size_t n, ApplyM&& apply_m) {
    Rng rng(0x51ec7a11u);
    std::vector<double> v(n);
    for (double& x : v) x = rng.next_unit() - 0.5;
    deflate_ones(v);
    double nv = norm2(v);
    if (nv == 0.0) return 0.0;
    for (double& x : v) x /= nv;

    std::vector<double> w(n);
    double prev = -1.0;
    for (int iter = 0; iter < 20000; ++iter) {
        apply_m(v, w);
        deflate_ones(w);
        double ray = 0.0;
        for (std::size_t i = 0; i < n; ++i) ray += v[i] * w[i];
        const double nw = norm2(w);
        if (nw < 1e-150) return 0.0;
        for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
        if (iter > 4 && std::abs(ray - prev) <= 1e-14 * std::max(1.0, std::abs(ray)))
            return std::max(ray, 0.0);
        prev = ray;
    }
    return std::max(prev, 0.0);
}

} // namespace

double lambda_offones(const DenseMatrix& a) {
    check_doubly_stochastic(a);
    const std::size_t n = a.n();
    if (n <= kJacobiMaxN) {
        // M = A^T A - J/n has the squared off-ones norm as its top eigenvalue
        DenseMatrix m(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k) s += a.at(k, i) * a.at(k, j);
                m.at(i, j) = s - 1.0 / static_cast<double>(n);
            }
        const std::vector<double> eig = symmetric_eigenvalues(m);
        return std::sqrt(std::max(eig.back(), 0.0));
    }
    const double sq = power_iteration_offones(n, [&](const std::vector<double>& v,
                                                     std::vector<double>& w) {
        std::vector<double> av(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double vi = v[i];
            if (vi == 0.0) continue;
            for (std::size_t j = 0; j < n; ++j) av[j] += vi * a.at(i, j);
        }
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += av[k] * a.at(j, k);
            w[j] = s;
        }
    });
    return std::sqrt(sq);
}

double lambda_offones(const Schedule& s, std::size_t first, std::size_t last) {
    if (last > s.num_rounds() || (first > last && first != last + 1))
        throw std::invalid_argument("lambda_offones: round range out of bounds");
    if (s.n() <= kJacobiMaxN) return lambda_offones(schedule_product(s, first, last));
    const std::size_t n = s.n();
    // v (A^T A): forward sweep for A, reverse sweep for A^T (each P symmetric)
    const double sq = power_iteration_offones(n, [&](const std::vector<double>& v,
                                                     std::vector<double>& w) {
        w = v;
        for (std::size_t r = first; r <= last; ++r) apply_matching(w, s.round(r));
        for (std::size_t r = last; r >= first && r >= 1; --r)
            apply_matching(w, s.round(r));
    });
    return std::sqrt(sq);
}

double lambda1(const Schedule& s, std::size_t t1, std::size_t t2, std::uint32_t wire) {
    if (t2 > s.num_rounds() || t1 >= t2)
        throw std::invalid_argument("lambda1: need t1 < t2 <= rounds");
    if (wire >= s.n()) throw std::invalid_argument("lambda1: wire out of range");
    std::vector<double> c(s.n(), 0.0);
    c[wire] = 1.0;
    double acc = 0.0;
    for (std::size_t i = t2 - 1; i >= 1; --i) {
        apply_matching(c, s.round(i + 1)); // c = P^[i+1,t2] e_wire
        if (i <= t1)
            for (const Balancer& b : s.round(i).balancers) {
                const double d = c[b.u] - c[b.v];
                acc += d * d;
            }
    }
    return std::sqrt(log2n(s.n()) * acc);
}

namespace {

template <bool Parallel>
double lambda1_max(const Schedule& s, std::size_t t1, std::size_t t2) {
    const std::uint32_t n = s.n();
    std::vector<double> per_wire(n, 0.0);
    if constexpr (Parallel) {
        const int nt = worker_count();
#pragma omp parallel for schedule(static) num_threads(nt)
        for (std::int64_t w = 0; w < static_cast<std::int64_t>(n); ++w)
            per_wire[static_cast<std::size_t>(w)] =
                lambda1(s, t1, t2, static_cast<std::uint32_t>(w));
    } else {
        for (std::uint32_t w = 0; w < n; ++w) per_wire[w] = lambda1(s, t1, t2, w);
    }
    double best = 0.0;
    for (double x : per_wire) best = std::max(best, x);
    return best;
}

} // namespace

double lambda1_all(const Schedule& s, std::size_t t1, std::size_t t2) {
    return lambda1_max<true>(s, t1, t2);
}

double lambda1_all_serial(const Schedule& s, std::size_t t1, std::size_t t2) {
    return lambda1_max<false>(s, t1, t2);
}

std::string BoundReport::to_kv() const {
    char buf[320];
    std::snprintf(buf, sizeof(buf),
                  "t1=%zu t2=%zu alpha=%.10g K=%.10g main_terms=%.10g "
                  "lambda1=%.10g lambda2=%.10g total=%.10g",
                  t1, t2, alpha, K, main_terms, lambda1_term, lambda2_term, total);
    return buf;
}

std::string BoundReport::csv_header() {
    return "t1,t2,alpha,K,main_terms,lambda1,lambda2,total";
}

std::string BoundReport::csv_row() const {
    char buf[320];
    std::snprintf(buf, sizeof(buf), "%zu,%zu,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g",
                  t1, t2, alpha, K, main_terms, lambda1_term, lambda2_term, total);
    return buf;
}

BoundReport theorem1_bound(const Schedule& s, double alpha, std::size_t t1,
                           std::size_t t2, double K) {
    if (t2 > s.num_rounds() || t1 >= t2)
        throw std::invalid_argument("theorem1_bound: need t1 < t2 <= rounds");
    if (K < 0) throw std::invalid_argument("theorem1_bound: K must be nonnegative");
    BoundReport r;
    r.t1 = t1;
    r.t2 = t2;
    r.alpha = alpha;
    r.K = K;
    r.lambda1_term = t1 == 0 ? 0.0 : lambda1_all(s, t1, t2);
    r.lambda2_term =
        lambda_offones(s, 1, t2) * std::sqrt(static_cast<double>(s.n())) * K;
    r.main_terms = static_cast<double>(t2 - t1) +
                   3.0 * (0.5 - alpha) * static_cast<double>(t1);
    r.total = r.main_terms + r.lambda1_term + r.lambda2_term;
    return r;
}

PeriodicBound periodic_bound(std::uint32_t n, const std::vector<Matching>& round,
                             double alpha, double K) {
    if (round.empty()) throw std::invalid_argument("periodic_bound: empty round");
    if (K < 1) throw std::invalid_argument("periodic_bound: K must be >= 1");
    const std::size_t d = round.size();
    const Schedule one_period = build_periodic(n, round, 1);
    const double lq = lambda_offones(one_period, 1, d);
    if (lq >= 1.0 - 1e-9)
        throw DisconnectedRoundError(
            "periodic_bound: round matrix does not contract (disconnected round?)");

    const double dd = static_cast<double>(d);
    const double t_raw = 2.0 * dd * std::log2(K * static_cast<double>(n)) / (1.0 - lq);
    std::size_t total_rounds = static_cast<std::size_t>(std::ceil(t_raw));
    total_rounds = ((total_rounds + d - 1) / d) * d; // whole periods

    const double gap_raw = 2.0 * dd * std::log2(log2n(n)) / (1.0 - lq);
    std::size_t gap = static_cast<std::size_t>(std::ceil(std::max(gap_raw, 0.0)));
    if (gap < 1) gap = 1;             // t1 must stay below t2
    if (gap > total_rounds) gap = total_rounds;
    const std::size_t t1 = total_rounds - gap;

    const Schedule repeated =
        build_periodic(n, round, static_cast<int>(total_rounds / d));

    PeriodicBound out;
    out.report = theorem1_bound(repeated, alpha, t1, total_rounds, K);
    out.periods = total_rounds / d;
    out.rounds_total = total_rounds;
    out.round_length = d;
    out.lambda_q = lq;
    out.lambda1_cap = 2.0 * std::sqrt(dd) / (log2n(n) * (1.0 - lq));
    const double kn = K * static_cast<double>(n);
    out.lambda2_cap = std::sqrt(static_cast<double>(n)) * K / (kn * kn);
    return out;
}

double ccc_lower_bound(int log_n, double alpha) {
    if (log_n < 2) throw std::invalid_argument("ccc_lower_bound: log_n must be >= 2");
    const double ln = static_cast<double>(log_n);
    const double llog = std::log2(ln);
    return std::max((0.5 - alpha) * ln - 2.0 * llog, llog / 2.0);
}

EmpiricalBounds empirical_bounds(int log_n, double alpha) {
    if (log_n < 2) throw std::invalid_argument("empirical_bounds: log_n must be >= 2");
    const double ln = static_cast<double>(log_n);
    const double llog = std::log2(ln);
    const double n = std::ldexp(1.0, log_n);
    EmpiricalBounds b;
    b.upper = (0.5 - alpha) * (ln - std::ceil(llog)) + std::ceil(llog) + 4.0;
    b.lower = std::max((0.5 - alpha) * ln,
                       0.5 * (1.0 - 1.0 / n) * (std::floor(llog) - 1.0));
    return b;
}

double Dyadic::value() const { return std::ldexp(static_cast<double>(num), -log2_den); }

Dyadic ccc_product_entry(int log_n, int k, std::uint32_t u, std::uint32_t v) {
    if (log_n < 1 || log_n > 30)
        throw std::invalid_argument("ccc_product_entry: log_n out of range");
    if (k < 1 || k > log_n + 1)
        throw std::invalid_argument("ccc_product_entry: k out of range");
    const std::uint32_t n = 1u << log_n;
    if (u >= n || v >= n)
        throw std::invalid_argument("ccc_product_entry: wire out of range");
    // Rounds k..log n flip the low (log n - k + 1) bits, so the product is
    // uniform on blocks that agree on the top k-1 bits: 2^(k-1)/n inside,
    // 0 elsewhere; k = log n + 1 is the identity.
    const int shift = log_n - (k - 1);
    if ((u >> shift) != (v >> shift)) return Dyadic{0, 0};
    return Dyadic{1, shift};
}

} // namespace smoothnet
