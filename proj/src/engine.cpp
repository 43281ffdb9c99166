#include "smoothnet/engine.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

namespace smoothnet {

namespace {

void check_input(const Schedule& s, const LoadVector& input) {
    if (input.size() != s.n())
        throw std::invalid_argument("load vector length does not match schedule");
    for (std::int64_t x : input)
        if (x < 0) throw std::invalid_argument("load vector entries must be nonnegative");
}

int bit_length(unsigned __int128 x) {
    int bits = 0;
    while (x > 0) {
        ++bits;
        x >>= 1;
    }
    return bits;
}

} // namespace

LoadVector run_discrete(const Schedule& s, const PerturbationPlan& plan,
                        const LoadVector& input) {
    return run_discrete(s, plan, input, RunOptions{}, nullptr);
}

LoadVector run_discrete(const Schedule& s, const PerturbationPlan& plan,
                        const LoadVector& input, const RunOptions& opts,
                        RunTrace* trace) {
    check_input(s, input);
    if (plan.flips.size() != s.num_rounds())
        throw std::invalid_argument("perturbation plan does not match schedule");

    LoadVector y = input;
    const bool want_trace = (opts.trace || opts.snapshots) && trace != nullptr;
    if (want_trace) {
        trace->rho_sign.assign(s.num_rounds(), {});
        trace->snapshots.clear();
        if (opts.snapshots) trace->snapshots.push_back(y);
    }

    for (std::size_t r = 1; r <= s.num_rounds(); ++r) {
        const Matching& m = s.round(r);
        std::vector<std::int8_t>* signs = nullptr;
        if (want_trace) {
            trace->rho_sign[r - 1].assign(m.balancers.size(), 0);
            signs = &trace->rho_sign[r - 1];
        }
        for (std::size_t i = 0; i < m.balancers.size(); ++i) {
            const Balancer& b = m.balancers[i];
            const std::int64_t sum = y[b.u] + y[b.v];
            const std::int64_t half = sum >> 1;
            y[b.u] = half;
            y[b.v] = half;
            if (sum & 1) {
                const Orientation eff =
                    effective_orientation(b, plan.flipped(r, i));
                if (eff == Orientation::TowardU) {
                    ++y[b.u];
                    if (signs) (*signs)[i] = 1;
                } else {
                    ++y[b.v];
                    if (signs) (*signs)[i] = -1;
                }
            }
        }
        if (want_trace && opts.snapshots) trace->snapshots.push_back(y);
    }
    return y;
}

IdealVector run_ideal(const Schedule& s, const LoadVector& input, IdealMode mode) {
    check_input(s, input);
    IdealVector out;
    out.mode = mode;
    if (mode == IdealMode::Float) {
        out.approx.assign(input.begin(), input.end());
        for (std::size_t r = 1; r <= s.num_rounds(); ++r)
            for (const Balancer& b : s.round(r).balancers) {
                const double avg = 0.5 * (out.approx[b.u] + out.approx[b.v]);
                out.approx[b.u] = avg;
                out.approx[b.v] = avg;
            }
        return out;
    }
    const int scale = static_cast<int>(s.num_rounds());
    unsigned __int128 total = 0;
    for (std::int64_t x : input) total += static_cast<unsigned __int128>(x);
    if (scale + bit_length(total) > 126)
        throw ExactOverflowError(
            "exact mode overflow: too many rounds for this load total; use Float");
    out.exact = make_dyadic(input, scale);
    for (std::size_t r = 1; r <= s.num_rounds(); ++r)
        for (const Balancer& b : s.round(r).balancers)
            average_entry_pair(out.exact, b.u, b.v);
    return out;
}

std::int64_t discrepancy(const LoadVector& v) {
    if (v.empty()) throw std::invalid_argument("discrepancy of empty vector");
    std::int64_t lo = v[0], hi = v[0];
    for (std::int64_t x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return hi - lo;
}

double discrepancy(const IdealVector& v) {
    if (v.size() == 0) throw std::invalid_argument("discrepancy of empty vector");
    if (v.mode == IdealMode::ExactDyadic) {
        int128 lo = v.exact.num[0], hi = v.exact.num[0];
        for (int128 x : v.exact.num) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        return std::ldexp(static_cast<double>(hi - lo), -v.exact.log2_scale);
    }
    double lo = v.approx[0], hi = v.approx[0];
    for (double x : v.approx) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return hi - lo;
}

DyadicVector unfold_deviation(const Schedule& s, const RunTrace& trace, std::size_t t) {
    if (t > trace.rho_sign.size())
        throw std::invalid_argument("unfold_deviation: trace is missing rounds");
    DyadicVector acc;
    acc.log2_scale = static_cast<int>(t);
    acc.num.assign(s.n(), 0);
    if (t == 0) return acc;
    const int128 half = static_cast<int128>(1) << (t - 1); // 1/2 at scale 2^t
    for (std::size_t i = 1; i <= t; ++i) {
        const Matching& m = s.round(i);
        for (const Balancer& b : m.balancers) average_entry_pair(acc, b.u, b.v);
        const auto& signs = trace.rho_sign[i - 1];
        for (std::size_t k = 0; k < m.balancers.size(); ++k) {
            if (signs[k] == 0) continue;
            const Balancer& b = m.balancers[k];
            acc.num[b.u] += signs[k] > 0 ? half : -half;
            acc.num[b.v] += signs[k] > 0 ? -half : half;
        }
    }
    return acc;
}

std::vector<double> layer_sums(const Schedule& s, const PerturbationPlan& plan,
                               const RunTrace& trace, std::uint32_t wire) {
    const auto log_n = ccc_log_n(s);
    if (!log_n) throw std::invalid_argument("layer_sums: schedule is not a CCC");
    if (wire >= s.n()) throw std::invalid_argument("layer_sums: wire out of range");
    if (trace.rho_sign.size() != s.num_rounds())
        throw std::invalid_argument("layer_sums: trace is missing rounds");

    const AffectingSet aff = affecting_sets(s, wire);
    std::vector<double> sums(s.num_rounds(), 0.0);
    for (int layer = 1; layer <= *log_n; ++layer) {
        // Exactly one endpoint of each affecting balancer keeps a path to the
        // wire; its side decides the sign of the rounding contribution.
        const bool wire_on_u_side = ((wire >> (*log_n - layer)) & 1u) == 0;
        double acc = 0.0;
        for (std::uint32_t idx : aff.per_round[static_cast<std::size_t>(layer - 1)]) {
            if (!trace.odd(static_cast<std::size_t>(layer), idx)) continue;
            const Balancer& b = s.round(static_cast<std::size_t>(layer)).balancers[idx];
            double term = psi_sign(plan, static_cast<std::size_t>(layer), idx) *
                          static_cast<double>(phi_sign(b));
            acc += wire_on_u_side ? term : -term;
        }
        sums[static_cast<std::size_t>(layer - 1)] = std::ldexp(acc, layer - *log_n);
    }
    return sums;
}

LoadVector sample_input(const InputDist& dist, std::uint32_t n, Rng& rng) {
    LoadVector v(n, 0);
    switch (dist.kind) {
    case InputDist::Kind::Uniform: {
        const std::uint64_t m =
            dist.param > 0 ? static_cast<std::uint64_t>(dist.param) : n;
        for (auto& x : v) x = static_cast<std::int64_t>(rng.next_below(m));
        break;
    }
    case InputDist::Kind::Constant:
        if (dist.param < 0) throw std::invalid_argument("constant load must be nonnegative");
        for (auto& x : v) x = dist.param;
        break;
    case InputDist::Kind::SingleHot:
        if (dist.param < 0) throw std::invalid_argument("single-hot load must be nonnegative");
        v[0] = dist.param;
        break;
    case InputDist::Kind::File: {
        LoadVector file = load_loads(dist.path);
        if (file.size() != n)
            throw std::invalid_argument("load file length does not match network size");
        v = std::move(file);
        break;
    }
    }
    return v;
}

LoadVector load_loads(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    LoadVector v;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        try {
            v.push_back(std::stoll(line));
        } catch (const std::exception&) {
            throw std::runtime_error(path + ": line " + std::to_string(lineno) +
                                     ": expected one integer per line");
        }
    }
    return v;
}

void save_loads(const LoadVector& v, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (std::int64_t x : v) out << x << '\n';
}

void write_trace_csv(const Schedule& s, const PerturbationPlan& plan,
                     const RunTrace& trace, std::ostream& out) {
    out << "round,u,v,odd,psi,phi\n";
    for (std::size_t r = 1; r <= trace.rho_sign.size(); ++r) {
        const Matching& m = s.round(r);
        for (std::size_t i = 0; i < m.balancers.size(); ++i) {
            const Balancer& b = m.balancers[i];
            out << r << ',' << b.u << ',' << b.v << ','
                << (trace.odd(r, i) ? 1 : 0) << ','
                << (plan.flipped(r, i) ? "-0.5" : "0.5") << ','
                << phi_sign(b) << '\n';
        }
    }
}

} // namespace smoothnet
