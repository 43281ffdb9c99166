#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "smoothnet/dyadic.hpp"
#include "smoothnet/perturbation.hpp"
#include "smoothnet/rng.hpp"
#include "smoothnet/schedule.hpp"

namespace smoothnet {

// Integer token counts, one entry per vertex. Every balancing round
// conserves the total.
using LoadVector = std::vector<std::int64_t>;

enum class IdealMode { ExactDyadic, Float };

// Loads of the divisible (idealized) process. In ExactDyadic mode entries
// are exact multiples of 2^-T after T rounds.
struct IdealVector {
    IdealMode mode = IdealMode::Float;
    DyadicVector exact;
    std::vector<double> approx;

    std::size_t size() const {
        return mode == IdealMode::ExactDyadic ? exact.size() : approx.size();
    }
    double value(std::size_t i) const {
        return mode == IdealMode::ExactDyadic ? exact.value(i) : approx[i];
    }
};

// Per-round record of a discrete run. rho_sign[r][i] is the rounding
// direction of balancer i in round r+1: +1 when the excess token went to u,
// -1 when it went to v, 0 when the pair sum was even. The implied rounding
// vector has +-1/2 at the endpoints of each odd balancer.
struct RunTrace {
    std::vector<std::vector<std::int8_t>> rho_sign;
    std::vector<LoadVector> snapshots; // y^(0)..y^(T) when requested

    bool odd(std::size_t round, std::size_t idx) const {
        return rho_sign[round - 1][idx] != 0;
    }
};

struct RunOptions {
    bool trace = false;
    bool snapshots = false; // implies trace bookkeeping of y^(t); memory-gated
};

// Discrete process: each round, every matched pair splits its combined
// tokens evenly and the excess token (odd sum) goes to the endpoint picked
// by the effective orientation.
LoadVector run_discrete(const Schedule& s, const PerturbationPlan& plan,
                        const LoadVector& input);
LoadVector run_discrete(const Schedule& s, const PerturbationPlan& plan,
                        const LoadVector& input, const RunOptions& opts,
                        RunTrace* trace);

// Idealized process: matched pairs average exactly.
IdealVector run_ideal(const Schedule& s, const LoadVector& input, IdealMode mode);

std::int64_t discrepancy(const LoadVector& v);
double discrepancy(const IdealVector& v);

// Accumulated rounding deviation sum_{i<=t} rho^(i) P^[i+1,t], computed by
// forward accumulation over the trace. Equals y^(t) - xi^(t) exactly.
DyadicVector unfold_deviation(const Schedule& s, const RunTrace& trace, std::size_t t);

// Per-layer contributions S_l of the rounding terms to `wire`'s final load
// on a CCC: S_l = 2^(l - log n) * sum over affecting balancers of
// odd * psi * phi * side, where side is +1 when the wire sits on the
// balancer's u-branch. Their sum equals y_wire - mu exactly.
std::vector<double> layer_sums(const Schedule& s, const PerturbationPlan& plan,
                               const RunTrace& trace, std::uint32_t wire);

// Input generators.
struct InputDist {
    enum class Kind { Uniform, Constant, SingleHot, File };
    Kind kind = Kind::Uniform;
    std::int64_t param = 0; // Uniform: m (0 means n); Constant: c; SingleHot: K
    std::string path;       // File

    static InputDist uniform(std::int64_t m = 0) { return {Kind::Uniform, m, {}}; }
    static InputDist constant(std::int64_t c) { return {Kind::Constant, c, {}}; }
    static InputDist single_hot(std::int64_t k) { return {Kind::SingleHot, k, {}}; }
    static InputDist from_file(std::string p) { return {Kind::File, 0, std::move(p)}; }
};

LoadVector sample_input(const InputDist& dist, std::uint32_t n, Rng& rng);

// Load vectors on disk: one integer per line.
LoadVector load_loads(const std::string& path);
void save_loads(const LoadVector& v, const std::string& path);

// Debug CSV: round,u,v,odd,psi,phi.
void write_trace_csv(const Schedule& s, const PerturbationPlan& plan,
                     const RunTrace& trace, std::ostream& out);

} // namespace smoothnet
