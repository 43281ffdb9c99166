#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "smoothnet/schedule.hpp"

namespace smoothnet {

// Dense row-major matrix. Matching matrices and their products only hold
// dyadic entries, so small products stay bit-exact in doubles.
class DenseMatrix {
public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t n) : n_(n), a_(n * n, 0.0) {}

    static DenseMatrix identity(std::size_t n);

    std::size_t n() const { return n_; }
    double& at(std::size_t r, std::size_t c) { return a_[r * n_ + c]; }
    double at(std::size_t r, std::size_t c) const { return a_[r * n_ + c]; }

private:
    std::size_t n_ = 0;
    std::vector<double> a_;
};

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b);

// Matrix of one matching: 1/2 on matched pairs and their diagonals, 1 on
// unmatched diagonals. Symmetric and doubly stochastic.
DenseMatrix matching_matrix(const Matching& m, std::uint32_t n);

// P^[first,last] = P^(first) ... P^(last), 1-based inclusive; empty range
// (first > last) gives the identity.
DenseMatrix schedule_product(const Schedule& s, std::size_t first, std::size_t last);

// Row-vector application v <- v P, i.e. matched pairs averaged in place.
void apply_matching(std::vector<double>& v, const Matching& m);

// Operator 2-norm of a doubly stochastic matrix restricted to the subspace
// orthogonal to the all-ones vector; |second eigenvalue| for symmetric
// inputs. Uses a full Jacobi decomposition of A^T A at small n, power
// iteration otherwise. Throws if row/column sums deviate from 1 by > 1e-9.
double lambda_offones(const DenseMatrix& a);

// Matrix-free variant over the rounds [first,last] of a schedule.
double lambda_offones(const Schedule& s, std::size_t first, std::size_t last);

// Eigenvalues of a symmetric matrix (cyclic Jacobi), ascending.
std::vector<double> symmetric_eigenvalues(DenseMatrix m);

// Indivisibility term: for a probe wire w, sweeps c = P^[i+1,t2] e_w
// backwards through the schedule and accumulates sum (c_u - c_v)^2 over the
// matchings of rounds i <= t1; returns sqrt(log2(n) * accumulated).
double lambda1(const Schedule& s, std::size_t t1, std::size_t t2, std::uint32_t wire);

// Max over all wires. The parallel version distributes wires over OpenMP
// threads; the serial one is the reference kept for testing.
double lambda1_all(const Schedule& s, std::size_t t1, std::size_t t2);
double lambda1_all_serial(const Schedule& s, std::size_t t1, std::size_t t2);

// Evaluated discrepancy upper bound
//   (t2 - t1) + 3 (1/2 - alpha) t1 + Lambda1 + Lambda2
// with Lambda2 = lambda_offones(P^[1,t2]) * sqrt(n) * K.
struct BoundReport {
    std::size_t t1 = 0;
    std::size_t t2 = 0;
    double alpha = 0.0;
    double K = 0.0;
    double lambda1_term = 0.0;
    double lambda2_term = 0.0;
    double main_terms = 0.0; // (t2 - t1) + 3 (1/2 - alpha) t1
    double total = 0.0;

    std::string to_kv() const;       // key=value text, one line
    std::string csv_row() const;
    static std::string csv_header();
};

BoundReport theorem1_bound(const Schedule& s, double alpha, std::size_t t1,
                           std::size_t t2, double K);

// Bound for a periodic network: measures the round matrix Q of one period,
// picks T = ceil(2 d log2(Kn) / (1 - lambda(Q))) rounded up to whole
// periods, t1 = T - ceil(2 d log2 log2 n / (1 - lambda(Q))), then evaluates
// the bound on the repeated schedule. Also carries the closed-form caps on
// the two spectral terms.
struct PeriodicBound {
    BoundReport report;
    std::size_t periods = 0;
    std::size_t rounds_total = 0; // T
    std::size_t round_length = 0; // d
    double lambda_q = 0.0;
    double lambda1_cap = 0.0; // 2 sqrt(d) / (log2(n) (1 - lambda(Q)))
    double lambda2_cap = 0.0; // sqrt(n) K / (Kn)^2
};

class DisconnectedRoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

PeriodicBound periodic_bound(std::uint32_t n, const std::vector<Matching>& round,
                             double alpha, double K);

// Asymptotic lower bound for the all-up CCC under uniform random input:
// max{(1/2 - alpha) log2 n - 2 log2 log2 n, (log2 log2 n) / 2}.
double ccc_lower_bound(int log_n, double alpha);

// Expected-discrepancy corridor for the uniform-random-input CCC sweep.
struct EmpiricalBounds {
    double lower = 0.0;
    double upper = 0.0;
};

EmpiricalBounds empirical_bounds(int log_n, double alpha);

// Exact dyadic rational, num / 2^log2_den.
struct Dyadic {
    std::int64_t num = 0;
    int log2_den = 0;
    double value() const;
};

// Closed-form entry of the CCC tail product P^[k, log n]: wires that agree
// on the top k-1 bits see 2^(k-1)/n, everything else 0. k = log n + 1 is
// the empty product (identity).
Dyadic ccc_product_entry(int log_n, int k, std::uint32_t u, std::uint32_t v);

} // namespace smoothnet
