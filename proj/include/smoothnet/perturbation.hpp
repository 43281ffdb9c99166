#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "smoothnet/schedule.hpp"

namespace smoothnet {

// One sampled perturbation of a schedule: an independent Bernoulli(alpha)
// flip bit per balancer. Draws are consumed in canonical order (round
// ascending, balancer order within a round), so a plan is a pure function
// of (schedule shape, alpha, seed).
struct PerturbationPlan {
    double alpha = 0.0;
    std::uint64_t seed = 0;
    std::vector<std::vector<std::uint8_t>> flips; // one byte per balancer, 1 = flipped

    bool flipped(std::size_t round, std::size_t idx) const {
        return flips[round - 1][idx] != 0;
    }

    std::size_t flip_count() const;
};

PerturbationPlan sample_plan(const Schedule& s, double alpha, std::uint64_t seed);

// +1/2 when the balancer kept its initial direction, -1/2 when flipped.
inline double psi_sign(const PerturbationPlan& plan, std::size_t round, std::size_t idx) {
    return plan.flipped(round, idx) ? -0.5 : 0.5;
}

// +1 when the initial direction routes the excess to the smaller endpoint.
inline int phi_sign(const Balancer& b) {
    return b.orient == Orientation::TowardU ? 1 : -1;
}

// Initial orientation combined with the flip bit. A balancer sends its
// excess token to u exactly when phi_sign * (2 * psi_sign) == +1.
inline Orientation effective_orientation(const Balancer& b, bool flip) {
    if (!flip) return b.orient;
    return b.orient == Orientation::TowardU ? Orientation::TowardV
                                            : Orientation::TowardU;
}

// Debug dump: one hex bitstring line per round, LSB-first within each byte.
void dump_flips_hex(const PerturbationPlan& plan, std::ostream& out);

} // namespace smoothnet
