#include "smoothnet/perturbation.hpp"

#include <ostream>

#include "smoothnet/rng.hpp"

namespace smoothnet {

std::size_t PerturbationPlan::flip_count() const {
    std::size_t c = 0;
    for (const auto& round : flips)
        for (std::uint8_t f : round) c += f;
    return c;
}

PerturbationPlan sample_plan(const Schedule& s, double alpha, std::uint64_t seed) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw std::invalid_argument("sample_plan: alpha must be in [0,1]");
    PerturbationPlan plan;
    plan.alpha = alpha;
    plan.seed = seed;
    plan.flips.resize(s.num_rounds());
    Rng rng(seed);
    for (std::size_t r = 1; r <= s.num_rounds(); ++r) {
        auto& bits = plan.flips[r - 1];
        bits.resize(s.round(r).balancers.size());
        for (auto& bit : bits) bit = rng.next_bernoulli(alpha) ? 1 : 0;
    }
    return plan;
}

void dump_flips_hex(const PerturbationPlan& plan, std::ostream& out) {
    static const char* digits = "0123456789abcdef";
    for (const auto& bits : plan.flips) {
        unsigned nibble = 0;
        for (std::size_t i = 0; i < bits.size(); ++i) {
            nibble |= static_cast<unsigned>(bits[i]) << (i % 4);
            if (i % 4 == 3) {
                out << digits[nibble];
                nibble = 0;
            }
        }
        if (bits.size() % 4 != 0) out << digits[nibble];
        out << '\n';
    }
}

} // namespace smoothnet
