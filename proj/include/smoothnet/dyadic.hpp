#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace smoothnet {

using int128 = __int128;

// Raised when a requested exact run would overflow the 128-bit numerators.
class ExactOverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Vector of dyadic rationals sharing one denominator 2^log2_scale. The
// balancing operations below only ever halve even numerators, so entries
// stay exact integers throughout.
struct DyadicVector {
    int log2_scale = 0;
    std::vector<int128> num;

    std::size_t size() const { return num.size(); }

    double value(std::size_t i) const {
        return std::ldexp(static_cast<double>(num[i]), -log2_scale);
    }
};

DyadicVector make_dyadic(const std::vector<std::int64_t>& v, int log2_scale);

// In-place (a+b)/2 on a pair of entries; throws if the sum is odd, which
// cannot happen when the scale leaves enough headroom for the round count.
void average_entry_pair(DyadicVector& v, std::size_t a, std::size_t b);

std::string to_string(int128 x);

} // namespace smoothnet
