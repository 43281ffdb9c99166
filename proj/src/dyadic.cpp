#include "smoothnet/dyadic.hpp"

#include <string>

namespace smoothnet {

DyadicVector make_dyadic(const std::vector<std::int64_t>& v, int log2_scale) {
    if (log2_scale < 0 || log2_scale > 126)
        throw ExactOverflowError("dyadic scale out of range");
    DyadicVector out;
    out.log2_scale = log2_scale;
    out.num.reserve(v.size());
    for (std::int64_t x : v) out.num.push_back(static_cast<int128>(x) << log2_scale);
    return out;
}

void average_entry_pair(DyadicVector& v, std::size_t a, std::size_t b) {
    const int128 s = v.num[a] + v.num[b];
    if (s & 1)
        throw ExactOverflowError("exact averaging ran out of dyadic precision");
    v.num[a] = v.num[b] = s / 2;
}

std::string to_string(int128 x) {
    if (x == 0) return "0";
    bool neg = x < 0;
    unsigned __int128 u = neg ? static_cast<unsigned __int128>(-(x + 1)) + 1
                              : static_cast<unsigned __int128>(x);
    std::string digits;
    while (u > 0) {
        digits.push_back(static_cast<char>('0' + static_cast<int>(u % 10)));
        u /= 10;
    }
    if (neg) digits.push_back('-');
    return std::string(digits.rbegin(), digits.rend());
}

} // namespace smoothnet
