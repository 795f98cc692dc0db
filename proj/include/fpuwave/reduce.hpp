#pragma once

#include <cstddef>
#include <span>

namespace fpuwave {

// Fixed-shape binary tree summation. The split points depend only on the
// length, so the result is bitwise reproducible for a given input.
inline double pairwise_sum(std::span<const double> x) {
    constexpr std::size_t leaf = 8;
    if (x.size() <= leaf) {
        double s = 0.0;
        for (double v : x) s += v;
        return s;
    }
    const std::size_t half = x.size() / 2;
    return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

}  // namespace fpuwave
