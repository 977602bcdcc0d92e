#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace srfe {

/// C(n, k) with overflow detection; nullopt when the value does not fit in 64 bits.
inline std::optional<std::uint64_t> binomial(int n, int k) {
    if (k < 0 || n < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t c = 1;
    for (int i = 1; i <= k; ++i) {
        // c * (n - k + i) / i is always integral at this point.
        const std::uint64_t num = static_cast<std::uint64_t>(n - k + i);
        if (c > UINT64_MAX / num) return std::nullopt;
        c = c * num / static_cast<std::uint64_t>(i);
    }
    return c;
}

/// First size-k subset of {0..n-1} in lexicographic order.
inline std::vector<int> first_subset(int k) {
    std::vector<int> s(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) s[static_cast<std::size_t>(i)] = i;
    return s;
}

/// Advance to the next size-k subset of {0..n-1}; false once exhausted.
inline bool next_subset(std::vector<int>& s, int n) {
    const int k = static_cast<int>(s.size());
    int i = k - 1;
    while (i >= 0 && s[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++s[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j)
        s[static_cast<std::size_t>(j)] = s[static_cast<std::size_t>(j - 1)] + 1;
    return true;
}

}  // namespace srfe
