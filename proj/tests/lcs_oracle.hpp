#pragma once

// Exponential subsequence-enumeration oracle for LCS, independent of the
// dynamic-programming route it checks. Usable only for short token lists.

#include <cstdint>
#include <string>
#include <vector>

namespace gitsearch::testing {

inline bool is_subsequence(const std::vector<std::string>& needle,
                           const std::vector<std::string>& haystack) {
    std::size_t i = 0;
    for (const std::string& token : haystack) {
        if (i < needle.size() && needle[i] == token) ++i;
    }
    return i == needle.size();
}

inline std::size_t lcs_brute_force(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b) {
    const std::vector<std::string>& shorter = a.size() <= b.size() ? a : b;
    const std::vector<std::string>& longer = a.size() <= b.size() ? b : a;
    std::size_t best = 0;
    const std::uint32_t limit = 1u << shorter.size();
    for (std::uint32_t mask = 0; mask < limit; ++mask) {
        std::vector<std::string> sub;
        for (std::size_t i = 0; i < shorter.size(); ++i) {
            if (mask & (1u << i)) sub.push_back(shorter[i]);
        }
        if (sub.size() > best && is_subsequence(sub, longer)) best = sub.size();
    }
    return best;
}

} // namespace gitsearch::testing
