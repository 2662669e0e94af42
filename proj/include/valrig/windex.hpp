#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "errors.hpp"

namespace valrig {

// Key of one distinguished-submodule slot.  The family is well-ordered:
// D0 < D1 < D2 < L1(n,k)... < L2(n,k)... < L3(k,n)..., with the L-blocks
// ordered lexicographically on their stored pair.  L1/L2 store (stratum n,
// level k) and exist for k >= 1; L3 stores (valuation k, stratum n) and
// exists for all 0 <= k <= vmax.  D2 appears only in subset-extended
// modules.
struct WIndex {
    enum class Tag : uint8_t { D0 = 0, D1, D2, L1, L2, L3 };

    Tag tag = Tag::D0;
    uint32_t a = 0;
    uint32_t b = 0;

    auto operator<=>(const WIndex&) const = default;

    static WIndex d0() { return {Tag::D0, 0, 0}; }
    static WIndex d1() { return {Tag::D1, 0, 0}; }
    static WIndex d2() { return {Tag::D2, 0, 0}; }
    static WIndex l1(uint32_t n, uint32_t k) { return {Tag::L1, n, k}; }
    static WIndex l2(uint32_t n, uint32_t k) { return {Tag::L2, n, k}; }
    static WIndex l3(uint32_t k, uint32_t n) { return {Tag::L3, k, n}; }

    std::string str() const {
        switch (tag) {
            case Tag::D0: return "D0";
            case Tag::D1: return "D1";
            case Tag::D2: return "D2";
            case Tag::L1: return "L1(" + std::to_string(a) + "," + std::to_string(b) + ")";
            case Tag::L2: return "L2(" + std::to_string(a) + "," + std::to_string(b) + ")";
            case Tag::L3: return "L3(" + std::to_string(a) + "," + std::to_string(b) + ")";
        }
        return "?";
    }

    static WIndex parse(const std::string& s) {
        if (s == "D0") return d0();
        if (s == "D1") return d1();
        if (s == "D2") return d2();
        if (s.size() >= 7 && s[2] == '(' && s.back() == ')') {
            auto comma = s.find(',');
            if (comma != std::string::npos && (s[0] == 'L')) {
                uint32_t a = 0, b = 0;
                try {
                    a = static_cast<uint32_t>(std::stoul(s.substr(3, comma - 3)));
                    b = static_cast<uint32_t>(std::stoul(s.substr(comma + 1, s.size() - comma - 2)));
                } catch (...) {
                    throw validation_error("malformed submodule key: " + s);
                }
                if (s[1] == '1') return {Tag::L1, a, b};
                if (s[1] == '2') return {Tag::L2, a, b};
                if (s[1] == '3') return {Tag::L3, a, b};
            }
        }
        throw validation_error("malformed submodule key: " + s);
    }
};

} // namespace valrig
