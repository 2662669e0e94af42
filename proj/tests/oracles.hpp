#pragma once

// Independent brute-force oracles used to cross-check the library.  Nothing
// here touches valrig's elimination code: the point is a second, dumber
// route to the same answers.

#include <cstdint>
#include <random>
#include <set>
#include <vector>

#include "valrig/tree.hpp"

namespace oracles {

using BitRow = std::vector<uint8_t>; // dense GF(2) row, one byte per coordinate

// Plain dense Gauss-Jordan over GF(2), reduced echelon form, zero rows dropped.
inline std::vector<BitRow> f2_rref_dense(std::vector<BitRow> rows) {
    if (rows.empty()) return rows;
    size_t n = rows[0].size();
    size_t r = 0;
    for (size_t col = 0; col < n && r < rows.size(); ++col) {
        size_t sel = SIZE_MAX;
        for (size_t i = r; i < rows.size(); ++i)
            if (rows[i][col]) { sel = i; break; }
        if (sel == SIZE_MAX) continue;
        std::swap(rows[r], rows[sel]);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (i != r && rows[i][col])
                for (size_t j = 0; j < n; ++j) rows[i][j] ^= rows[r][j];
        }
        ++r;
    }
    rows.resize(r);
    return rows;
}

// Every element of the GF(2) span of `rows`, by enumerating all combinations.
inline std::set<BitRow> f2_span(const std::vector<BitRow>& rows, size_t n) {
    std::set<BitRow> span;
    size_t k = rows.size();
    for (uint64_t mask = 0; mask < (uint64_t(1) << k); ++mask) {
        BitRow v(n, 0);
        for (size_t i = 0; i < k; ++i)
            if (mask & (uint64_t(1) << i))
                for (size_t j = 0; j < n; ++j) v[j] ^= rows[i][j];
        span.insert(v);
    }
    return span;
}

// Exhaustive enumeration of level-preserving maps between trees, checked
// against the homomorphism conditions directly (no search, no pruning, no
// shared code with the library's backtracking).  Returns assignment vectors
// in odometer order.
inline std::vector<std::vector<uint32_t>> all_valuated_maps(const valrig::ValuatedTree& src,
                                                            const valrig::ValuatedTree& dst) {
    using valrig::Node;
    size_t n = src.size();
    // candidates per source node: any target node of the same level
    std::vector<std::vector<uint32_t>> cand(n);
    for (size_t i = 0; i < n; ++i)
        for (uint32_t j = 0; j < dst.size(); ++j)
            if (dst.nodes[j].size() == src.nodes[i].size()) cand[i].push_back(j);

    auto is_hom = [&](const std::vector<uint32_t>& map) {
        for (size_t i = 0; i < n; ++i) {
            const Node& f = src.nodes[i];
            const Node& gf = dst.nodes[map[i]];
            if (f.size() != gf.size()) return false;
            if (src.vals[i] != dst.vals[map[i]]) return false;
            for (size_t m = 0; m <= f.size(); ++m) {
                Node fm(f.begin(), f.begin() + m);
                Node gfm(gf.begin(), gf.begin() + m);
                int fi = src.index_of(fm);
                if (fi < 0) return false;
                if (dst.nodes[map[static_cast<size_t>(fi)]] != gfm) return false;
            }
        }
        return true;
    };

    std::vector<std::vector<uint32_t>> out;
    for (const auto& c : cand)
        if (c.empty()) return out;
    std::vector<size_t> odo(n, 0);
    while (true) {
        std::vector<uint32_t> map(n);
        for (size_t i = 0; i < n; ++i) map[i] = cand[i][odo[i]];
        if (is_hom(map)) out.push_back(map);
        size_t k = n;
        while (k > 0) {
            --k;
            if (++odo[k] < cand[k].size()) break;
            odo[k] = 0;
            if (k == 0) return out;
        }
    }
}

} // namespace oracles
