#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "tree.hpp"

namespace valrig {

// Index of one basis element: a finite sequence of nonempty tree nodes,
// produced by iterated unfolding.  The empty sequence is the root index.
// Stratum = number of parts.
struct SIndex {
    std::vector<Node> parts;

    uint32_t stratum() const { return static_cast<uint32_t>(parts.size()); }

    bool operator==(const SIndex&) const = default;

    SIndex child(const Node& part) const {
        SIndex c = *this;
        c.parts.push_back(part);
        return c;
    }

    // Drops the last part.  Precondition: stratum() > 0.
    SIndex parent() const {
        SIndex p = *this;
        p.parts.pop_back();
        return p;
    }

    std::string str() const {
        if (parts.empty()) return "()";
        std::string out = "(";
        for (size_t i = 0; i < parts.size(); ++i) {
            if (i) out += ";";
            out += node_str(parts[i]);
        }
        out += ")";
        return out;
    }
};

// Stratum-major order; within a stratum, part-by-part node order.
inline bool sindex_less(const SIndex& a, const SIndex& b) {
    if (a.parts.size() != b.parts.size()) return a.parts.size() < b.parts.size();
    for (size_t i = 0; i < a.parts.size(); ++i) {
        if (a.parts[i] != b.parts[i]) return node_less(a.parts[i], b.parts[i]);
    }
    return false;
}

// Maps basis indices of stratum < N to trees in a pool (by position).
// Entries are kept sorted so lookup is deterministic and serialization
// is canonical.
struct TreeAssignment {
    std::vector<std::pair<SIndex, uint32_t>> entries;

    void set(const SIndex& at, uint32_t tree) {
        auto it = std::lower_bound(entries.begin(), entries.end(), at,
                                   [](const auto& e, const SIndex& s) { return sindex_less(e.first, s); });
        if (it != entries.end() && it->first == at) {
            it->second = tree;
        } else {
            entries.insert(it, {at, tree});
        }
    }

    const uint32_t* find(const SIndex& at) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), at,
                                   [](const auto& e, const SIndex& s) { return sindex_less(e.first, s); });
        if (it != entries.end() && it->first == at) return &it->second;
        return nullptr;
    }

    bool operator==(const TreeAssignment&) const = default;
};

// Default assignment: walk indices in canonical order, handing out pool
// positions 0, 1, 2, ... as each pre-terminal index appears.  Throws when
// the pool runs out before the last stratum is reached.
inline TreeAssignment sequential_assignment(const TreePool& pool, uint32_t steps) {
    TreeAssignment a;
    std::vector<SIndex> cur{SIndex{}};
    uint32_t next = 0;
    for (uint32_t n = 0; n < steps; ++n) {
        std::vector<SIndex> nxt;
        for (const SIndex& at : cur) {
            if (next >= pool.trees.size()) {
                throw validation_error("pool of " + std::to_string(pool.trees.size()) +
                                       " trees is exhausted at unfolding step " + std::to_string(n) +
                                       "; index " + at.str() + " has no tree left");
            }
            a.set(at, next);
            for (const Node& nu : pool.trees[next].nodes) {
                if (nu.empty()) continue;
                nxt.push_back(at.child(nu));
            }
            ++next;
        }
        std::sort(nxt.begin(), nxt.end(), sindex_less);
        cur = std::move(nxt);
    }
    return a;
}

// The index set after N unfolding steps, kept per stratum and flattened
// in canonical (stratum-major) order.
struct Stratified {
    std::vector<std::vector<SIndex>> strata;
    std::vector<SIndex> flat;

    uint32_t steps() const { return static_cast<uint32_t>(strata.size()) - 1; }

    // Position in flat order, or -1 if absent.
    int64_t index_of(const SIndex& s) const {
        if (s.stratum() >= strata.size()) return -1;
        int64_t base = 0;
        for (uint32_t n = 0; n < s.stratum(); ++n) base += static_cast<int64_t>(strata[n].size());
        const auto& level = strata[s.stratum()];
        auto it = std::lower_bound(level.begin(), level.end(), s, sindex_less);
        if (it == level.end() || !(*it == s)) return -1;
        return base + (it - level.begin());
    }
};

// Unfolds for `steps` rounds: stratum 0 is the root index; each index of
// stratum n < steps is assigned a tree and contributes one child per
// nonroot node of that tree.  Every pre-terminal index must be assigned,
// the tree positions must be valid, and distinct indices must receive
// distinct trees (also by content) unless allow_repeats is set.
inline Stratified build_s(const TreePool& pool, const TreeAssignment& assign, uint32_t steps,
                          bool allow_repeats = false) {
    Stratified s;
    s.strata.assign(steps + 1, {});
    s.strata[0].push_back(SIndex{});

    std::vector<std::pair<SIndex, uint32_t>> used;
    for (uint32_t n = 0; n < steps; ++n) {
        for (const SIndex& at : s.strata[n]) {
            const uint32_t* t = assign.find(at);
            if (!t) throw validation_error("assignment covers no tree for index " + at.str());
            if (*t >= pool.trees.size()) {
                throw validation_error("assignment at " + at.str() + " names tree " + std::to_string(*t) +
                                       " but the pool holds " + std::to_string(pool.trees.size()));
            }
            if (!allow_repeats) {
                for (const auto& [prev, pt] : used) {
                    if (pt == *t || pool.trees[pt] == pool.trees[*t]) {
                        throw validation_error("assignment repeats a tree: index " + at.str() + " and index " +
                                               prev.str() + " receive equal trees");
                    }
                }
            }
            used.emplace_back(at, *t);
            const ValuatedTree& tree = pool.trees[*t];
            for (const Node& nu : tree.nodes) {
                if (nu.empty()) continue;
                s.strata[n + 1].push_back(at.child(nu));
            }
        }
        // Outer loop is sorted and children ascend within each parent, so
        // generation order is already canonical; sort stays a no-op guard.
        std::sort(s.strata[n + 1].begin(), s.strata[n + 1].end(), sindex_less);
    }

    for (const auto& level : s.strata) {
        s.flat.insert(s.flat.end(), level.begin(), level.end());
    }
    return s;
}

} // namespace valrig
