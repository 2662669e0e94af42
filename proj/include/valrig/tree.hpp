#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"

namespace valrig {

using Label = uint32_t;

// A tree node is its path from the root: the sequence of edge labels.
// The root is the empty sequence.
using Node = std::vector<Label>;

// Canonical node order: shorter nodes first, lexicographic within a length.
// Trees, searches and serializations all use this order.
inline bool node_less(const Node& a, const Node& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
}

inline std::string node_str(const Node& n) {
    std::string s = "<";
    for (size_t i = 0; i < n.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(n[i]);
    }
    return s + ">";
}

// Finite valuated tree: a prefix-closed set of nodes, each carrying a
// natural-number valuation.  Nodes are kept in canonical order; vals is
// parallel to nodes.
struct ValuatedTree {
    std::vector<Node> nodes;
    std::vector<uint32_t> vals;

    size_t size() const { return nodes.size(); }

    uint32_t depth() const {
        size_t d = 0;
        for (const auto& n : nodes) d = std::max(d, n.size());
        return static_cast<uint32_t>(d);
    }

    // Index of a node in canonical order, or -1 if absent.
    int index_of(const Node& n) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), n, node_less);
        if (it == nodes.end() || *it != n) return -1;
        return static_cast<int>(it - nodes.begin());
    }

    static ValuatedTree from_pairs(std::vector<std::pair<Node, uint32_t>> pairs) {
        std::sort(pairs.begin(), pairs.end(),
                  [](const auto& a, const auto& b) { return node_less(a.first, b.first); });
        ValuatedTree t;
        for (auto& [n, v] : pairs) {
            t.nodes.push_back(std::move(n));
            t.vals.push_back(v);
        }
        return t;
    }

    bool operator==(const ValuatedTree& o) const { return nodes == o.nodes && vals == o.vals; }
    bool operator!=(const ValuatedTree& o) const { return !(*this == o); }
};

struct TreeBounds {
    uint32_t lambda = 2; // labels range over [0, lambda)
    uint32_t depth = 1;  // max node length
    uint32_t vmax = 2;   // valuations range over [0, vmax]
};

struct TreeCheck {
    bool ok = true;
    std::string issue;
};

// Structural validity: canonical order, distinct nodes, root present,
// prefix-closed, labels below lambda, depth and valuations within bounds,
// one valuation per node.
inline TreeCheck validate_tree(const ValuatedTree& t, const TreeBounds& b) {
    auto fail = [](std::string why) { return TreeCheck{false, std::move(why)}; };
    if (t.nodes.size() != t.vals.size()) return fail("valuation is not total");
    if (t.nodes.empty() || !t.nodes[0].empty()) return fail("root node is missing");
    for (size_t i = 0; i + 1 < t.nodes.size(); ++i)
        if (!node_less(t.nodes[i], t.nodes[i + 1]))
            return fail("nodes out of canonical order or duplicated");
    for (size_t i = 0; i < t.nodes.size(); ++i) {
        const Node& n = t.nodes[i];
        if (n.size() > b.depth) return fail("node " + node_str(n) + " exceeds depth bound");
        for (Label l : n)
            if (l >= b.lambda) return fail("node " + node_str(n) + " uses label out of range");
        if (t.vals[i] > b.vmax) return fail("node " + node_str(n) + " exceeds valuation bound");
        if (!n.empty()) {
            Node parent(n.begin(), n.end() - 1);
            if (t.index_of(parent) < 0)
                return fail("node " + node_str(n) + " lacks its prefix " + node_str(parent));
        }
    }
    return {};
}

// Valuated homomorphism src -> dst: map[i] is the dst index of the image of
// src node i.  Legal homs preserve level, initial segments and valuation;
// they need not be injective.
struct TreeHom {
    std::vector<uint32_t> map;

    bool operator==(const TreeHom& o) const { return map == o.map; }
};

inline bool is_identity_hom(const TreeHom& h) {
    for (uint32_t i = 0; i < h.map.size(); ++i)
        if (h.map[i] != i) return false;
    return true;
}

// Checks the three homomorphism conditions verbatim; nullopt means valid.
inline std::optional<std::string> check_tree_hom(const ValuatedTree& src, const ValuatedTree& dst,
                                                 const TreeHom& h) {
    if (h.map.size() != src.size()) return "mapping is not total on the source tree";
    for (uint32_t i = 0; i < src.size(); ++i) {
        if (h.map[i] >= dst.size()) return "image index out of range";
        const Node& f = src.nodes[i];
        const Node& gf = dst.nodes[h.map[i]];
        if (f.size() != gf.size())
            return "level not preserved at " + node_str(f);
        for (size_t m = 0; m <= f.size(); ++m) {
            Node fm(f.begin(), f.begin() + m);
            Node gfm(gf.begin(), gf.begin() + m);
            int fi = src.index_of(fm);
            if (fi < 0) return "source tree is not prefix-closed at " + node_str(fm);
            if (dst.nodes[h.map[fi]] != gfm)
                return "initial segment not preserved at " + node_str(f);
        }
        if (src.vals[i] != dst.vals[h.map[i]])
            return "valuation not preserved at " + node_str(f);
    }
    return std::nullopt;
}

// h after g: src --g--> mid --h--> dst.
inline TreeHom compose_homs(const TreeHom& g, const TreeHom& h) {
    TreeHom out;
    out.map.reserve(g.map.size());
    for (uint32_t i : g.map) {
        if (i >= h.map.size()) throw validation_error("composition through mismatched trees");
        out.map.push_back(h.map[i]);
    }
    return out;
}

// A generated family of trees plus the bounds and seed it was produced under.
struct TreePool {
    uint32_t lambda = 2;
    uint32_t depth = 1;
    uint32_t vmax = 2;
    uint64_t seed = 0;
    std::vector<ValuatedTree> trees;

    TreeBounds bounds() const { return {lambda, depth, vmax}; }

    bool operator==(const TreePool& o) const {
        return lambda == o.lambda && depth == o.depth && vmax == o.vmax && seed == o.seed &&
               trees == o.trees;
    }
};

} // namespace valrig
