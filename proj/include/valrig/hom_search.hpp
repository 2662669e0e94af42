#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "errors.hpp"
#include "tree.hpp"

namespace valrig {

struct SearchOutcome {
    std::optional<TreeHom> hom; // first witness in lexicographic candidate order
    uint64_t nodes_expanded = 0;
};

struct EnumOutcome {
    std::vector<TreeHom> homs;
    uint64_t nodes_expanded = 0;
    bool truncated = false; // hit the caller's result limit
};

namespace detail {

// Per-node candidate lists for mapping src into dst, keyed by (level,
// valuation) only; the parent condition is enforced during the search.
struct HomSearcher {
    const ValuatedTree& src;
    const ValuatedTree& dst;
    std::vector<int> parent;                      // src node -> src parent index (-1 for root)
    std::vector<std::vector<uint32_t>> children;  // dst node -> dst child indices, ascending
    std::vector<uint32_t> map;
    uint64_t expanded = 0;
    size_t limit;
    std::vector<TreeHom>* sink = nullptr;

    HomSearcher(const ValuatedTree& s, const ValuatedTree& d, size_t lim)
        : src(s), dst(d), limit(lim) {
        parent.resize(src.size());
        for (uint32_t i = 0; i < src.size(); ++i) {
            const Node& n = src.nodes[i];
            parent[i] = n.empty() ? -1 : src.index_of(Node(n.begin(), n.end() - 1));
            if (!n.empty() && parent[i] < 0)
                throw validation_error("source tree is not prefix-closed");
        }
        children.resize(dst.size());
        for (uint32_t j = 0; j < dst.size(); ++j) {
            const Node& n = dst.nodes[j];
            if (n.empty()) continue;
            int p = dst.index_of(Node(n.begin(), n.end() - 1));
            if (p < 0) throw validation_error("target tree is not prefix-closed");
            children[p].push_back(j);
        }
        map.assign(src.size(), 0);
    }

    // Nodes are assigned in canonical order, so a node's parent is always
    // assigned first; candidates are the images of the parent's children
    // with matching valuation, tried in ascending (lexicographic) order.
    bool expand(uint32_t i) {
        if (i == src.size()) {
            sink->push_back(TreeHom{map});
            return sink->size() >= limit;
        }
        if (i == 0) {
            ++expanded;
            if (src.vals[0] != dst.vals[0]) return false;
            map[0] = 0;
            return expand(1);
        }
        for (uint32_t j : children[map[parent[i]]]) {
            if (dst.vals[j] != src.vals[i]) continue;
            ++expanded;
            map[i] = j;
            if (expand(i + 1)) return true;
        }
        return false;
    }
};

} // namespace detail

// All valuated homomorphisms src -> dst, in lexicographic order of the
// assignment sequence, stopping after `limit` results.  `guard` bounds the
// product of per-node candidate counts; beyond it the exhaustive walk is
// refused as infeasible.
inline EnumOutcome enumerate_valuated_homs(const ValuatedTree& src, const ValuatedTree& dst,
                                           size_t limit = SIZE_MAX,
                                           uint64_t guard = 10'000'000) {
    if (src.size() == 0 || dst.size() == 0) throw validation_error("empty tree");
    // candidate count per node ignoring the parent constraint: same level,
    // same valuation
    long double product = 1;
    for (uint32_t i = 0; i < src.size(); ++i) {
        uint64_t c = 0;
        for (uint32_t j = 0; j < dst.size(); ++j)
            if (dst.nodes[j].size() == src.nodes[i].size() && dst.vals[j] == src.vals[i]) ++c;
        product *= static_cast<long double>(c);
        if (product > static_cast<long double>(guard))
            throw validation_error("oracle infeasible: candidate product exceeds guard");
        if (c == 0) { product = 0; break; }
    }

    detail::HomSearcher s(src, dst, limit);
    EnumOutcome out;
    s.sink = &out.homs;
    if (product > 0) out.truncated = s.expand(0);
    out.nodes_expanded = s.expanded;
    return out;
}

// First valuated homomorphism src -> dst in lexicographic candidate order,
// if any.  Complete: returns a witness exactly when one exists.
inline SearchOutcome find_valuated_hom(const ValuatedTree& src, const ValuatedTree& dst) {
    if (src.size() == 0 || dst.size() == 0) throw validation_error("empty tree");
    detail::HomSearcher s(src, dst, 1);
    std::vector<TreeHom> found;
    s.sink = &found;
    s.expand(0);
    SearchOutcome out;
    out.nodes_expanded = s.expanded;
    if (!found.empty()) out.hom = std::move(found.front());
    return out;
}

} // namespace valrig
