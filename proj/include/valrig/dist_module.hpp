#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "sindex.hpp"
#include "sparse.hpp"
#include "tree.hpp"
#include "windex.hpp"

namespace valrig {

// Construction inputs retained with the module so downstream stages can
// re-derive indices, re-run witness extraction, and stamp reports.
struct ModuleProvenance {
    TreePool pool;
    TreeAssignment assignment;
    uint32_t steps = 0;
    bool certified = false;
    std::optional<std::vector<SIndex>> subset;

    bool operator==(const ModuleProvenance&) const = default;
};

// Free module with one basis element per unfolding index, plus the ordered
// family of distinguished submodules, each given by a generator list over
// the basis.  Slots are sorted by their key; empty generator lists are
// kept so the key set depends only on the shape parameters.
template <typename FT>
struct DistModule {
    using E = typename FT::Elem;

    FT field;
    std::vector<SIndex> basis;
    std::vector<std::pair<WIndex, std::vector<SparseVec<E>>>> slots;
    ModuleProvenance prov;

    uint32_t rank() const { return static_cast<uint32_t>(basis.size()); }

    int64_t basis_index(const SIndex& s) const {
        auto it = std::lower_bound(basis.begin(), basis.end(), s, sindex_less);
        if (it == basis.end() || !(*it == s)) return -1;
        return it - basis.begin();
    }

    const std::vector<SparseVec<E>>* slot(const WIndex& w) const {
        auto it = std::lower_bound(slots.begin(), slots.end(), w,
                                   [](const auto& e, const WIndex& k) { return e.first < k; });
        if (it == slots.end() || !(it->first == w)) return nullptr;
        return &it->second;
    }

    std::vector<WIndex> keys() const {
        std::vector<WIndex> ks;
        ks.reserve(slots.size());
        for (const auto& [w, gens] : slots) ks.push_back(w);
        return ks;
    }
};

namespace detail {

template <typename E>
SparseVec<E> unit_vec(uint32_t dim, uint32_t at, const E& one) {
    SparseVec<E> v(dim);
    v.push(at, one);
    return v;
}

// e_lo - e_hi with lo < hi as basis positions.
template <typename E>
SparseVec<E> diff_vec(uint32_t dim, uint32_t lo, uint32_t hi, const E& one, const E& minus_one) {
    SparseVec<E> v(dim);
    v.push(lo, one);
    v.push(hi, minus_one);
    return v;
}

} // namespace detail

// Builds the module for `steps` unfolding rounds of the assigned trees.
//
// Slot contents, writing s^nu for the child index of s under node nu and
// r for the root index:
//   D0      : e_r - e_s for every s != r
//   D1      : e_r
//   L1(n,k) : e_{s^(nu|k-1)} - e_{s^nu}, s of stratum n, nu a level-k node
//   L2(n,k) : e_{s^nu}, s of stratum n, nu a level-k node
//   L3(k,n) : e_{s^nu}, s of stratum n, nu a node of valuation k (the tree
//             root counts, contributing e_s itself)
// L1/L2 range over 1 <= k <= depth, L3 over 0 <= k <= vmax, all over
// 0 <= n < steps.  Generator lists follow the (s, nu) generation order.
template <typename FT>
DistModule<FT> build_module(const FT& field, const TreePool& pool, const TreeAssignment& assign,
                            uint32_t steps, bool certified, bool allow_repeats = false) {
    const TreeBounds bounds = pool.bounds();
    for (size_t i = 0; i < pool.trees.size(); ++i) {
        TreeCheck c = validate_tree(pool.trees[i], bounds);
        if (!c.ok) throw validation_error("pool tree " + std::to_string(i) + ": " + c.issue);
    }

    Stratified s = build_s(pool, assign, steps, allow_repeats);

    DistModule<FT> m{field, {}, {}, {}};
    m.basis = s.flat;
    m.prov = ModuleProvenance{pool, assign, steps, certified, std::nullopt};

    const auto one = field.one();
    const auto minus_one = field.from_int(-1);
    const uint32_t dim = m.rank();

    auto pos = [&](const SIndex& at) {
        int64_t p = s.index_of(at);
        if (p < 0) throw breach_error("generated index missing from basis: " + at.str());
        return static_cast<uint32_t>(p);
    };

    std::vector<SparseVec<typename FT::Elem>> d0, d1;
    for (uint32_t i = 1; i < dim; ++i) {
        d0.push_back(detail::diff_vec(dim, 0, i, one, minus_one));
    }
    d1.push_back(detail::unit_vec(dim, 0u, one));
    m.slots.emplace_back(WIndex::d0(), std::move(d0));
    m.slots.emplace_back(WIndex::d1(), std::move(d1));

    for (uint32_t n = 0; n < steps; ++n) {
        for (uint32_t k = 1; k <= bounds.depth; ++k) {
            std::vector<SparseVec<typename FT::Elem>> l1, l2;
            for (const SIndex& at : s.strata[n]) {
                const ValuatedTree& tree = pool.trees[*assign.find(at)];
                for (const Node& nu : tree.nodes) {
                    if (nu.size() != k) continue;
                    Node trunc(nu.begin(), nu.end() - 1);
                    SIndex upper = trunc.empty() ? at : at.child(trunc);
                    l1.push_back(detail::diff_vec(dim, pos(upper), pos(at.child(nu)), one, minus_one));
                    l2.push_back(detail::unit_vec(dim, pos(at.child(nu)), one));
                }
            }
            m.slots.emplace_back(WIndex::l1(n, k), std::move(l1));
            m.slots.emplace_back(WIndex::l2(n, k), std::move(l2));
        }
    }

    for (uint32_t k = 0; k <= bounds.vmax; ++k) {
        for (uint32_t n = 0; n < steps; ++n) {
            std::vector<SparseVec<typename FT::Elem>> l3;
            for (const SIndex& at : s.strata[n]) {
                const ValuatedTree& tree = pool.trees[*assign.find(at)];
                for (size_t j = 0; j < tree.nodes.size(); ++j) {
                    if (tree.vals[j] != k) continue;
                    const Node& nu = tree.nodes[j];
                    uint32_t p = nu.empty() ? pos(at) : pos(at.child(nu));
                    l3.push_back(detail::unit_vec(dim, p, one));
                }
            }
            m.slots.emplace_back(WIndex::l3(k, n), std::move(l3));
        }
    }

    std::sort(m.slots.begin(), m.slots.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    return m;
}

// Extends a module with the subset slot D2 = { e_u : u in U }.  U must
// name distinct basis indices; it is stored sorted.
template <typename FT>
DistModule<FT> build_module_subset(const DistModule<FT>& base, std::vector<SIndex> subset) {
    std::sort(subset.begin(), subset.end(), sindex_less);
    for (size_t i = 0; i + 1 < subset.size(); ++i) {
        if (subset[i] == subset[i + 1]) {
            throw validation_error("subset repeats index " + subset[i].str());
        }
    }

    DistModule<FT> m = base;
    std::vector<SparseVec<typename FT::Elem>> d2;
    for (const SIndex& u : subset) {
        int64_t p = m.basis_index(u);
        if (p < 0) throw validation_error("subset index " + u.str() + " is not a basis index");
        d2.push_back(detail::unit_vec(m.rank(), static_cast<uint32_t>(p), m.field.one()));
    }

    auto it = std::lower_bound(m.slots.begin(), m.slots.end(), WIndex::d2(),
                               [](const auto& e, const WIndex& k) { return e.first < k; });
    if (it != m.slots.end() && it->first == WIndex::d2()) {
        throw validation_error("module already carries a subset slot");
    }
    m.slots.insert(it, {WIndex::d2(), std::move(d2)});
    m.prov.subset = std::move(subset);
    return m;
}

} // namespace valrig
