#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "errors.hpp"
#include "hom_search.hpp"
#include "tree.hpp"

namespace valrig {

// Verdict for one ordered pair of pool members.  Off-diagonal pairs are
// rigid when no hom exists; diagonal pairs are strongly rigid when the only
// self-hom is the identity (the stored witness is then the identity, and a
// non-identity witness otherwise).
struct PairVerdict {
    uint32_t src = 0;
    uint32_t dst = 0;
    bool has_hom = false;
    std::optional<TreeHom> witness;
    bool identity_only = false; // meaningful on diagonal pairs only
    uint64_t nodes_expanded = 0;
};

struct RigidityCertificate {
    uint32_t lambda = 0;
    uint32_t depth = 0;
    uint32_t vmax = 0;
    uint64_t seed = 0;
    bool strong = false; // every off-diagonal pair NoHom and every member identity-only
    std::vector<PairVerdict> verdicts; // all ordered pairs, row-major (src, dst)

    // Plain rigidity: no homs between distinct members.
    bool rigid() const {
        for (const auto& v : verdicts)
            if (v.src != v.dst && v.has_hom) return false;
        return true;
    }
};

// Exhaustively decides every ordered pair of the pool.  Duplicate trees are
// rejected: the construction downstream requires the family to be enumerated
// without repetition.  With check_strong the diagonal pairs are enumerated
// to depth 2 to decide identity-onlyness; otherwise diagonals record the
// identity witness without a claim.
inline RigidityCertificate certify_pool(const TreePool& pool, bool check_strong = true) {
    const auto& trees = pool.trees;
    if (trees.empty()) throw validation_error("cannot certify an empty pool");
    for (size_t i = 0; i < trees.size(); ++i) {
        auto check = validate_tree(trees[i], pool.bounds());
        if (!check.ok)
            throw validation_error("pool member " + std::to_string(i) + ": " + check.issue);
        for (size_t j = i + 1; j < trees.size(); ++j)
            if (trees[i] == trees[j])
                throw validation_error("duplicate trees in pool: members " + std::to_string(i) +
                                       " and " + std::to_string(j));
    }

    RigidityCertificate cert;
    cert.lambda = pool.lambda;
    cert.depth = pool.depth;
    cert.vmax = pool.vmax;
    cert.seed = pool.seed;

    bool strong = true;
    for (uint32_t a = 0; a < trees.size(); ++a) {
        for (uint32_t b = 0; b < trees.size(); ++b) {
            PairVerdict v;
            v.src = a;
            v.dst = b;
            if (a == b) {
                if (check_strong) {
                    auto twos = enumerate_valuated_homs(trees[a], trees[a], 2);
                    v.has_hom = true;
                    v.nodes_expanded = twos.nodes_expanded;
                    v.identity_only = twos.homs.size() == 1;
                    // store the most informative witness: a non-identity
                    // self-hom when one exists
                    for (auto& h : twos.homs)
                        if (!is_identity_hom(h)) v.witness = h;
                    if (!v.witness) v.witness = twos.homs.front();
                    if (!v.identity_only) strong = false;
                } else {
                    auto one = find_valuated_hom(trees[a], trees[a]);
                    v.has_hom = true;
                    v.nodes_expanded = one.nodes_expanded;
                    v.witness = one.hom;
                    strong = false;
                }
            } else {
                auto found = find_valuated_hom(trees[a], trees[b]);
                v.nodes_expanded = found.nodes_expanded;
                v.has_hom = found.hom.has_value();
                if (found.hom) {
                    v.witness = found.hom;
                    strong = false;
                }
            }
            cert.verdicts.push_back(std::move(v));
        }
    }
    cert.strong = strong && check_strong;
    return cert;
}

} // namespace valrig
