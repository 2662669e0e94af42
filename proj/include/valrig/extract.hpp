#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>

#include "dist_module.hpp"
#include "hom_space.hpp"
#include "tree.hpp"

namespace valrig {

// A tree homomorphism recovered from a matrix witness, together with the
// pair of basis indices whose assigned trees it connects.
struct Extraction {
    SIndex src_anchor;
    SIndex dst_anchor;
    uint32_t src_tree = 0; // pool positions
    uint32_t dst_tree = 0;
    TreeHom hom;
};

// Pulls a tree homomorphism out of a constraint-satisfying matrix with
// off-diagonal support.  Scans basis columns in order for the first one
// whose image touches a different basis vector; the anchor pair is that
// column and its first off-diagonal support row.  When the pair sits in
// the final stratum (its indices carry no assigned trees) the anchors drop
// to the parents, whose own matrix entry must then be nonzero.  The map is
// grown level by level: each node's image is the lexicographically least
// extension of its parent's image with a nonzero coefficient.  A fully
// diagonal matrix yields nullopt (nothing to extract); a dead end during
// growth is an invariant breach, because the submodule constraints make
// an extension certain for genuine witnesses.
template <typename FT>
std::optional<Extraction> extract_tree_hom(const DistModule<FT>& m,
                                           const DenseMat<typename FT::Elem>& phi) {
    if (!is_module_hom(m, m, phi))
        throw validation_error("matrix does not satisfy the module constraints");

    const uint32_t rank = m.rank();
    uint32_t col = rank, row = rank;
    for (uint32_t s = 0; s < rank && col == rank; ++s)
        for (uint32_t d = 0; d < rank; ++d) {
            if (d != s && !phi[d][s].is_zero()) {
                col = s;
                row = d;
                break;
            }
        }
    if (col == rank) return std::nullopt;

    const SIndex& at_src = m.basis[col];
    const SIndex& at_dst = m.basis[row];
    if (at_src.stratum() != at_dst.stratum())
        throw breach_error("off-diagonal support crosses strata: " + at_src.str() + " -> " +
                           at_dst.str());

    SIndex anchor_src = at_src, anchor_dst = at_dst;
    if (at_src.stratum() == m.prov.steps) {
        // Final stratum: no assigned trees here, the parents anchor the map.
        anchor_src = at_src.parent();
        anchor_dst = at_dst.parent();
        int64_t ps = m.basis_index(anchor_src), pd = m.basis_index(anchor_dst);
        if (ps < 0 || pd < 0) throw breach_error("anchor parents missing from the basis");
        if (phi[static_cast<uint32_t>(pd)][static_cast<uint32_t>(ps)].is_zero())
            throw breach_error("tree map cannot be anchored: base coefficient of " +
                               anchor_dst.str() + " in the image of " + anchor_src.str() +
                               " is zero");
    }

    const uint32_t* ts = m.prov.assignment.find(anchor_src);
    const uint32_t* td = m.prov.assignment.find(anchor_dst);
    if (!ts || !td) throw breach_error("anchor index carries no assigned tree");
    const ValuatedTree& src_tree = m.prov.pool.trees.at(*ts);
    const ValuatedTree& dst_tree = m.prov.pool.trees.at(*td);

    auto coeff = [&](const SIndex& d, const SIndex& s) -> const typename FT::Elem& {
        int64_t di = m.basis_index(d), si = m.basis_index(s);
        if (di < 0 || si < 0) throw breach_error("generated index missing from the basis");
        return phi[static_cast<uint32_t>(di)][static_cast<uint32_t>(si)];
    };

    TreeHom g;
    g.map.assign(src_tree.size(), 0);
    for (uint32_t i = 1; i < src_tree.size(); ++i) {
        const Node& nu = src_tree.nodes[i];
        Node parent(nu.begin(), nu.end() - 1);
        int pi = src_tree.index_of(parent);
        if (pi < 0) throw breach_error("source tree is not prefix-closed");
        const Node& image_parent = dst_tree.nodes[g.map[pi]];

        bool found = false;
        for (uint32_t j = 0; j < dst_tree.size(); ++j) {
            const Node& sigma = dst_tree.nodes[j];
            if (sigma.size() != nu.size()) continue;
            if (!std::equal(image_parent.begin(), image_parent.end(), sigma.begin())) continue;
            if (coeff(anchor_dst.child(sigma), anchor_src.child(nu)).is_zero()) continue;
            g.map[i] = j;
            found = true;
            break;
        }
        if (!found)
            throw breach_error("tree map cannot be extended at node " + node_str(nu) +
                               ": no image with nonzero coefficient above " +
                               node_str(image_parent));
    }

    if (auto issue = check_tree_hom(src_tree, dst_tree, g))
        throw breach_error("extracted tree map fails validation: " + *issue);

    return Extraction{anchor_src, anchor_dst, *ts, *td, g};
}

} // namespace valrig
