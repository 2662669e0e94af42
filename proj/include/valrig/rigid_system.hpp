#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "dist_module.hpp"
#include "errors.hpp"
#include "hom_space.hpp"
#include "sindex.hpp"

namespace valrig {

// One ordered pair of subsets and what its hom space looked like.  The
// expected pattern: a single identity generator when U is contained in V,
// nothing at all otherwise.
struct GridCell {
    std::vector<SIndex> u, v;
    bool contained = false;
    size_t dim = 0;
    bool identity_generator = false;
    bool pass = false;
};

struct RigidGrid {
    std::vector<GridCell> cells;
    bool all_pass = true;
};

// Standard subset family for an n-cell smoke grid: the empty set, then
// singletons of the leading basis elements, then the full basis.
template <typename FT>
std::vector<std::vector<SIndex>> auto_subsets(const DistModule<FT>& base, uint32_t count) {
    if (count < 2) throw validation_error("subset family needs at least 2 members");
    if (count - 2 > base.rank())
        throw validation_error("subset family of " + std::to_string(count) +
                               " needs rank >= " + std::to_string(count - 2));
    std::vector<std::vector<SIndex>> out;
    out.push_back({});
    for (uint32_t i = 0; i + 2 < count; ++i) out.push_back({base.basis[i]});
    out.push_back(base.basis);
    return out;
}

// Builds the subset-extended module for every U and solves all ordered
// pairs.  The verdict per cell matches the containment indicator; the
// grid passes when every cell does.
template <typename FT>
RigidGrid check_fully_rigid(const DistModule<FT>& base,
                            const std::vector<std::vector<SIndex>>& subsets,
                            bool require_certified = true) {
    if (require_certified && !base.prov.certified)
        throw validation_error("fully rigid check requires a certified pool");
    if (base.slot(WIndex::d2()))
        throw validation_error("expected the plain module, not a subset-extended one");
    if (subsets.empty()) throw validation_error("no subsets given");

    std::vector<DistModule<FT>> extended;
    extended.reserve(subsets.size());
    for (const auto& u : subsets) extended.push_back(build_module_subset(base, u));

    RigidGrid grid;
    for (const auto& mu : extended) {
        for (const auto& mv : extended) {
            GridCell cell;
            cell.u = *mu.prov.subset;
            cell.v = *mv.prov.subset;
            cell.contained = std::includes(cell.v.begin(), cell.v.end(), cell.u.begin(),
                                           cell.u.end(), sindex_less);
            HomBasis<FT> h = hom_space(mu, mv);
            cell.dim = h.dim();
            cell.identity_generator =
                cell.dim == 1 && h.matrix(0) == identity_mat(base.field, base.rank());
            cell.pass = cell.contained ? (cell.dim == 1 && cell.identity_generator)
                                       : (cell.dim == 0);
            grid.all_pass = grid.all_pass && cell.pass;
            grid.cells.push_back(std::move(cell));
        }
    }
    return grid;
}

} // namespace valrig
