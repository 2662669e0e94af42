#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace valrig {

// Sparse vector over a field element type E.  Entries are (index, coeff)
// pairs sorted by index; zero coefficients are never stored.
template <typename E>
struct SparseVec {
    uint32_t dim = 0;
    std::vector<std::pair<uint32_t, E>> entries;

    SparseVec() = default;
    explicit SparseVec(uint32_t d) : dim(d) {}

    bool is_zero() const { return entries.empty(); }

    void push(uint32_t idx, const E& c) {
        if (idx >= dim) throw validation_error("sparse entry index out of range");
        if (!entries.empty() && entries.back().first >= idx)
            throw validation_error("sparse entries must be pushed in strictly increasing index order");
        if (c.is_zero()) return;
        entries.emplace_back(idx, c);
    }

    // Dense expansion; zfill supplies the field's zero (elements of Fp carry a modulus).
    std::vector<E> dense(const E& zfill) const {
        std::vector<E> out(dim, zfill);
        for (const auto& [i, c] : entries) out[i] = c;
        return out;
    }

    bool operator==(const SparseVec& o) const { return dim == o.dim && entries == o.entries; }
};

// Compress a dense vector, dropping zeros.
template <typename E>
SparseVec<E> sparsify(const std::vector<E>& dense) {
    SparseVec<E> v(static_cast<uint32_t>(dense.size()));
    for (uint32_t i = 0; i < dense.size(); ++i)
        if (!dense[i].is_zero()) v.entries.emplace_back(i, dense[i]);
    return v;
}

} // namespace valrig
