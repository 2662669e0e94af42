#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "errors.hpp"
#include "sparse.hpp"

namespace valrig {

// Row space in reduced row echelon form: pivot columns strictly increasing,
// pivot coefficients 1, pivot columns zero in every other row.  RREF is
// unique per subspace, so equal spans compare as equal row lists.
template <typename E>
struct SubspaceBasis {
    uint32_t dim = 0;
    std::vector<SparseVec<E>> rows;
    std::vector<uint32_t> pivots;

    size_t rank() const { return rows.size(); }

    bool operator==(const SubspaceBasis& o) const {
        return dim == o.dim && pivots == o.pivots && rows == o.rows;
    }
};

namespace detail {

// dense -= c * sparse
template <typename E>
void axpy_neg(std::vector<E>& dense, const E& c, const SparseVec<E>& row) {
    for (const auto& [i, v] : row.entries) dense[i] -= c * v;
}

template <typename E>
uint32_t coeff_index(const SparseVec<E>& row, uint32_t col) {
    auto it = std::lower_bound(row.entries.begin(), row.entries.end(), col,
                               [](const auto& e, uint32_t c) { return e.first < c; });
    if (it == row.entries.end() || it->first != col) return UINT32_MAX;
    return static_cast<uint32_t>(it - row.entries.begin());
}

} // namespace detail

// Insert one row into an RREF basis, keeping it fully reduced.
// Returns true if the row was independent (basis grew).
template <typename F>
bool rref_insert(const F& field, SubspaceBasis<typename F::Elem>& b,
                 const SparseVec<typename F::Elem>& row) {
    using E = typename F::Elem;
    if (row.dim != b.dim) throw validation_error("row dimension does not match basis");
    std::vector<E> dense = row.dense(field.zero());
    for (size_t k = 0; k < b.rows.size(); ++k) {
        E c = dense[b.pivots[k]]; // copy: axpy below writes through dense
        if (!c.is_zero()) detail::axpy_neg(dense, c, b.rows[k]);
    }
    uint32_t lead = b.dim;
    for (uint32_t j = 0; j < b.dim; ++j)
        if (!dense[j].is_zero()) { lead = j; break; }
    if (lead == b.dim) return false;

    E scale = dense[lead].inv();
    std::vector<E> normalized(b.dim, field.zero());
    for (uint32_t j = lead; j < b.dim; ++j)
        if (!dense[j].is_zero()) normalized[j] = dense[j] * scale;
    SparseVec<E> newrow = sparsify(normalized);

    for (size_t k = 0; k < b.rows.size(); ++k) {
        uint32_t pos = detail::coeff_index(b.rows[k], lead);
        if (pos == UINT32_MAX) continue;
        E c = b.rows[k].entries[pos].second;
        std::vector<E> d = b.rows[k].dense(field.zero());
        detail::axpy_neg(d, c, newrow);
        b.rows[k] = sparsify(d);
    }

    auto it = std::lower_bound(b.pivots.begin(), b.pivots.end(), lead);
    size_t at = static_cast<size_t>(it - b.pivots.begin());
    b.pivots.insert(it, lead);
    b.rows.insert(b.rows.begin() + at, std::move(newrow));
    return true;
}

// RREF of the span of the given rows.  Pivoting is deterministic (lowest
// column first, rows folded in input order); the result is the canonical
// reduced echelon basis of the span, identical across runs and platforms.
template <typename F>
SubspaceBasis<typename F::Elem> rref(const F& field,
                                     const std::vector<SparseVec<typename F::Elem>>& rows,
                                     uint32_t dim) {
    SubspaceBasis<typename F::Elem> b;
    b.dim = dim;
    for (const auto& r : rows) {
        if (r.dim != dim) throw validation_error("ragged input: row dimension mismatch");
        rref_insert(field, b, r);
    }
    return b;
}

// Residual of v after reduction against the basis; zero iff v lies in the span.
template <typename F>
std::vector<typename F::Elem> reduce_against(const F& field,
                                             const SparseVec<typename F::Elem>& v,
                                             const SubspaceBasis<typename F::Elem>& b) {
    using E = typename F::Elem;
    if (v.dim != b.dim) throw validation_error("vector dimension does not match basis");
    std::vector<E> dense = v.dense(field.zero());
    for (size_t k = 0; k < b.rows.size(); ++k) {
        E c = dense[b.pivots[k]]; // copy: axpy below writes through dense
        if (!c.is_zero()) detail::axpy_neg(dense, c, b.rows[k]);
    }
    return dense;
}

template <typename F>
bool member(const F& field, const SparseVec<typename F::Elem>& v,
            const SubspaceBasis<typename F::Elem>& b) {
    auto residual = reduce_against(field, v, b);
    for (const auto& c : residual)
        if (!c.is_zero()) return false;
    return true;
}

// Canonical basis of {x : Ax = 0} for the constraint rows A over `unknowns`
// variables.  The standard free-variable nullspace basis is re-echelonized so
// equal solution spaces always serialize identically.
template <typename F>
SubspaceBasis<typename F::Elem> solve_homogeneous(
    const F& field, const std::vector<SparseVec<typename F::Elem>>& constraints,
    uint32_t unknowns) {
    using E = typename F::Elem;
    SubspaceBasis<E> a = rref(field, constraints, unknowns);

    std::vector<bool> is_pivot(unknowns, false);
    for (uint32_t p : a.pivots) is_pivot[p] = true;

    std::vector<SparseVec<E>> nullrows;
    for (uint32_t f = 0; f < unknowns; ++f) {
        if (is_pivot[f]) continue;
        std::vector<E> x(unknowns, field.zero());
        x[f] = field.one();
        for (size_t k = 0; k < a.rows.size(); ++k) {
            uint32_t pos = detail::coeff_index(a.rows[k], f);
            if (pos == UINT32_MAX) continue;
            x[a.pivots[k]] = -a.rows[k].entries[pos].second;
        }
        nullrows.push_back(sparsify(x));
    }
    return rref(field, nullrows, unknowns);
}

} // namespace valrig
