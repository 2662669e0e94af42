#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dist_module.hpp"
#include "errors.hpp"
#include "gfp.hpp"
#include "linalg.hpp"
#include "sparse.hpp"

namespace valrig {

// Dense matrix, indexed [dst][src]: column s holds the image of source
// basis vector s in destination coordinates.  Composition therefore reads
// right to left: the matrix of "phi then psi" is mat(psi) * mat(phi).
template <typename E>
using DenseMat = std::vector<std::vector<E>>;

template <typename FT>
DenseMat<typename FT::Elem> identity_mat(const FT& f, uint32_t n) {
    DenseMat<typename FT::Elem> m(n, std::vector<typename FT::Elem>(n, f.zero()));
    for (uint32_t i = 0; i < n; ++i) m[i][i] = f.one();
    return m;
}

template <typename FT>
DenseMat<typename FT::Elem> mat_mul(const FT& f, const DenseMat<typename FT::Elem>& a,
                                    const DenseMat<typename FT::Elem>& b) {
    if (a.empty() || b.empty() || a[0].size() != b.size())
        throw validation_error("matrix product shape mismatch");
    DenseMat<typename FT::Elem> out(a.size(), std::vector<typename FT::Elem>(b[0].size(), f.zero()));
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t k = 0; k < b.size(); ++k) {
            if (a[i][k].is_zero()) continue;
            for (size_t j = 0; j < b[0].size(); ++j) out[i][j] += a[i][k] * b[k][j];
        }
    return out;
}

// The c with m = c * identity, when one exists.
template <typename FT>
std::optional<typename FT::Elem> scalar_of(const FT& f, const DenseMat<typename FT::Elem>& m) {
    if (m.empty() || m.size() != m[0].size()) return std::nullopt;
    typename FT::Elem c = m[0][0];
    for (size_t i = 0; i < m.size(); ++i)
        for (size_t j = 0; j < m.size(); ++j) {
            if (i == j ? m[i][j] != c : !m[i][j].is_zero()) return std::nullopt;
        }
    return c;
}

// Image of a sparse source vector under a dense matrix.
template <typename FT>
std::vector<typename FT::Elem> apply_mat(const FT& f, const DenseMat<typename FT::Elem>& m,
                                         const SparseVec<typename FT::Elem>& g) {
    std::vector<typename FT::Elem> img(m.size(), f.zero());
    for (const auto& [s, c] : g.entries)
        for (size_t d = 0; d < m.size(); ++d) img[d] += m[d][s] * c;
    return img;
}

// Basis of the space of module homomorphisms X -> Y: linear maps carrying
// every distinguished submodule of X into its counterpart in Y.  Matrices
// are stored flattened (row d, column s at position d * src_rank + s) in
// canonical reduced echelon form, so equal hom spaces compare equal.
template <typename FT>
struct HomBasis {
    FT field;
    uint32_t src_rank = 0;
    uint32_t dst_rank = 0;
    bool endo = false; // source and destination are the same module
    SubspaceBasis<typename FT::Elem> space;

    size_t dim() const { return space.rank(); }

    static uint32_t flat_index(uint32_t d, uint32_t s, uint32_t src_rank) {
        return d * src_rank + s;
    }

    DenseMat<typename FT::Elem> matrix(size_t i) const {
        DenseMat<typename FT::Elem> m(dst_rank,
                                      std::vector<typename FT::Elem>(src_rank, field.zero()));
        for (const auto& [u, c] : space.rows.at(i).entries) m[u / src_rank][u % src_rank] = c;
        return m;
    }

    std::vector<DenseMat<typename FT::Elem>> mats() const {
        std::vector<DenseMat<typename FT::Elem>> out;
        for (size_t i = 0; i < dim(); ++i) out.push_back(matrix(i));
        return out;
    }
};

template <typename E>
struct ScalarVerdict {
    bool scalar_only = false;
    std::optional<DenseMat<E>> witness; // non-scalar solution when available
};

namespace detail {

template <typename FT>
void check_hom_inputs(const DistModule<FT>& x, const DistModule<FT>& y) {
    if (!(x.field == y.field))
        throw validation_error("hom requires both modules over the same field (" + x.field.name() +
                               " vs " + y.field.name() + ")");
    auto xk = x.keys(), yk = y.keys();
    if (xk != yk) {
        std::string diff;
        for (const auto& w : xk) {
            if (!std::binary_search(yk.begin(), yk.end(), w)) { diff = w.str(); break; }
        }
        if (diff.empty())
            for (const auto& w : yk)
                if (!std::binary_search(xk.begin(), xk.end(), w)) { diff = w.str(); break; }
        throw validation_error("submodule key sets differ (first mismatch: " + diff + ")");
    }
}

// One echelonized target span per slot, in slot order.
template <typename FT>
std::vector<SubspaceBasis<typename FT::Elem>> slot_spans(const FT& f, const DistModule<FT>& y) {
    std::vector<SubspaceBasis<typename FT::Elem>> spans;
    spans.reserve(y.slots.size());
    for (const auto& [w, gens] : y.slots) spans.push_back(rref(f, gens, y.rank()));
    return spans;
}

} // namespace detail

// Whether the matrix carries every distinguished submodule of X into the
// corresponding span in Y.  The raw constraint check, usable on any matrix.
template <typename FT>
bool is_module_hom(const DistModule<FT>& x, const DistModule<FT>& y,
                   const DenseMat<typename FT::Elem>& mat) {
    detail::check_hom_inputs(x, y);
    if (mat.size() != y.rank()) throw validation_error("matrix row count differs from target rank");
    for (const auto& row : mat)
        if (row.size() != x.rank()) throw validation_error("matrix column count differs from source rank");

    auto spans = detail::slot_spans(x.field, y);
    for (size_t i = 0; i < x.slots.size(); ++i) {
        for (const auto& g : x.slots[i].second) {
            auto img = apply_mat(x.field, mat, g);
            if (!member(x.field, sparsify(img), spans[i])) return false;
        }
    }
    return true;
}

// Solves for all homomorphisms X -> Y.  For each slot the target span is
// echelonized once; "image of g lies in the span" then contributes one
// linear condition per non-pivot coordinate.  The solution space is
// canonical, and every basis matrix is re-verified against the raw
// constraints before being returned.
template <typename FT>
HomBasis<FT> hom_space(const DistModule<FT>& x, const DistModule<FT>& y) {
    using E = typename FT::Elem;
    detail::check_hom_inputs(x, y);

    const FT& f = x.field;
    const uint32_t sr = x.rank(), dr = y.rank();
    const uint32_t unknowns = dr * sr;
    auto spans = detail::slot_spans(f, y);

    std::vector<SparseVec<E>> rows;
    for (size_t i = 0; i < x.slots.size(); ++i) {
        const auto& span = spans[i];
        std::vector<bool> is_pivot(dr, false);
        for (uint32_t p : span.pivots) is_pivot[p] = true;

        for (const auto& g : x.slots[i].second) {
            if (g.is_zero()) continue;
            for (uint32_t c = 0; c < dr; ++c) {
                if (is_pivot[c]) continue;
                // img[c] - sum_r span_r[c] * img[pivot_r] = 0, expanded over
                // the unknowns through img[d] = sum_s mat[d][s] g[s].
                std::vector<std::pair<uint32_t, E>> terms;
                for (const auto& [s, gs] : g.entries)
                    terms.emplace_back(HomBasis<FT>::flat_index(c, s, sr), gs);
                for (size_t r = 0; r < span.rows.size(); ++r) {
                    uint32_t pos = detail::coeff_index(span.rows[r], c);
                    if (pos == UINT32_MAX) continue;
                    E yc = span.rows[r].entries[pos].second;
                    for (const auto& [s, gs] : g.entries)
                        terms.emplace_back(HomBasis<FT>::flat_index(span.pivots[r], s, sr),
                                           -(yc * gs));
                }
                std::sort(terms.begin(), terms.end(),
                          [](const auto& a, const auto& b) { return a.first < b.first; });
                SparseVec<E> row(unknowns);
                for (auto& [u, c2] : terms) row.push(u, c2);
                if (!row.is_zero()) rows.push_back(std::move(row));
            }
        }
    }

    HomBasis<FT> h{f, sr, dr, x.basis == y.basis && x.slots == y.slots,
                   solve_homogeneous(f, rows, unknowns)};

    for (size_t i = 0; i < h.dim(); ++i) {
        auto m = h.matrix(i);
        for (size_t j = 0; j < x.slots.size(); ++j) {
            for (const auto& g : x.slots[j].second) {
                auto img = apply_mat(f, m, g);
                if (!member(f, sparsify(img), spans[j]))
                    throw breach_error("solved basis matrix " + std::to_string(i) +
                                       " violates slot " + x.slots[j].first.str());
            }
        }
    }
    return h;
}

template <typename FT>
HomBasis<FT> end_space(const DistModule<FT>& x) {
    HomBasis<FT> h = hom_space(x, x);
    SparseVec<typename FT::Elem> id(h.src_rank * h.src_rank);
    for (uint32_t i = 0; i < h.src_rank; ++i)
        id.push(HomBasis<FT>::flat_index(i, i, h.src_rank), x.field.one());
    if (!member(x.field, id, h.space))
        throw breach_error("identity is missing from an endomorphism space");
    return h;
}

// Decides whether the endomorphism space is exactly the scalars.  A
// non-scalar witness is returned whenever one exists: any non-scalar basis
// matrix is automatically independent of the identity.
template <typename FT>
ScalarVerdict<typename FT::Elem> is_scalar_only(const HomBasis<FT>& h) {
    if (!h.endo || h.src_rank != h.dst_rank)
        throw validation_error("scalar verdict requires an endomorphism space");
    ScalarVerdict<typename FT::Elem> v;
    if (h.dim() == 1 && scalar_of(h.field, h.matrix(0)).has_value()) {
        v.scalar_only = true;
        return v;
    }
    for (size_t i = 0; i < h.dim(); ++i) {
        auto m = h.matrix(i);
        if (!scalar_of(h.field, m).has_value()) {
            v.witness = std::move(m);
            break;
        }
    }
    return v;
}

// Exhaustive reference solver over a prime field: enumerates every matrix,
// filters by the raw constraints, and echelonizes the survivors.  Guarded
// to p^(ranks product) <= 2^20 states by default.
inline HomBasis<FpField> brute_force_hom_space(const DistModule<FpField>& x,
                                               const DistModule<FpField>& y,
                                               uint64_t guard = uint64_t(1) << 20) {
    detail::check_hom_inputs(x, y);
    const FpField& f = x.field;
    const uint32_t sr = x.rank(), dr = y.rank();
    const uint32_t unknowns = dr * sr;

    uint64_t states = 1;
    for (uint32_t i = 0; i < unknowns; ++i) {
        if (states > guard / f.p) throw validation_error("state space exceeds the enumeration guard");
        states *= f.p;
    }

    auto spans = detail::slot_spans(f, y);
    std::vector<uint32_t> digits(unknowns, 0);
    std::vector<SparseVec<Fp>> survivors;
    for (uint64_t it = 0; it < states; ++it) {
        DenseMat<Fp> m(dr, std::vector<Fp>(sr, f.zero()));
        for (uint32_t u = 0; u < unknowns; ++u) m[u / sr][u % sr] = Fp(digits[u], f.p);

        bool ok = true;
        for (size_t i = 0; ok && i < x.slots.size(); ++i)
            for (const auto& g : x.slots[i].second) {
                if (!member(f, sparsify(apply_mat(f, m, g)), spans[i])) { ok = false; break; }
            }
        if (ok) {
            SparseVec<Fp> flat(unknowns);
            for (uint32_t u = 0; u < unknowns; ++u)
                if (digits[u] != 0) flat.push(u, Fp(digits[u], f.p));
            survivors.push_back(std::move(flat));
        }

        for (uint32_t u = 0; u < unknowns; ++u) {
            if (++digits[u] < f.p) break;
            digits[u] = 0;
        }
    }

    return HomBasis<FpField>{f, sr, dr, x.basis == y.basis && x.slots == y.slots,
                             rref(f, survivors, unknowns)};
}

} // namespace valrig
