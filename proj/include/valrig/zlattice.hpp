#pragma once

#include <gmpxx.h>

#include <cstddef>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace valrig {

// Integer row lattices.  Echelonization by column-wise gcd elimination
// yields a triangular basis (pivot columns strictly increasing, pivots
// positive); membership then reduces the target row greedily and succeeds
// iff the residue is zero.  Entries above pivots are not normalized; only
// membership queries are served, and those don't need full normal form.

inline std::vector<std::vector<mpz_class>> lattice_echelon(std::vector<std::vector<mpz_class>> rows) {
    std::vector<std::vector<mpz_class>> out;
    if (rows.empty()) return out;
    const size_t dim = rows[0].size();
    for (const auto& r : rows)
        if (r.size() != dim) throw validation_error("ragged lattice rows");

    for (size_t col = 0; col < dim; ++col) {
        // Repeatedly cancel the two entries of smallest magnitude in this
        // column until at most one row still hits it.
        while (true) {
            size_t a = rows.size(), b = rows.size();
            for (size_t i = 0; i < rows.size(); ++i) {
                if (rows[i][col] == 0) continue;
                if (a == rows.size()) {
                    a = i;
                } else if (b == rows.size()) {
                    b = i;
                } else {
                    // keep the two smallest in |.|
                    mpz_class va = abs(rows[a][col]), vb = abs(rows[b][col]);
                    size_t big = (va >= vb) ? a : b;
                    mpz_class vi = abs(rows[i][col]), vbig = abs(rows[big][col]);
                    if (vi < vbig) {
                        if (big == a) a = i; else b = i;
                    }
                }
            }
            if (b == rows.size()) {
                if (a != rows.size()) {
                    if (rows[a][col] < 0)
                        for (auto& e : rows[a]) e = -e;
                    out.push_back(std::move(rows[a]));
                    rows.erase(rows.begin() + static_cast<long>(a));
                }
                break;
            }
            mpz_class va = abs(rows[a][col]), vb = abs(rows[b][col]);
            if (va < vb) std::swap(a, b);
            mpz_class q = rows[a][col] / rows[b][col]; // truncated: remainder shrinks
            for (size_t j = 0; j < dim; ++j) rows[a][j] -= q * rows[b][j];
        }
    }
    return out;
}

inline bool lattice_member(const std::vector<std::vector<mpz_class>>& echelon,
                           std::vector<mpz_class> target) {
    for (const auto& row : echelon) {
        size_t piv = 0;
        while (piv < row.size() && row[piv] == 0) ++piv;
        if (piv == row.size()) continue;
        if (piv >= target.size()) throw validation_error("lattice dimension mismatch");
        if (target[piv] % row[piv] != 0) {
            // earlier columns of `target` are already zero, so this residue
            // can never be cleared by later rows
            continue;
        }
        mpz_class q = target[piv] / row[piv];
        if (q != 0)
            for (size_t j = 0; j < row.size(); ++j) target[j] -= q * row[j];
    }
    for (const auto& e : target)
        if (e != 0) return false;
    return true;
}

} // namespace valrig
