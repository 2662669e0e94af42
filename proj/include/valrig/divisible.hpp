#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dist_module.hpp"
#include "errors.hpp"
#include "gfp.hpp"
#include "hom_space.hpp"
#include "rational.hpp"
#include "windex.hpp"
#include "zlattice.hpp"

namespace valrig {

inline std::vector<uint64_t> first_primes(size_t count) {
    std::vector<uint64_t> out;
    for (uint64_t n = 2; out.size() < count; ++n)
        if (is_prime_u64(n)) out.push_back(n);
    return out;
}

// One prime per submodule slot; distinctness makes the family pairwise
// comaximal in Z, which is the property every divisibility argument uses.
struct PrimeAssignment {
    std::vector<std::pair<WIndex, uint64_t>> entries; // sorted by key

    const uint64_t* find(const WIndex& w) const {
        auto it = std::lower_bound(entries.begin(), entries.end(), w,
                                   [](const auto& e, const WIndex& k) { return e.first < k; });
        if (it != entries.end() && it->first == w) return &it->second;
        return nullptr;
    }

    bool operator==(const PrimeAssignment&) const = default;
};

// Pairs the slot keys with primes from the list, in key order.
inline PrimeAssignment assign_primes(const std::vector<WIndex>& keys,
                                     const std::vector<uint64_t>& primes) {
    if (primes.size() < keys.size())
        throw validation_error("prime list too short: " + std::to_string(keys.size()) +
                               " slots need " + std::to_string(keys.size()) + " primes, got " +
                               std::to_string(primes.size()));
    for (size_t i = 0; i < keys.size(); ++i) {
        if (!is_prime_u64(primes[i]))
            throw validation_error(std::to_string(primes[i]) + " is not prime");
        for (size_t j = 0; j < i; ++j)
            if (primes[i] == primes[j])
                throw validation_error("comaximality violated: prime " + std::to_string(primes[i]) +
                                       " assigned to both " + keys[j].str() + " and " + keys[i].str());
    }
    PrimeAssignment a;
    for (size_t i = 0; i < keys.size(); ++i) a.entries.emplace_back(keys[i], primes[i]);
    std::sort(a.entries.begin(), a.entries.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    return a;
}

// The subset-extended module together with its prime assignment.  This
// descriptor stands for the hull submodule generated by making each slot
// divisible by arbitrary powers of its own prime; nothing infinite is
// materialized.
struct DivisibleModule {
    DistModule<QField> base;
    PrimeAssignment primes;
};

inline DivisibleModule build_divisible(DistModule<QField> base, PrimeAssignment primes) {
    if (!base.slot(WIndex::d2()))
        throw validation_error("divisible construction expects the subset-extended form (D2 present)");
    for (const auto& [w, gens] : base.slots) {
        if (!primes.find(w))
            throw validation_error("no prime assigned to slot " + w.str());
    }
    std::vector<uint64_t> used;
    for (const auto& [w, p] : primes.entries) {
        if (!is_prime_u64(p))
            throw validation_error(std::to_string(p) + " is not prime (slot " + w.str() + ")");
        if (std::find(used.begin(), used.end(), p) != used.end())
            throw validation_error("comaximality violated: prime " + std::to_string(p) +
                                   " appears on two slots");
        used.push_back(p);
    }
    return DivisibleModule{std::move(base), std::move(primes)};
}

// Whether q lies in the closure of Z under division by p alone, i.e. its
// reduced denominator is a power of p.
inline bool p_power_denominator(const Rat& q, uint64_t p) {
    mpz_class den = q.den();
    mpz_class pz(static_cast<unsigned long>(p));
    while (den % pz == 0) den /= pz;
    return den == 1;
}

struct DivisibleTrace {
    size_t q_dim = 0;                   // dimension of the rational hom space
    std::optional<Rat> generator;       // its scalar, when one-dimensional
    uint64_t p0 = 0, p1 = 0;            // primes of the first two slots
    Rat probe{1, 2};                    // fixed non-integer specimen
    bool probe_in_p0 = false;
    bool probe_in_p1 = false;
    bool probe_accepted = false;        // stays false: 1/2 never passes both
    bool integrality_applied = false;
};

struct DivisibleHom {
    bool zero = false;     // hom group is trivial
    bool integer_line = false; // hom group is Z times the identity
    DivisibleTrace trace;
};

// Hom group between two divisible hulls over the same provenance.  Every
// hom extends uniquely to the rational span, so the rational hom space is
// computed first; a trivial space settles the matter, and a scalar line
// is cut down to the integers because an admissible scalar must be
// infinitely divisible by two distinct primes at once.  Anything else
// contradicts rigidity of the base system.
inline DivisibleHom hom_divisible(const DivisibleModule& mu, const DivisibleModule& mv) {
    const auto& bp = mu.base.prov;
    const auto& vp = mv.base.prov;
    if (!(bp.pool == vp.pool) || !(bp.assignment == vp.assignment) || bp.steps != vp.steps ||
        bp.certified != vp.certified)
        throw validation_error("divisible hom requires both hulls over the same built module");
    if (!(mu.primes == mv.primes))
        throw validation_error("divisible hom requires identical prime assignments");

    HomBasis<QField> h = hom_space(mu.base, mv.base);

    DivisibleHom out;
    out.trace.q_dim = h.dim();

    auto bad_base = [&](const std::string& why) {
        if (bp.certified) throw breach_error("base system is not rigid: " + why);
        throw validation_error("base system is not rigid: " + why);
    };

    if (h.dim() == 0) {
        out.zero = true;
        return out;
    }
    if (h.dim() > 1) bad_base("rational hom space has dimension " + std::to_string(h.dim()));

    auto c = scalar_of(mu.base.field, h.matrix(0));
    if (!c) bad_base("rational hom space generator is not scalar");
    out.trace.generator = *c;

    const uint64_t* p0 = mu.primes.find(WIndex::d0());
    const uint64_t* p1 = mu.primes.find(WIndex::d1());
    if (!p0 || !p1) throw breach_error("prime assignment lost its leading slots");
    out.trace.p0 = *p0;
    out.trace.p1 = *p1;
    out.trace.integrality_applied = true;

    // The specimen shows the filter is real: it clears at most one prime.
    out.trace.probe_in_p0 = p_power_denominator(out.trace.probe, *p0);
    out.trace.probe_in_p1 = p_power_denominator(out.trace.probe, *p1);
    out.trace.probe_accepted = out.trace.probe_in_p0 && out.trace.probe_in_p1;
    if (out.trace.probe_accepted)
        throw breach_error("integrality filter accepted a non-integer scalar");

    out.integer_line = true;
    return out;
}

// Finite-stage membership in the divisible hull: decides whether x lies in
// the sum over slots of p_slot^{-n} times the integer span of that slot's
// generators.  Denominators are cleared and the question becomes integer
// lattice membership.  Monotone in n; the full hull is the union over n.
inline bool bounded_membership(const SparseVec<Rat>& x, const DivisibleModule& m, uint32_t n) {
    if (x.dim != m.base.rank()) throw validation_error("vector dimension differs from module rank");

    // Common scale: every slot prime to the n-th power, times the target's
    // denominators.
    mpz_class scale = 1;
    for (const auto& [w, p] : m.primes.entries) {
        mpz_class pn;
        mpz_ui_pow_ui(pn.get_mpz_t(), static_cast<unsigned long>(p), n);
        scale *= pn;
    }
    for (const auto& [i, c] : x.entries) scale = lcm(scale, c.den());

    std::vector<std::vector<mpz_class>> rows;
    for (const auto& [w, gens] : m.base.slots) {
        const uint64_t* p = m.primes.find(w);
        if (!p) throw validation_error("no prime assigned to slot " + w.str());
        mpz_class pn;
        mpz_ui_pow_ui(pn.get_mpz_t(), static_cast<unsigned long>(*p), n);
        for (const auto& g : gens) {
            std::vector<mpz_class> row(m.base.rank(), 0);
            for (const auto& [i, c] : g.entries) {
                // generator entries are integers by construction
                mpz_class num = c.num() * scale;
                mpz_class rem = num % (c.den() * pn);
                if (rem != 0) throw breach_error("slot generator scaling left a remainder");
                row[i] = num / (c.den() * pn);
            }
            rows.push_back(std::move(row));
        }
    }

    std::vector<mpz_class> target(m.base.rank(), 0);
    for (const auto& [i, c] : x.entries) {
        mpz_class num = c.num() * scale;
        if (num % c.den() != 0) throw breach_error("target scaling left a remainder");
        target[i] = num / c.den();
    }

    return lattice_member(lattice_echelon(std::move(rows)), std::move(target));
}

} // namespace valrig
