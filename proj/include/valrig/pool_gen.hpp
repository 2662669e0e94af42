#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "certify.hpp"
#include "errors.hpp"
#include "hom_search.hpp"
#include "tree.hpp"

namespace valrig {

// All randomness in the library flows through this wrapper around
// std::mt19937_64.  The engine's output sequence is pinned by the C++
// standard, and bounded draws use rejection sampling on the raw 64-bit
// stream, so identical seeds reproduce identical structures on every
// platform.
class SeededRng {
public:
    explicit SeededRng(uint64_t seed) : eng_(seed) {}

    uint64_t next() { return eng_(); }

    // Unbiased draw from [0, n).
    uint32_t below(uint32_t n) {
        if (n == 0) throw validation_error("empty sampling range");
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do { x = eng_(); } while (x >= limit);
        return static_cast<uint32_t>(x % n);
    }

    // First k entries of a seeded shuffle of [0, n).
    std::vector<uint32_t> sample(uint32_t n, uint32_t k) {
        std::vector<uint32_t> pool(n);
        std::iota(pool.begin(), pool.end(), 0);
        for (uint32_t i = 0; i < k; ++i) {
            uint32_t j = i + below(n - i);
            std::swap(pool[i], pool[j]);
        }
        pool.resize(k);
        return pool;
    }

private:
    std::mt19937_64 eng_;
};

namespace detail {

// One random tree within bounds.  Sibling valuations are drawn distinct,
// which forces every self-hom to be the identity and biases pairs toward
// rigidity; the certificate, not this bias, is what downstream code trusts.
inline ValuatedTree random_tree(SeededRng& rng, const TreeBounds& b) {
    std::vector<std::pair<Node, uint32_t>> pairs;
    pairs.push_back({Node{}, rng.below(b.vmax + 1)});
    std::vector<Node> frontier = {Node{}};
    uint32_t cmax = std::min(b.lambda, b.vmax + 1);
    for (uint32_t level = 0; level < b.depth; ++level) {
        std::vector<Node> next;
        for (const Node& parent : frontier) {
            uint32_t c = level == 0 ? 1 + rng.below(cmax) : rng.below(cmax + 1);
            if (c == 0) continue;
            auto labels = rng.sample(b.lambda, c);
            std::sort(labels.begin(), labels.end());
            auto vals = rng.sample(b.vmax + 1, c);
            for (uint32_t i = 0; i < c; ++i) {
                Node child = parent;
                child.push_back(labels[i]);
                pairs.push_back({child, vals[i]});
                next.push_back(std::move(child));
            }
        }
        frontier = std::move(next);
    }
    return ValuatedTree::from_pairs(std::move(pairs));
}

} // namespace detail

// Seeded rejection sampling for a strongly rigid pool: `count` pairwise
// distinct trees with no homomorphisms between distinct members and only
// the identity self-hom.  Fails with generation statistics once the attempt
// budget is exhausted (tight bounds genuinely do run out of trees).
inline TreePool generate_pool(uint32_t lambda, uint32_t depth, uint32_t vmax, uint32_t count,
                              uint64_t seed, uint64_t budget = 0) {
    if (lambda < 2) throw validation_error("lambda must be at least 2");
    if (depth < 1) throw validation_error("depth must be at least 1");
    if (count < 1) throw validation_error("pool count must be at least 1");
    if (budget == 0) budget = std::max<uint64_t>(2000, 1000ull * count);

    TreeBounds bounds{lambda, depth, vmax};
    SeededRng rng(seed);
    TreePool pool;
    pool.lambda = lambda;
    pool.depth = depth;
    pool.vmax = vmax;
    pool.seed = seed;

    uint64_t attempts = 0;
    while (pool.trees.size() < count) {
        if (attempts >= budget)
            throw generation_error(
                "pool generation exhausted: " + std::to_string(attempts) + " attempts yielded " +
                std::to_string(pool.trees.size()) + " of " + std::to_string(count) +
                " requested trees (lambda=" + std::to_string(lambda) +
                ", depth=" + std::to_string(depth) + ", vmax=" + std::to_string(vmax) + ")");
        ++attempts;
        ValuatedTree t = detail::random_tree(rng, bounds);
        if (!validate_tree(t, bounds).ok) continue;
        bool reject = false;
        for (const auto& s : pool.trees)
            if (s == t) { reject = true; break; }
        if (reject) continue;
        if (enumerate_valuated_homs(t, t, 2).homs.size() != 1) continue;
        for (const auto& s : pool.trees) {
            if (find_valuated_hom(t, s).hom || find_valuated_hom(s, t).hom) {
                reject = true;
                break;
            }
        }
        if (reject) continue;
        pool.trees.push_back(std::move(t));
    }

    // the certificate is authoritative; a failure here is a library bug
    if (!certify_pool(pool, true).strong)
        throw breach_error("generated pool failed its own strong certification");
    return pool;
}

} // namespace valrig
