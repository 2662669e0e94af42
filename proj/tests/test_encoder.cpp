#include <catch2/catch_amalgamated.hpp>

#include <valrig/certify.hpp>
#include <valrig/dist_module.hpp>
#include <valrig/gfp.hpp>
#include <valrig/linalg.hpp>
#include <valrig/pool_gen.hpp>
#include <valrig/rational.hpp>
#include <valrig/sindex.hpp>
#include <valrig/windex.hpp>

#include <set>

using namespace valrig;

namespace {

ValuatedTree chain3() {
    return ValuatedTree::from_pairs({{{}, 0}, {{0}, 1}, {{0, 0}, 2}});
}

TreePool chain_pool() {
    TreePool p;
    p.lambda = 2;
    p.depth = 2;
    p.vmax = 3;
    p.seed = 0;
    p.trees = {chain3()};
    return p;
}

// Seven small trees with pairwise distinct root valuations (so no hom can
// cross between them) and distinct sibling valuations everywhere (so each
// only maps to itself identically).  Enough material for two unfolding
// rounds under lambda=2, depth=2, vmax=6.
TreePool seven_pool() {
    TreePool p;
    p.lambda = 2;
    p.depth = 2;
    p.vmax = 6;
    p.seed = 0;
    p.trees = {
        ValuatedTree::from_pairs({{{}, 0}, {{0}, 1}, {{1}, 2}, {{0, 0}, 3}}),
        ValuatedTree::from_pairs({{{}, 1}, {{0}, 0}, {{0, 1}, 2}}),
        ValuatedTree::from_pairs({{{}, 2}, {{1}, 0}}),
        ValuatedTree::from_pairs({{{}, 3}, {{0}, 4}, {{1}, 0}}),
        ValuatedTree::from_pairs({{{}, 4}, {{0}, 2}, {{0, 0}, 0}, {{0, 1}, 5}}),
        ValuatedTree::from_pairs({{{}, 5}, {{1}, 3}, {{1, 1}, 6}}),
        ValuatedTree::from_pairs({{{}, 6}, {{0}, 3}}),
    };
    return p;
}

SIndex ix(std::vector<Node> parts) { return SIndex{std::move(parts)}; }

using Entry = std::pair<uint32_t, Rat>;

std::vector<Entry> entries_of(const SparseVec<Rat>& v) { return v.entries; }

template <typename FT>
const std::vector<SparseVec<typename FT::Elem>>& slot_of(const DistModule<FT>& m, const WIndex& w) {
    const auto* s = m.slot(w);
    REQUIRE(s != nullptr);
    return *s;
}

} // namespace

TEST_CASE("submodule keys order and print consistently") {
    CHECK(WIndex::d0().str() == "D0");
    CHECK(WIndex::d1().str() == "D1");
    CHECK(WIndex::d2().str() == "D2");
    CHECK(WIndex::l1(0, 2).str() == "L1(0,2)");
    CHECK(WIndex::l2(3, 1).str() == "L2(3,1)");
    CHECK(WIndex::l3(2, 0).str() == "L3(2,0)");

    for (const std::string& s :
         {"D0", "D1", "D2", "L1(0,1)", "L2(7,2)", "L3(0,11)"}) {
        CHECK(WIndex::parse(s).str() == s);
    }

    CHECK(WIndex::d0() < WIndex::d1());
    CHECK(WIndex::d1() < WIndex::d2());
    CHECK(WIndex::d2() < WIndex::l1(0, 1));
    CHECK(WIndex::l1(9, 9) < WIndex::l2(0, 1));
    CHECK(WIndex::l2(9, 9) < WIndex::l3(0, 0));
    CHECK(WIndex::l1(0, 2) < WIndex::l1(1, 0));
    CHECK(WIndex::l3(0, 1) < WIndex::l3(1, 0));

    for (const std::string& bad : {"", "D3", "L1", "L1(0)", "L4(0,1)", "L1(x,y)", "l1(0,1)"}) {
        CHECK_THROWS_AS(WIndex::parse(bad), Error);
    }
}

TEST_CASE("basis indices order stratum-major") {
    SIndex root;
    SIndex a = root.child({0});
    SIndex b = root.child({1});
    SIndex c = root.child({0, 0});
    SIndex aa = a.child({1});

    CHECK(root.stratum() == 0);
    CHECK(aa.stratum() == 2);
    CHECK(aa.parent() == a);
    CHECK(root.str() == "()");
    CHECK(c.str() == "(<0,0>)");
    CHECK(aa.str() == "(<0>;<1>)");

    CHECK(sindex_less(root, a));
    CHECK(sindex_less(a, b));
    CHECK(sindex_less(b, c));   // length-major node order inside a part
    CHECK(sindex_less(c, aa));  // lower stratum first
    CHECK_FALSE(sindex_less(a, a));
}

TEST_CASE("unfolding produces the stratified index set") {
    TreePool pool = chain_pool();
    TreeAssignment assign;
    assign.set(SIndex{}, 0);

    Stratified s = build_s(pool, assign, 1);
    REQUIRE(s.strata.size() == 2);
    CHECK(s.strata[0].size() == 1);
    CHECK(s.strata[1].size() == 2);
    REQUIRE(s.flat.size() == 3);
    CHECK(s.flat[0].str() == "()");
    CHECK(s.flat[1].str() == "(<0>)");
    CHECK(s.flat[2].str() == "(<0,0>)");

    CHECK(s.index_of(s.flat[2]) == 2);
    CHECK(s.index_of(ix({{1}})) == -1);
    CHECK(s.index_of(ix({{0}, {0}})) == -1);
}

TEST_CASE("sequential assignment hands out pool positions in index order") {
    TreePool pool = seven_pool();
    TreeAssignment a = sequential_assignment(pool, 2);

    REQUIRE(a.entries.size() == 4);
    CHECK(*a.find(SIndex{}) == 0);
    CHECK(*a.find(ix({{0}})) == 1);
    CHECK(*a.find(ix({{1}})) == 2);
    CHECK(*a.find(ix({{0, 0}})) == 3);
    CHECK(a.find(ix({{1, 1}})) == nullptr);

    Stratified s = build_s(pool, a, 2);
    REQUIRE(s.strata.size() == 3);
    CHECK(s.strata[1].size() == 3);
    CHECK(s.strata[2].size() == 5);
    CHECK(s.flat.size() == 9);
    CHECK(s.flat[4].str() == "(<0>;<0>)");
    CHECK(s.flat[5].str() == "(<0>;<0,1>)");
    CHECK(s.flat[6].str() == "(<1>;<1>)");
    CHECK(s.flat[7].str() == "(<0,0>;<0>)");
    CHECK(s.flat[8].str() == "(<0,0>;<1>)");

    TreePool tiny = chain_pool();
    CHECK_THROWS_WITH(sequential_assignment(tiny, 2),
                      Catch::Matchers::ContainsSubstring("exhausted"));
}

TEST_CASE("assignment gaps and repeats are rejected") {
    TreePool pool = chain_pool();
    pool.trees.push_back(ValuatedTree::from_pairs({{{}, 1}, {{1}, 0}}));

    TreeAssignment empty;
    CHECK_THROWS_WITH(build_s(pool, empty, 1),
                      Catch::Matchers::ContainsSubstring("covers no tree"));

    TreeAssignment oob;
    oob.set(SIndex{}, 9);
    CHECK_THROWS_WITH(build_s(pool, oob, 1), Catch::Matchers::ContainsSubstring("the pool holds"));

    // Both stratum-1 indices fed the same pool position.
    TreeAssignment rep;
    rep.set(SIndex{}, 0);
    rep.set(ix({{0}}), 1);
    rep.set(ix({{0, 0}}), 1);
    CHECK_THROWS_WITH(build_s(pool, rep, 2), Catch::Matchers::ContainsSubstring("repeats a tree"));
    CHECK(build_s(pool, rep, 2, /*allow_repeats=*/true).flat.size() == 5);

    // Distinct positions holding equal trees are repeats by content.
    TreePool dup = pool;
    dup.trees.push_back(dup.trees[1]);
    TreeAssignment byContent;
    byContent.set(SIndex{}, 0);
    byContent.set(ix({{0}}), 1);
    byContent.set(ix({{0, 0}}), 2);
    CHECK_THROWS_WITH(build_s(dup, byContent, 2),
                      Catch::Matchers::ContainsSubstring("repeats a tree"));
}

TEST_CASE("chain module carries exactly the expected generators") {
    TreePool pool = chain_pool();
    TreeAssignment assign = sequential_assignment(pool, 1);
    QField q;
    DistModule<QField> m = build_module(q, pool, assign, 1, /*certified=*/false);

    REQUIRE(m.rank() == 3);
    CHECK(m.basis[0].str() == "()");
    CHECK(m.basis[1].str() == "(<0>)");
    CHECK(m.basis[2].str() == "(<0,0>)");
    CHECK(m.basis_index(ix({{0, 0}})) == 2);
    CHECK(m.basis_index(ix({{1}})) == -1);

    std::vector<std::string> keys;
    for (const WIndex& w : m.keys()) keys.push_back(w.str());
    CHECK(keys == std::vector<std::string>{"D0", "D1", "L1(0,1)", "L1(0,2)", "L2(0,1)", "L2(0,2)",
                                           "L3(0,0)", "L3(1,0)", "L3(2,0)", "L3(3,0)"});

    const Rat one(1), neg(-1);
    const auto& d0 = slot_of(m, WIndex::d0());
    REQUIRE(d0.size() == 2);
    CHECK(entries_of(d0[0]) == std::vector<Entry>{{0, one}, {1, neg}});
    CHECK(entries_of(d0[1]) == std::vector<Entry>{{0, one}, {2, neg}});

    const auto& d1 = slot_of(m, WIndex::d1());
    REQUIRE(d1.size() == 1);
    CHECK(entries_of(d1[0]) == std::vector<Entry>{{0, one}});

    CHECK(entries_of(slot_of(m, WIndex::l1(0, 1)).at(0)) == std::vector<Entry>{{0, one}, {1, neg}});
    CHECK(entries_of(slot_of(m, WIndex::l1(0, 2)).at(0)) == std::vector<Entry>{{1, one}, {2, neg}});
    CHECK(entries_of(slot_of(m, WIndex::l2(0, 1)).at(0)) == std::vector<Entry>{{1, one}});
    CHECK(entries_of(slot_of(m, WIndex::l2(0, 2)).at(0)) == std::vector<Entry>{{2, one}});
    CHECK(entries_of(slot_of(m, WIndex::l3(0, 0)).at(0)) == std::vector<Entry>{{0, one}});
    CHECK(entries_of(slot_of(m, WIndex::l3(1, 0)).at(0)) == std::vector<Entry>{{1, one}});
    CHECK(entries_of(slot_of(m, WIndex::l3(2, 0)).at(0)) == std::vector<Entry>{{2, one}});
    CHECK(slot_of(m, WIndex::l3(3, 0)).empty());

    CHECK(m.slot(WIndex::d2()) == nullptr);
    CHECK(m.slot(WIndex::l1(1, 1)) == nullptr);
    CHECK_FALSE(m.prov.certified);
    CHECK(m.prov.steps == 1);
    CHECK(m.prov.pool == pool);
}

TEST_CASE("difference generators reduce modulo a small prime") {
    TreePool pool = chain_pool();
    TreeAssignment assign = sequential_assignment(pool, 1);
    FpField f2(2);
    DistModule<FpField> m = build_module(f2, pool, assign, 1, false);

    const auto& d0 = slot_of(m, WIndex::d0());
    REQUIRE(d0.size() == 2);
    // -1 = 1 mod 2: both entries are 1
    CHECK(d0[0].entries ==
          std::vector<std::pair<uint32_t, Fp>>{{0, Fp(1, 2)}, {1, Fp(1, 2)}});
    CHECK(d0[1].entries ==
          std::vector<std::pair<uint32_t, Fp>>{{0, Fp(1, 2)}, {2, Fp(1, 2)}});
}

TEST_CASE("two-round module satisfies the span and partition laws") {
    TreePool pool = seven_pool();
    RigidityCertificate cert = certify_pool(pool);
    REQUIRE(cert.strong);

    TreeAssignment assign = sequential_assignment(pool, 2);
    QField q;
    DistModule<QField> m = build_module(q, pool, assign, 2, cert.strong);
    Stratified s = build_s(pool, assign, 2);

    REQUIRE(m.rank() == 9);
    CHECK(m.keys().size() == 2 + 4 + 4 + 14);

    // Rank bookkeeping: one basis element per index, strata sizes add up.
    size_t total = 0;
    for (const auto& level : s.strata) total += level.size();
    CHECK(total == m.rank());

    // D0 spans the sum-zero hyperplane; adding D1 recovers everything.
    auto d0_basis = rref(q, slot_of(m, WIndex::d0()), m.rank());
    CHECK(d0_basis.rank() == m.rank() - 1);
    SparseVec<Rat> e0(m.rank());
    e0.push(0, q.one());
    CHECK_FALSE(member(q, e0, d0_basis));
    auto both = slot_of(m, WIndex::d0());
    both.push_back(e0);
    CHECK(rref(q, both, m.rank()).rank() == m.rank());

    // Frozen spot checks of generation order deep in round two.
    CHECK(entries_of(slot_of(m, WIndex::l1(1, 2)).at(0)) ==
          std::vector<Entry>{{4, Rat(1)}, {5, Rat(-1)}});
    const auto& l3_2_1 = slot_of(m, WIndex::l3(2, 1));
    REQUIRE(l3_2_1.size() == 2);
    CHECK(entries_of(l3_2_1[0]) == std::vector<Entry>{{5, Rat(1)}});
    CHECK(entries_of(l3_2_1[1]) == std::vector<Entry>{{2, Rat(1)}});

    for (uint32_t n = 0; n < 2; ++n) {
        // Level slices partition the next stratum.
        std::set<uint32_t> seen;
        size_t expect = s.strata[n + 1].size();
        for (uint32_t k = 1; k <= pool.depth; ++k) {
            const auto& l2 = slot_of(m, WIndex::l2(n, k));
            const auto& l1 = slot_of(m, WIndex::l1(n, k));
            CHECK(l1.size() == l2.size());
            for (const auto& g : l2) {
                REQUIRE(g.entries.size() == 1);
                CHECK(seen.insert(g.entries[0].first).second);
            }

            // Every difference generator lies in the span of the adjacent
            // level slices (level 1 leans on the stratum roots instead).
            std::vector<SparseVec<Rat>> context = l2;
            if (k >= 2) {
                const auto& prev = slot_of(m, WIndex::l2(n, k - 1));
                context.insert(context.end(), prev.begin(), prev.end());
            } else {
                for (const SIndex& at : s.strata[n]) {
                    SparseVec<Rat> u(m.rank());
                    u.push(static_cast<uint32_t>(s.index_of(at)), q.one());
                    context.push_back(u);
                }
            }
            auto ctx_basis = rref(q, context, m.rank());
            for (const auto& g : l1) CHECK(member(q, g, ctx_basis));
        }
        CHECK(seen.size() == expect);

        // Valuation slices partition stratum n together with stratum n+1.
        std::set<uint32_t> vseen;
        for (uint32_t k = 0; k <= pool.vmax; ++k) {
            for (const auto& g : slot_of(m, WIndex::l3(k, n))) {
                REQUIRE(g.entries.size() == 1);
                CHECK(vseen.insert(g.entries[0].first).second);
            }
        }
        CHECK(vseen.size() == s.strata[n].size() + s.strata[n + 1].size());
    }

    // Same inputs, same module.
    DistModule<QField> again = build_module(q, pool, assign, 2, cert.strong);
    CHECK(again.basis == m.basis);
    CHECK(again.slots == m.slots);
    CHECK(again.prov == m.prov);
}

TEST_CASE("subset slot lists the chosen basis elements") {
    TreePool pool = chain_pool();
    TreeAssignment assign = sequential_assignment(pool, 1);
    QField q;
    DistModule<QField> m = build_module(q, pool, assign, 1, false);

    DistModule<QField> mu = build_module_subset(m, {ix({{0, 0}}), SIndex{}});
    const auto& d2 = slot_of(mu, WIndex::d2());
    REQUIRE(d2.size() == 2);
    CHECK(entries_of(d2[0]) == std::vector<Entry>{{0, Rat(1)}});
    CHECK(entries_of(d2[1]) == std::vector<Entry>{{2, Rat(1)}});
    REQUIRE(mu.prov.subset.has_value());
    CHECK(mu.prov.subset->size() == 2);
    CHECK((*mu.prov.subset)[0] == SIndex{});
    CHECK(mu.keys()[2].str() == "D2");

    DistModule<QField> empty_u = build_module_subset(m, {});
    CHECK(slot_of(empty_u, WIndex::d2()).empty());
    REQUIRE(empty_u.prov.subset.has_value());
    CHECK(empty_u.prov.subset->empty());

    CHECK_THROWS_WITH(build_module_subset(m, {SIndex{}, SIndex{}}),
                      Catch::Matchers::ContainsSubstring("repeats index"));
    CHECK_THROWS_WITH(build_module_subset(m, {ix({{1}})}),
                      Catch::Matchers::ContainsSubstring("not a basis index"));
    CHECK_THROWS_WITH(build_module_subset(mu, {SIndex{}}),
                      Catch::Matchers::ContainsSubstring("already carries"));
}

TEST_CASE("zero rounds leave just the base line") {
    TreePool pool = chain_pool();
    QField q;
    DistModule<QField> m = build_module(q, pool, TreeAssignment{}, 0, false);

    REQUIRE(m.rank() == 1);
    CHECK(m.basis[0] == SIndex{});
    std::vector<std::string> keys;
    for (const WIndex& w : m.keys()) keys.push_back(w.str());
    CHECK(keys == std::vector<std::string>{"D0", "D1"});
    CHECK(slot_of(m, WIndex::d0()).empty());
    CHECK(slot_of(m, WIndex::d1()).size() == 1);
}

TEST_CASE("generated pools feed the builder") {
    TreePool pool = generate_pool(3, 2, 3, 4, 99);
    RigidityCertificate cert = certify_pool(pool);
    REQUIRE(cert.strong);

    TreeAssignment assign = sequential_assignment(pool, 1);
    QField q;
    DistModule<QField> m = build_module(q, pool, assign, 1, cert.strong);

    CHECK(m.rank() == pool.trees[0].size()); // root index plus one child per nonroot node
    CHECK(m.prov.certified);

    for (const auto& [w, gens] : m.slots) {
        for (const auto& g : gens) {
            CHECK(g.dim == m.rank());
            CHECK_FALSE(g.entries.empty());
        }
    }
}
