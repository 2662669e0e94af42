#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "certify.hpp"
#include "dist_module.hpp"
#include "errors.hpp"
#include "gfp.hpp"
#include "hom_space.hpp"
#include "rational.hpp"
#include "sindex.hpp"
#include "tree.hpp"
#include "windex.hpp"

namespace valrig {

using Json = nlohmann::json;

// All artifacts are hashed over their canonical text: dump(2) plus a
// trailing newline, keys in nlohmann's sorted order.  Hashes are content
// hashes of the semantic object, so a reload-and-resave cycle keeps them.
inline std::string canonical_text(const Json& j) { return j.dump(2) + "\n"; }

inline uint64_t fnv1a64(std::string_view bytes) {
    uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hash_hex(uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string s(16, '0');
    for (int i = 15; i >= 0; --i) {
        s[i] = digits[h & 0xf];
        h >>= 4;
    }
    return s;
}

inline std::string text_hash(const Json& j) { return hash_hex(fnv1a64(canonical_text(j))); }

namespace detail {

inline const Json& need(const Json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end())
        throw validation_error(std::string("artifact is missing key \"") + key + "\"");
    return *it;
}

} // namespace detail

// ---- index types -------------------------------------------------------

inline Json node_json(const Node& n) {
    Json a = Json::array();
    for (uint32_t x : n) a.push_back(x);
    return a;
}

inline Node node_from(const Json& j) {
    if (!j.is_array()) throw validation_error("node must be an array of labels");
    Node n;
    for (const auto& x : j) n.push_back(x.get<uint32_t>());
    return n;
}

inline Json sindex_json(const SIndex& s) {
    Json a = Json::array();
    for (const Node& part : s.parts) a.push_back(node_json(part));
    return a;
}

inline SIndex sindex_from(const Json& j) {
    if (!j.is_array()) throw validation_error("basis index must be an array of nodes");
    SIndex s;
    for (const auto& part : j) s.parts.push_back(node_from(part));
    return s;
}

inline std::vector<SIndex> subset_from(const Json& j) {
    if (!j.is_array()) throw validation_error("a subset must be an array of basis indices");
    std::vector<SIndex> out;
    for (const auto& e : j) out.push_back(sindex_from(e));
    return out;
}

// ---- trees and pools ---------------------------------------------------

inline Json tree_json(const ValuatedTree& t) {
    Json nodes = Json::array();
    Json valuation = Json::array();
    for (size_t i = 0; i < t.size(); ++i) {
        nodes.push_back(node_json(t.nodes[i]));
        valuation.push_back(Json::array({node_json(t.nodes[i]), t.vals[i]}));
    }
    return Json{{"nodes", nodes}, {"valuation", valuation}};
}

inline ValuatedTree tree_from(const Json& j) {
    std::vector<std::pair<Node, uint32_t>> pairs;
    for (const auto& e : detail::need(j, "valuation")) {
        if (!e.is_array() || e.size() != 2)
            throw validation_error("valuation entries must be [node, value] pairs");
        pairs.push_back({node_from(e[0]), e[1].get<uint32_t>()});
    }
    ValuatedTree t = ValuatedTree::from_pairs(std::move(pairs));
    const Json& nodes = detail::need(j, "nodes");
    if (nodes.size() != t.size())
        throw validation_error("tree artifact nodes and valuation disagree");
    for (size_t i = 0; i < t.size(); ++i)
        if (node_from(nodes[i]) != t.nodes[i])
            throw validation_error("tree artifact nodes and valuation disagree");
    return t;
}

inline Json pool_json(const TreePool& p) {
    Json trees = Json::array();
    for (const auto& t : p.trees) trees.push_back(tree_json(t));
    return Json{{"lambda", p.lambda}, {"depth", p.depth},  {"vmax", p.vmax},
                {"seed", p.seed},     {"trees", trees}};
}

inline TreePool pool_from(const Json& j) {
    TreePool p;
    p.lambda = detail::need(j, "lambda").get<uint32_t>();
    p.depth = detail::need(j, "depth").get<uint32_t>();
    p.vmax = detail::need(j, "vmax").get<uint32_t>();
    p.seed = detail::need(j, "seed").get<uint64_t>();
    for (const auto& t : detail::need(j, "trees")) p.trees.push_back(tree_from(t));
    return p;
}

inline std::string pool_hash(const TreePool& p) { return text_hash(pool_json(p)); }

// ---- certificates ------------------------------------------------------

inline Json certificate_json(const RigidityCertificate& c, const TreePool& pool) {
    Json verdicts = Json::array();
    for (const auto& v : c.verdicts) {
        Json w = v.witness ? Json(v.witness->map) : Json(nullptr);
        verdicts.push_back(Json{{"src", v.src},
                                {"dst", v.dst},
                                {"has_hom", v.has_hom},
                                {"witness", w},
                                {"identity_only", v.identity_only},
                                {"nodes_expanded", v.nodes_expanded}});
    }
    return Json{{"lambda", c.lambda},  {"depth", c.depth},
                {"vmax", c.vmax},      {"seed", c.seed},
                {"strong", c.strong},  {"pool_hash", pool_hash(pool)},
                {"verdicts", verdicts}};
}

struct CertificateArtifact {
    RigidityCertificate cert;
    std::string pool_hash;
};

inline CertificateArtifact certificate_from(const Json& j) {
    CertificateArtifact out;
    out.cert.lambda = detail::need(j, "lambda").get<uint32_t>();
    out.cert.depth = detail::need(j, "depth").get<uint32_t>();
    out.cert.vmax = detail::need(j, "vmax").get<uint32_t>();
    out.cert.seed = detail::need(j, "seed").get<uint64_t>();
    out.cert.strong = detail::need(j, "strong").get<bool>();
    out.pool_hash = detail::need(j, "pool_hash").get<std::string>();
    for (const auto& e : detail::need(j, "verdicts")) {
        PairVerdict v;
        v.src = detail::need(e, "src").get<uint32_t>();
        v.dst = detail::need(e, "dst").get<uint32_t>();
        v.has_hom = detail::need(e, "has_hom").get<bool>();
        v.identity_only = detail::need(e, "identity_only").get<bool>();
        v.nodes_expanded = detail::need(e, "nodes_expanded").get<uint64_t>();
        const Json& w = detail::need(e, "witness");
        if (!w.is_null()) v.witness = TreeHom{w.get<std::vector<uint32_t>>()};
        out.cert.verdicts.push_back(std::move(v));
    }
    return out;
}

// ---- field elements ----------------------------------------------------

inline std::string elem_str(const QField&, const Rat& c) { return c.str(); }
inline std::string elem_str(const FpField&, const Fp& c) { return std::to_string(c.value()); }

inline Rat elem_parse(const QField&, const std::string& s) { return Rat::parse(s); }
inline Fp elem_parse(const FpField& f, const std::string& s) {
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
        throw validation_error("malformed field element: " + s);
    return Fp(std::stoull(s), f.p);
}

template <typename FT>
Json sparse_json(const FT& f, const SparseVec<typename FT::Elem>& v) {
    Json a = Json::array();
    for (const auto& [i, c] : v.entries) a.push_back(Json::array({i, elem_str(f, c)}));
    return a;
}

template <typename FT>
SparseVec<typename FT::Elem> sparse_from(const FT& f, const Json& j, uint32_t dim) {
    SparseVec<typename FT::Elem> v(dim);
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2)
            throw validation_error("generator entries must be [index, coefficient] pairs");
        v.push(e[0].get<uint32_t>(), elem_parse(f, e[1].get<std::string>()));
    }
    return v;
}

template <typename FT>
Json matrix_json(const FT& f, const DenseMat<typename FT::Elem>& m) {
    Json rows = Json::array();
    for (const auto& r : m) {
        Json row = Json::array();
        for (const auto& c : r) row.push_back(elem_str(f, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename FT>
DenseMat<typename FT::Elem> matrix_from(const FT& f, const Json& j) {
    DenseMat<typename FT::Elem> m;
    for (const auto& r : j) {
        std::vector<typename FT::Elem> row;
        for (const auto& c : r) row.push_back(elem_parse(f, c.get<std::string>()));
        if (!m.empty() && row.size() != m.front().size())
            throw validation_error("ragged matrix artifact");
        m.push_back(std::move(row));
    }
    return m;
}

// ---- modules -----------------------------------------------------------

inline Json assignment_json(const TreeAssignment& a) {
    Json out = Json::array();
    for (const auto& [s, t] : a.entries) out.push_back(Json::array({sindex_json(s), t}));
    return out;
}

inline TreeAssignment assignment_from(const Json& j) {
    TreeAssignment a;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2)
            throw validation_error("assignment entries must be [index, tree] pairs");
        a.set(sindex_from(e[0]), e[1].get<uint32_t>());
    }
    return a;
}

template <typename FT>
Json module_json(const DistModule<FT>& m) {
    Json basis = Json::array();
    for (const auto& s : m.basis) basis.push_back(sindex_json(s));

    Json submodules = Json::array();
    for (const auto& [w, gens] : m.slots) {
        Json g = Json::array();
        for (const auto& v : gens) g.push_back(sparse_json(m.field, v));
        submodules.push_back(Json{{"w", w.str()}, {"gens", g}});
    }

    Json prov{{"pool", pool_json(m.prov.pool)},
              {"pool_hash", pool_hash(m.prov.pool)},
              {"assignment", assignment_json(m.prov.assignment)},
              {"steps", m.prov.steps},
              {"certified", m.prov.certified}};
    if (m.prov.subset) {
        Json sub = Json::array();
        for (const auto& s : *m.prov.subset) sub.push_back(sindex_json(s));
        prov["subset"] = sub;
    }

    return Json{{"field", m.field.name()},
                {"basis", basis},
                {"submodules", submodules},
                {"provenance", prov}};
}

template <typename FT>
std::string module_hash(const DistModule<FT>& m) {
    return text_hash(module_json(m));
}

using AnyModule = std::variant<DistModule<QField>, DistModule<FpField>>;

// Parses "Q" or "Fp:p" with p prime.
inline std::variant<QField, FpField> field_from_tag(const std::string& tag) {
    if (tag == "Q") return QField{};
    if (tag.rfind("Fp:", 0) == 0) {
        std::string rest = tag.substr(3);
        if (rest.empty() || rest.find_first_not_of("0123456789") != std::string::npos)
            throw validation_error("malformed field tag: " + tag);
        uint64_t p = std::stoull(rest);
        if (!is_prime_u64(p)) throw validation_error("field modulus " + rest + " is not prime");
        return FpField{p};
    }
    throw validation_error("unknown field tag: " + tag + " (expected Q or Fp:p)");
}

namespace detail {

template <typename FT>
DistModule<FT> module_from_typed(const FT& field, const Json& j) {
    DistModule<FT> m{field, {}, {}, {}};
    for (const auto& s : need(j, "basis")) m.basis.push_back(sindex_from(s));
    for (size_t i = 1; i < m.basis.size(); ++i)
        if (!sindex_less(m.basis[i - 1], m.basis[i]))
            throw validation_error("module basis is not in canonical order");

    for (const auto& e : need(j, "submodules")) {
        WIndex w = WIndex::parse(need(e, "w").get<std::string>());
        std::vector<SparseVec<typename FT::Elem>> gens;
        for (const auto& g : need(e, "gens")) gens.push_back(sparse_from(field, g, m.rank()));
        if (!m.slots.empty() && !(m.slots.back().first < w))
            throw validation_error("module submodules are not in canonical key order");
        m.slots.push_back({w, std::move(gens)});
    }

    const Json& prov = need(j, "provenance");
    m.prov.pool = pool_from(need(prov, "pool"));
    if (need(prov, "pool_hash").get<std::string>() != pool_hash(m.prov.pool))
        throw validation_error("module artifact pool hash does not match its embedded pool");
    m.prov.assignment = assignment_from(need(prov, "assignment"));
    m.prov.steps = need(prov, "steps").get<uint32_t>();
    m.prov.certified = need(prov, "certified").get<bool>();
    if (prov.contains("subset")) m.prov.subset = subset_from(prov["subset"]);
    if (m.prov.subset.has_value() != (m.slot(WIndex::d2()) != nullptr))
        throw validation_error("subset provenance and D2 slot disagree");
    return m;
}

} // namespace detail

inline AnyModule module_from(const Json& j) {
    auto field = field_from_tag(detail::need(j, "field").get<std::string>());
    if (std::holds_alternative<QField>(field))
        return detail::module_from_typed(std::get<QField>(field), j);
    return detail::module_from_typed(std::get<FpField>(field), j);
}

// ---- files -------------------------------------------------------------

// Atomic write: the canonical text lands under a temporary name in the
// same directory, then rename makes it visible in one step.
inline void write_artifact(const std::filesystem::path& path, const Json& j) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw validation_error("cannot write " + path.string());
        out << canonical_text(j);
        if (!out) throw validation_error("write failed for " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

inline Json read_artifact(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot read " + path.string());
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw validation_error("malformed JSON in " + path.string() + ": " + e.what());
    }
    return j;
}

} // namespace valrig
