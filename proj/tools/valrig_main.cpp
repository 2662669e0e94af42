// Pipeline driver: seeded tree generation, certification, module encoding,
// hom computations and the two rigidity reports, all exchanged as JSON
// artifacts chained by content hashes.
//
// Exit codes: 0 success or verdict matches the expected pattern,
//             1 usage or validation failure,
//             2 generation budget exhausted,
//             3 invariant breach (internal inconsistency).

#include <CLI11.hpp>

#include <valrig/certify.hpp>
#include <valrig/dist_module.hpp>
#include <valrig/divisible.hpp>
#include <valrig/extract.hpp>
#include <valrig/hom_space.hpp>
#include <valrig/json_io.hpp>
#include <valrig/pool_gen.hpp>
#include <valrig/rigid_system.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace {

using namespace valrig;

uint32_t config_u32(const Json& cfg, const char* key) {
    return detail::need(cfg, key).get<uint32_t>();
}

// --- gen-trees -----------------------------------------------------------

int cmd_gen_trees(const std::string& config_path, std::optional<uint64_t> seed_flag,
                  const std::string& out, const std::string& cert_out) {
    Json cfg = read_artifact(config_path);
    uint32_t lambda = config_u32(cfg, "lambda");
    uint32_t depth = config_u32(cfg, "depth");
    uint32_t vmax = cfg.contains("vmax") ? cfg["vmax"].get<uint32_t>() : depth + 1;
    uint32_t count = config_u32(cfg, "count");
    uint64_t seed = seed_flag ? *seed_flag
                              : (cfg.contains("seed") ? cfg["seed"].get<uint64_t>() : 0);
    uint64_t budget = cfg.contains("budget") ? cfg["budget"].get<uint64_t>() : 0;

    TreePool pool = generate_pool(lambda, depth, vmax, count, seed, budget);
    RigidityCertificate cert = certify_pool(pool);

    write_artifact(out, pool_json(pool));
    write_artifact(cert_out, certificate_json(cert, pool));
    std::cout << "wrote " << out << " (" << pool.trees.size() << " trees, seed " << seed
              << ") and " << cert_out << (cert.strong ? " [strong]" : "") << "\n";
    return 0;
}

// --- certify -------------------------------------------------------------

int cmd_certify(const std::string& pool_path, const std::string& out) {
    TreePool pool = pool_from(read_artifact(pool_path));
    RigidityCertificate cert = certify_pool(pool);
    write_artifact(out, certificate_json(cert, pool));
    std::cout << "wrote " << out << ": pool is "
              << (cert.strong ? "strongly rigid" : cert.rigid() ? "rigid but not strong"
                                                                : "not rigid")
              << "\n";
    return cert.strong ? 0 : 2;
}

// --- encode --------------------------------------------------------------

int cmd_encode(const std::string& pool_path, const std::string& config_path,
               const std::string& field_flag, bool allow_uncertified, const std::string& out) {
    TreePool pool = pool_from(read_artifact(pool_path));
    Json cfg = read_artifact(config_path);
    uint32_t steps = config_u32(cfg, "steps");

    std::string field_tag = field_flag;
    if (field_tag.empty())
        field_tag = cfg.contains("field") ? cfg["field"].get<std::string>() : "Q";

    bool allow_repeats = cfg.contains("allow_repeats") && cfg["allow_repeats"].get<bool>();
    if (allow_repeats && !allow_uncertified)
        throw validation_error("assignment repeats need --allow-uncertified");

    bool certified = false;
    if (!allow_uncertified) {
        if (!certify_pool(pool).strong)
            throw validation_error(
                "pool is not strongly certified; --allow-uncertified overrides for negative "
                "controls only");
        certified = true;
    } else {
        certified = false;
    }

    TreeAssignment assign = cfg.contains("assignment") ? assignment_from(cfg["assignment"])
                                                       : sequential_assignment(pool, steps);

    auto field = field_from_tag(field_tag);
    Json artifact = std::visit(
        [&](const auto& f) {
            auto m = build_module(f, pool, assign, steps, certified, allow_repeats);
            return module_json(m);
        },
        field);

    write_artifact(out, artifact);
    std::cout << "wrote " << out << " (rank " << artifact["basis"].size() << ", field "
              << field_tag << (certified ? ", certified" : ", uncertified") << ")\n";
    return 0;
}

// --- shared module loading ------------------------------------------------

AnyModule load_module(const std::string& path, bool allow_uncertified) {
    AnyModule m = module_from(read_artifact(path));
    bool certified = std::visit([](const auto& x) { return x.prov.certified; }, m);
    if (!certified && !allow_uncertified)
        throw validation_error(path + " holds an uncertified module; pass --allow-uncertified "
                                      "to work with negative controls");
    return m;
}

template <typename FT>
Json extraction_json(const DistModule<FT>& m, const DenseMat<typename FT::Elem>& witness,
                     Json& report) {
    auto ex = extract_tree_hom(m, witness);
    if (!ex) {
        report["extraction"] = nullptr;
        report["extraction_note"] = "no off-diagonal support";
        return report;
    }
    report["extraction"] = Json{{"src_anchor", ex->src_anchor.str()},
                                {"dst_anchor", ex->dst_anchor.str()},
                                {"src_tree", ex->src_tree},
                                {"dst_tree", ex->dst_tree},
                                {"map", ex->hom.map}};
    return report;
}

// --- end -----------------------------------------------------------------

template <typename FT>
int run_end(const DistModule<FT>& m, bool extract, const std::string& out) {
    HomBasis<FT> h = end_space(m);
    ScalarVerdict<typename FT::Elem> verdict = is_scalar_only(h);

    Json report{{"module", module_hash(m)},
                {"field", m.field.name()},
                {"dim", h.dim()},
                {"scalarOnly", verdict.scalar_only}};
    if (verdict.scalar_only) {
        report["matrix"] = h.dim() == 1 ? matrix_json(m.field, h.matrix(0)) : Json(nullptr);
    } else {
        report["matrix"] = matrix_json(m.field, *verdict.witness);
    }
    if (extract) {
        const DenseMat<typename FT::Elem> probe =
            verdict.scalar_only ? (h.dim() == 1 ? h.matrix(0)
                                                : identity_mat(m.field, m.rank()))
                                : *verdict.witness;
        extraction_json(m, probe, report);
    }
    write_artifact(out, report);
    std::cout << "wrote " << out << ": End dimension " << h.dim()
              << (verdict.scalar_only ? ", scalar only" : ", non-scalar generator present")
              << "\n";

    if (m.prov.certified && !verdict.scalar_only)
        throw breach_error("certified module has a non-scalar endomorphism");
    return 0;
}

// --- hom -----------------------------------------------------------------

template <typename FT>
int run_hom(const DistModule<FT>& x, const DistModule<FT>& y, bool extract,
            const std::string& out) {
    HomBasis<FT> h = hom_space(x, y);
    Json mats = Json::array();
    for (size_t i = 0; i < h.dim(); ++i) mats.push_back(matrix_json(x.field, h.matrix(i)));
    Json report{{"src", module_hash(x)},
                {"dst", module_hash(y)},
                {"field", x.field.name()},
                {"endo", h.endo},
                {"dim", h.dim()},
                {"matrices", mats}};
    if (extract) {
        if (!h.endo) throw validation_error("--extract needs an endomorphism space");
        auto verdict = is_scalar_only(h);
        if (verdict.scalar_only) {
            report["extraction"] = nullptr;
            report["extraction_note"] = "no off-diagonal support";
        } else {
            extraction_json(x, *verdict.witness, report);
        }
    }
    write_artifact(out, report);
    std::cout << "wrote " << out << ": Hom dimension " << h.dim() << "\n";
    return 0;
}

// --- fully-rigid -----------------------------------------------------------

std::vector<std::vector<SIndex>> parse_subsets(const std::string& spec, const AnyModule& m) {
    if (spec.rfind("auto:", 0) == 0) {
        uint32_t n = static_cast<uint32_t>(std::stoul(spec.substr(5)));
        return std::visit([&](const auto& x) { return auto_subsets(x, n); }, m);
    }
    Json j;
    try {
        j = Json::parse(spec);
    } catch (const Json::parse_error& e) {
        throw validation_error(std::string("malformed --subsets JSON: ") + e.what());
    }
    if (!j.is_array()) throw validation_error("--subsets must be a JSON array of subsets");
    std::vector<std::vector<SIndex>> out;
    for (const auto& u : j) out.push_back(subset_from(u));
    return out;
}

template <typename FT>
int run_fully_rigid(const DistModule<FT>& base, const std::vector<std::vector<SIndex>>& subsets,
                    bool allow_uncertified, const std::string& out) {
    RigidGrid grid = check_fully_rigid(base, subsets, !allow_uncertified);

    Json cells = Json::array();
    for (const auto& c : grid.cells) {
        Json u = Json::array(), v = Json::array();
        for (const auto& s : c.u) u.push_back(sindex_json(s));
        for (const auto& s : c.v) v.push_back(sindex_json(s));
        cells.push_back(Json{{"U", u},
                             {"V", v},
                             {"contained", c.contained},
                             {"dim", c.dim},
                             {"verdict", c.pass ? (c.contained ? "identity" : "zero") : "fail"}});
    }
    Json report{{"module", module_hash(base)},
                {"field", base.field.name()},
                {"cells", cells},
                {"all_pass", grid.all_pass}};
    write_artifact(out, report);
    std::cout << "wrote " << out << ": " << grid.cells.size() << " cells, "
              << (grid.all_pass ? "all match the containment pattern" : "PATTERN MISMATCH")
              << "\n";

    if (grid.all_pass) return 0;
    if (base.prov.certified)
        throw breach_error("certified module fails the fully rigid pattern");
    return 1;
}

// --- divisible -------------------------------------------------------------

std::vector<uint64_t> parse_primes(const std::string& spec, size_t needed) {
    if (spec == "auto") return first_primes(needed);
    std::vector<uint64_t> out;
    size_t pos = 0;
    while (pos < spec.size()) {
        size_t comma = spec.find(',', pos);
        std::string tok = spec.substr(pos, comma == std::string::npos ? comma : comma - pos);
        if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
            throw validation_error("malformed --primes entry: \"" + tok + "\"");
        out.push_back(std::stoull(tok));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

int run_divisible(const DistModule<QField>& base, const std::string& subsets_spec,
                  const std::string& primes_spec, const std::string& out) {
    Json j;
    try {
        j = Json::parse(subsets_spec);
    } catch (const Json::parse_error& e) {
        throw validation_error(std::string("malformed --subsets JSON: ") + e.what());
    }
    if (!j.is_array() || j.size() != 2)
        throw validation_error("divisible needs --subsets '[U, V]' with exactly two subsets");
    auto mu = build_module_subset(base, subset_from(j[0]));
    auto mv = build_module_subset(base, subset_from(j[1]));

    PrimeAssignment primes =
        assign_primes(mu.keys(), parse_primes(primes_spec, mu.keys().size()));
    DivisibleModule du = build_divisible(mu, primes);
    DivisibleModule dv = build_divisible(mv, primes);

    bool contained = std::includes(mv.prov.subset->begin(), mv.prov.subset->end(),
                                   mu.prov.subset->begin(), mu.prov.subset->end(), sindex_less);
    DivisibleHom h = hom_divisible(du, dv);

    Json uj = Json::array(), vj = Json::array(), pj = Json::array();
    for (const auto& s : *mu.prov.subset) uj.push_back(sindex_json(s));
    for (const auto& s : *mv.prov.subset) vj.push_back(sindex_json(s));
    for (const auto& [w, p] : primes.entries) pj.push_back(Json::array({w.str(), p}));

    Json report{{"module", module_hash(base)},
                {"U", uj},
                {"V", vj},
                {"contained", contained},
                {"primes", pj},
                {"qstep",
                 Json{{"dim", h.trace.q_dim},
                      {"generator", h.trace.generator ? Json(h.trace.generator->str())
                                                      : Json(nullptr)}}},
                {"integrality",
                 Json{{"applied", h.trace.integrality_applied},
                      {"p0", h.trace.p0},
                      {"p1", h.trace.p1},
                      {"probe", h.trace.probe.str()},
                      {"probe_in_p0", h.trace.probe_in_p0},
                      {"probe_in_p1", h.trace.probe_in_p1},
                      {"accepted", h.trace.probe_accepted}}},
                {"result", h.integer_line ? "Z" : "0"}};
    write_artifact(out, report);

    bool matches = contained ? h.integer_line : h.zero;
    std::cout << "wrote " << out << ": Hom = " << (h.integer_line ? "Z" : "0") << ", U"
              << (contained ? " " : " not ") << "in V, "
              << (matches ? "pattern matches" : "PATTERN MISMATCH") << "\n";
    if (matches) return 0;
    if (base.prov.certified) throw breach_error("certified module fails the divisible pattern");
    return 1;
}

// --- extract-hom ------------------------------------------------------------

template <typename FT>
int run_extract(const DistModule<FT>& m, const Json& witness, const std::string& out) {
    if (detail::need(witness, "module").get<std::string>() != module_hash(m))
        throw validation_error("provenance mismatch: witness was computed over a different module");
    const Json& mat_json = detail::need(witness, "matrix");
    if (mat_json.is_null()) throw validation_error("witness artifact has no matrix");
    DenseMat<typename FT::Elem> mat = matrix_from(m.field, mat_json);

    Json report{{"module", module_hash(m)}, {"matrix", mat_json}};
    extraction_json(m, mat, report);
    write_artifact(out, report);
    std::cout << "wrote " << out << ": "
              << (report["extraction"].is_null() ? "no off-diagonal support"
                                                 : "tree map extracted and verified")
              << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"valuated-tree rigid module pipeline"};
    app.require_subcommand(1);

    std::string config, out, field_flag, subsets_spec, primes_spec = "auto";
    std::string pool_path, module_path, module_path2, witness_path, cert_out;
    std::optional<uint64_t> seed_flag;
    bool extract = false, allow_uncertified = false;

    auto* gen = app.add_subcommand("gen-trees", "generate and certify a tree pool");
    gen->add_option("--config", config, "run configuration JSON")->required();
    gen->add_option("--seed", seed_flag, "override the config seed");
    gen->add_option("--out", out, "pool artifact path")->capture_default_str();
    gen->add_option("--cert", cert_out, "certificate artifact path");

    auto* cert = app.add_subcommand("certify", "recertify an existing pool");
    cert->add_option("pool", pool_path, "trees.json")->required();
    cert->add_option("--out", out, "certificate artifact path");

    auto* enc = app.add_subcommand("encode", "unfold a pool into a module artifact");
    enc->add_option("pool", pool_path, "trees.json")->required();
    enc->add_option("--config", config, "run configuration JSON")->required();
    enc->add_option("--field", field_flag, "Q or Fp:P (overrides config)");
    enc->add_flag("--allow-uncertified", allow_uncertified,
                  "build from an uncertified pool or repeated assignment (negative controls)");
    enc->add_option("--out", out, "module artifact path");

    auto* end_cmd = app.add_subcommand("end", "endomorphism space of a module");
    end_cmd->add_option("module", module_path, "module.json")->required();
    end_cmd->add_flag("--extract", extract, "extract a tree map from a non-scalar witness");
    end_cmd->add_flag("--allow-uncertified", allow_uncertified);
    end_cmd->add_option("--out", out, "endo report path");

    auto* hom_cmd = app.add_subcommand("hom", "hom space between two modules");
    hom_cmd->add_option("src", module_path, "source module.json")->required();
    hom_cmd->add_option("dst", module_path2, "destination module.json")->required();
    hom_cmd->add_flag("--extract", extract);
    hom_cmd->add_flag("--allow-uncertified", allow_uncertified);
    hom_cmd->add_option("--out", out, "hom basis report path");

    auto* grid = app.add_subcommand("fully-rigid", "containment-indicator grid over subsets");
    grid->add_option("module", module_path, "module.json (plain, no subset slot)")->required();
    grid->add_option("--subsets", subsets_spec, "auto:N or JSON list of subsets")->required();
    grid->add_flag("--allow-uncertified", allow_uncertified);
    grid->add_option("--out", out, "grid report path");

    auto* div = app.add_subcommand("divisible", "hom group between two divisible hulls");
    div->add_option("module", module_path, "module.json (rational, plain)")->required();
    div->add_option("--subsets", subsets_spec, "JSON [U, V]")->required();
    div->add_option("--primes", primes_spec, "comma list or auto")->capture_default_str();
    div->add_flag("--allow-uncertified", allow_uncertified);
    div->add_option("--out", out, "divisible report path");

    auto* ext = app.add_subcommand("extract-hom", "recover a tree map from a witness matrix");
    ext->add_option("module", module_path, "module.json")->required();
    ext->add_option("witness", witness_path, "endo report with a matrix")->required();
    ext->add_option("--out", out, "extraction report path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (gen->parsed()) {
            if (out.empty()) out = "trees.json";
            if (cert_out.empty()) cert_out = "certificate.json";
            return cmd_gen_trees(config, seed_flag, out, cert_out);
        }
        if (cert->parsed()) {
            return cmd_certify(pool_path, out.empty() ? "certificate.json" : out);
        }
        if (enc->parsed()) {
            return cmd_encode(pool_path, config, field_flag, allow_uncertified,
                              out.empty() ? "module.json" : out);
        }
        if (end_cmd->parsed()) {
            AnyModule m = load_module(module_path, allow_uncertified);
            return std::visit(
                [&](const auto& x) { return run_end(x, extract, out.empty() ? "endo.json" : out); },
                m);
        }
        if (hom_cmd->parsed()) {
            AnyModule x = load_module(module_path, allow_uncertified);
            AnyModule y = load_module(module_path2, allow_uncertified);
            return std::visit(
                [&](const auto& a, const auto& b) -> int {
                    if constexpr (!std::is_same_v<std::decay_t<decltype(a)>,
                                                  std::decay_t<decltype(b)>>)
                        throw validation_error("modules live over different fields");
                    else
                        return run_hom(a, b, extract, out.empty() ? "hombasis.json" : out);
                },
                x, y);
        }
        if (grid->parsed()) {
            AnyModule m = load_module(module_path, allow_uncertified);
            auto subsets = parse_subsets(subsets_spec, m);
            return std::visit(
                [&](const auto& x) {
                    return run_fully_rigid(x, subsets, allow_uncertified,
                                           out.empty() ? "grid-report.json" : out);
                },
                m);
        }
        if (div->parsed()) {
            AnyModule m = load_module(module_path, allow_uncertified);
            return std::visit(
                [&](const auto& x) -> int {
                    if constexpr (!std::is_same_v<std::decay_t<decltype(x)>,
                                                  DistModule<QField>>)
                        throw validation_error("divisible hulls need a rational module");
                    else
                        return run_divisible(x, subsets_spec, primes_spec,
                                             out.empty() ? "divisible-report.json" : out);
                },
                m);
        }
        if (ext->parsed()) {
            // extraction is exactly the negative-control tool; no certification gate
            AnyModule m = load_module(module_path, true);
            Json witness = read_artifact(witness_path);
            return std::visit(
                [&](const auto& x) {
                    return run_extract(x, witness, out.empty() ? "extraction.json" : out);
                },
                m);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.kind());
    } catch (const Json::exception& e) {
        std::cerr << "error: malformed artifact: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
