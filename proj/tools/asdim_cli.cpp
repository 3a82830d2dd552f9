// Command-line front end: recipes, certificate verification, cover search,
// simplicial utilities, graph-of-groups word tools and the cover-synthesis
// pipeline.  Exit codes: 0 ok, 2 parse, 3 precondition, 4 budget,
// 5 timeout, 6 verification, 7 search exhausted, 1 internal.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "asdim/cover_search.hpp"
#include "asdim/error.hpp"
#include "asdim/io.hpp"
#include "asdim/recipes.hpp"
#include "asdim/synth.hpp"
#include "asdim/util.hpp"

using namespace asdim;

namespace {

std::string out_dir_default() {
    const char* env = std::getenv("ASDIM_OUT_DIR");
    return env ? env : ".";
}

gog::GWord parse_gword(const gog::GraphOfGroups& g, const std::string& text,
                       int start_vertex) {
    // format: (c0)edge(c1)edge(c2)... with vertex-group elements in parens
    gog::GWord w;
    w.start = start_vertex;
    size_t pos = 0;
    int at = start_vertex;
    bool expect_coeff = true;
    while (pos < text.size()) {
        if (expect_coeff) {
            if (text[pos] != '(') throw ParseError("word: expected ( at " + std::to_string(pos));
            size_t close = text.find(')', pos);
            if (close == std::string::npos) throw ParseError("word: unbalanced (");
            std::string c = text.substr(pos + 1, close - pos - 1);
            w.coeffs.push_back(g.vertex_group(at).parse(c));
            pos = close + 1;
            expect_coeff = false;
        } else {
            size_t open = text.find('(', pos);
            if (open == std::string::npos) throw ParseError("word: trailing edge without coefficient");
            std::string name = text.substr(pos, open - pos);
            int e = g.edge_by_name(name);
            if (g.edge(e).from != at)
                throw ParseError("word: edge " + name + " does not start at " +
                                 g.vertex_name(at));
            w.path.push_back(e);
            at = g.edge(e).to;
            pos = open;
            expect_coeff = true;
        }
    }
    if (w.coeffs.size() != w.path.size() + 1)
        throw ParseError("word: missing final coefficient");
    return w;
}

std::shared_ptr<gog::GraphOfGroups> load_gog(const std::string& model) {
    if (std::filesystem::exists(model)) return io::parse_gog(io::read_file(model));
    return io::builtin_gog(model);
}

io::ModelHandle load_model(const std::string& model) {
    if (std::filesystem::exists(model))
        return io::parse_model(io::read_file(model), model);
    return io::builtin_model(model);
}

covers::SpaceRef load_space(const std::string& path) {
    return io::read_ball(io::read_file(path));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"scale-dimension certificates for groups acting on trees"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    double timeout = 0;
    long long budget = 0;
    std::string out_dir = out_dir_default();
    app.add_option("--seed", seed, "deterministic seed");
    app.add_option("--timeout", timeout, "timeout in seconds for searches");
    app.add_option("--budget", budget, "element cap override");
    app.add_option("--out", out_dir, "output directory (env ASDIM_OUT_DIR)");

    // ---- harness ----
    auto* run = app.add_subcommand("run", "run a bundled or file recipe");
    std::string run_name;
    run->add_option("recipe", run_name, "recipe name or file")->required();

    auto* list = app.add_subcommand("list-recipes", "list bundled recipes");

    auto* verify = app.add_subcommand("verify", "re-verify a persisted certificate");
    std::string verify_cert, verify_space;
    verify->add_option("certificate", verify_cert)->required();
    verify->add_option("--space", verify_space, "ball file")->required();

    auto* exportdot = app.add_subcommand("export-dot", "DOT export of an artifact");
    std::string dot_kind, dot_source, dot_model;
    long long dot_radius = 3, dot_budget = 4;
    exportdot->add_option("kind", dot_kind, "complex | cover | tree-ball")->required();
    exportdot->add_option("--file", dot_source, "complex or certificate file");
    exportdot->add_option("--space", verify_space, "ball file for covers");
    exportdot->add_option("--model", dot_model, "graph-of-groups model");
    exportdot->add_option("--radius", dot_radius);
    exportdot->add_option("--coeff-budget", dot_budget);

    // ---- cover ----
    auto* cover = app.add_subcommand("cover", "covers and certificates");
    cover->require_subcommand(1);
    std::string c_model = "Z", c_space_file, c_cert_file;
    long long c_radius = 10, c_d = 2, c_B = 6, c_n = 1;
    auto* c_verify = cover->add_subcommand("verify", "check a certificate");
    c_verify->add_option("--cert", c_cert_file)->required();
    c_verify->add_option("--space", c_space_file)->required();
    auto* c_search = cover->add_subcommand("search", "constructive upper bound");
    auto* c_refute = cover->add_subcommand("refute", "exhaustive refutation");
    auto* c_convert = cover->add_subcommand("convert", "families <-> cover round trip");
    for (auto* sc : {c_search, c_refute, c_convert}) {
        sc->add_option("--model", c_model);
        sc->add_option("--radius", c_radius);
        sc->add_option("--d", c_d);
        sc->add_option("--B", c_B);
        sc->add_option("--n", c_n);
    }

    // ---- simp ----
    auto* simp_cmd = app.add_subcommand("simp", "simplicial machinery");
    simp_cmd->require_subcommand(1);
    std::string s_space_file, s_cert_file, s_complex_file, s_map;
    long long s_point = 0;
    std::string s_eps = "1";
    auto* s_nerve = simp_cmd->add_subcommand("nerve", "nerve of a certificate's cover");
    s_nerve->add_option("--cert", s_cert_file)->required();
    s_nerve->add_option("--space", s_space_file)->required();
    auto* s_cyl = simp_cmd->add_subcommand("cylinder", "mapping cylinder of a vertex map");
    s_cyl->add_option("--complex", s_complex_file)->required();
    s_cyl->add_option("--map", s_map, "comma list v:w of vertex images")->required();
    auto* s_proj = simp_cmd->add_subcommand("project", "canonical projection of a point");
    s_proj->add_option("--cert", s_cert_file)->required();
    s_proj->add_option("--space", s_space_file)->required();
    s_proj->add_option("--point", s_point)->required();
    auto* s_lip = simp_cmd->add_subcommand("lipschitz", "projection Lipschitz check");
    s_lip->add_option("--cert", s_cert_file)->required();
    s_lip->add_option("--space", s_space_file)->required();
    s_lip->add_option("--eps", s_eps);

    // ---- gog ----
    auto* gog_cmd = app.add_subcommand("gog", "graph-of-groups words and trees");
    gog_cmd->require_subcommand(1);
    std::string g_model = "klein-bottle", g_word, g_edge = "y";
    long long g_radius = 3, g_budget = 6, g_R = 2, g_k = 1, g_r = 3;
    auto* g_reduce = gog_cmd->add_subcommand("reduce", "reduce and normalize a word");
    g_reduce->add_option("--model", g_model);
    g_reduce->add_option("--word", g_word)->required();
    auto* g_ball = gog_cmd->add_subcommand("ball", "Bass-Serre tree ball");
    g_ball->add_option("--model", g_model);
    g_ball->add_option("--radius", g_radius);
    g_ball->add_option("--coeff-budget", g_budget);
    auto* g_stab = gog_cmd->add_subcommand("stabilizer", "R-stabilizer enumeration");
    g_stab->add_option("--model", g_model);
    g_stab->add_option("--R", g_R);
    g_stab->add_option("--budget", g_budget);
    auto* g_strata = gog_cmd->add_subcommand("strata", "path-length strata");
    g_strata->add_option("--model", g_model);
    g_strata->add_option("--budget", g_budget);
    auto* g_lem = gog_cmd->add_subcommand("lemma3", "stratum pieces and the r-strip");
    g_lem->add_option("--model", g_model);
    g_lem->add_option("--k", g_k);
    g_lem->add_option("--r", g_r);
    g_lem->add_option("--budget", g_budget);
    g_lem->add_option("--edge", g_edge);

    // ---- synth ----
    auto* synth_cmd = app.add_subcommand("synth", "cover-synthesis pipeline");
    synth_cmd->require_subcommand(1);
    std::string y_model = "klein-bottle", y_manifest;
    long long y_radius = 12, y_d = 3, y_k = 1, y_r = 0, y_sep = 0;
    std::string y_eps;
    bool y_relax = false;
    auto* y_run = synth_cmd->add_subcommand("run", "run the pipeline");
    y_run->add_option("--model", y_model);
    y_run->add_option("--radius", y_radius);
    y_run->add_option("--d", y_d);
    y_run->add_option("--k", y_k);
    y_run->add_option("--eps", y_eps, "override epsilon (rational)");
    y_run->add_option("--r", y_r, "override collar radius");
    y_run->add_option("--sep", y_sep, "override separation");
    y_run->add_flag("--relax", y_relax, "record instead of enforce thresholds");
    auto* y_verify = synth_cmd->add_subcommand("verify", "re-run and compare a manifest");
    y_verify->add_option("--manifest", y_manifest)->required();
    y_verify->add_option("--model", y_model);
    y_verify->add_option("--radius", y_radius);
    y_verify->add_option("--d", y_d);
    y_verify->add_option("--k", y_k);

    CLI11_PARSE(app, argc, argv);

    try {
        std::filesystem::create_directories(out_dir);
        i64 cap = budget > 0 ? budget : groups::kDefaultElementCap;

        if (*run) {
            recipes::Recipe r = std::filesystem::exists(run_name)
                                    ? recipes::parse_recipe(io::read_file(run_name))
                                    : recipes::find_recipe(run_name);
            auto t0 = std::chrono::steady_clock::now();
            auto res = recipes::run_recipe(r, seed, timeout, budget);
            auto dt = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
            std::string report_path = out_dir + "/" + r.name + ".report";
            io::write_file(report_path, res.report);
            if (!res.certificate.empty()) {
                std::string cert_path = out_dir + "/" + r.name + res.certificate_ext;
                io::write_file(cert_path, res.certificate);
                std::cout << "certificate " << cert_path << "\n";
            }
            std::cout << "report " << report_path << "\n";
            std::cout << "verdict " << res.verdict << "\n";
            std::cout << "elapsed " << dt << "s\n";
            return res.exit_code;
        }
        if (*list) {
            for (const auto& r : recipes::bundled_recipes())
                std::cout << r.name << "  [" << r.operation << "]  "
                          << r.description << "\n";
            return 0;
        }
        if (*verify) {
            auto space = load_space(verify_space);
            auto cert = io::read_certificate(io::read_file(verify_cert), space);
            std::string why;
            bool ok = covers::verify_certificate(cert, space, &why);
            std::cout << (ok ? "verified" : "FAILED: " + why) << "\n";
            return ok ? 0 : kVerificationFailed;
        }
        if (*exportdot) {
            if (dot_kind == "complex") {
                auto k = io::read_complex(io::read_file(dot_source));
                std::cout << io::complex_dot(*k);
            } else if (dot_kind == "cover") {
                auto space = load_space(verify_space);
                auto cert = io::read_certificate(io::read_file(dot_source), space);
                if (!cert.witness) throw PreconditionError("certificate has no witness");
                std::cout << io::cover_dot(cert.witness->flatten());
            } else if (dot_kind == "tree-ball") {
                auto g = load_gog(dot_model);
                auto tb = g->tree_ball(dot_radius, dot_budget, cap);
                std::cout << io::tree_ball_dot(tb);
            } else {
                throw ParseError("unknown export kind: " + dot_kind);
            }
            return 0;
        }

        if (*cover) {
            if (*c_verify) {
                auto space = load_space(c_space_file);
                auto cert = io::read_certificate(io::read_file(c_cert_file), space);
                std::string why;
                bool ok = covers::verify_certificate(cert, space, &why);
                std::cout << (ok ? "verified" : "FAILED: " + why) << "\n";
                return ok ? 0 : kVerificationFailed;
            }
            auto model = load_model(c_model);
            auto space = model.ball(c_radius, cap).space;
            if (*c_search) {
                auto cert = covers::scale_dim_upper(space, Rat(c_d), Rat(c_B), int(c_n));
                std::string path = out_dir + "/search.cert";
                io::write_file(path, io::write_certificate(cert));
                std::cout << "upper(" << c_n << ") -> " << path << "\n";
                return 0;
            }
            if (*c_refute) {
                covers::SearchLimits limits;
                limits.timeout_seconds = timeout;
                auto cert = covers::scale_dim_refute(space, Rat(c_d), Rat(c_B),
                                                     int(c_n), limits);
                std::string path = out_dir + "/refute.cert";
                io::write_file(path, io::write_certificate(cert));
                std::cout << (cert.verdict == covers::Verdict::Refuted
                                  ? "refuted"
                                  : "upper")
                          << " -> " << path << "\n";
                return 0;
            }
            if (*c_convert) {
                auto cert = covers::scale_dim_upper(space, Rat(c_d), Rat(c_B), int(c_n));
                auto cvr = covers::colored_to_cover(*cert.witness);
                auto attrs = covers::attributes(cvr);
                std::cout << "cover: multiplicity " << attrs.multiplicity
                          << " lebesgue " << attrs.lebesgue.str() << "\n";
                auto back = covers::cover_to_colored(cvr, Rat(c_d, 6), int(c_n) + 1);
                std::string why;
                bool ok = covers::verify_colored(back, &why);
                std::cout << "reconverted families: " << (ok ? "valid" : why) << "\n";
                return ok ? 0 : kVerificationFailed;
            }
        }

        if (*simp_cmd) {
            if (*s_cyl) {
                auto X = io::read_complex(io::read_file(s_complex_file));
                simp::SimplicialMap g;
                g.domain = X;
                std::vector<int> vm(X->vertex_count(), -1);
                int max_img = -1;
                std::istringstream in(s_map);
                std::string pair;
                while (std::getline(in, pair, ',')) {
                    auto colon = pair.find(':');
                    int v = std::stoi(pair.substr(0, colon));
                    int w = std::stoi(pair.substr(colon + 1));
                    vm[size_t(v)] = w;
                    max_img = std::max(max_img, w);
                }
                std::vector<std::string> ylabels;
                for (int i = 0; i <= max_img; ++i) ylabels.push_back("y" + std::to_string(i));
                auto Y = std::make_shared<simp::OrientedComplex>(ylabels);
                for (const auto& s : X->simplices()) {
                    simp::Simplex img;
                    for (int v : s) img.push_back(vm[size_t(v)]);
                    Y->add_simplex(img);
                }
                g.codomain = Y;
                g.vertex_map = vm;
                auto cyl = simp::mapping_cylinder(g);
                std::cout << io::write_complex(*cyl.complex);
                return 0;
            }
            auto space = load_space(s_space_file);
            auto cert = io::read_certificate(io::read_file(s_cert_file), space);
            if (!cert.witness) throw PreconditionError("certificate has no witness");
            covers::Cover c = cert.witness->flatten();
            c.space = space;
            auto nv = simp::nerve(c);
            if (*s_nerve) {
                std::cout << io::write_complex(*nv);
                return 0;
            }
            if (*s_proj) {
                auto p = simp::canonical_projection(c, nv, int(s_point));
                for (const auto& [v, coord] : p.coords)
                    std::cout << nv->vertex_label(v) << " " << coord.str() << "\n";
                return 0;
            }
            if (*s_lip) {
                Rat eps = Rat::parse(s_eps);
                std::vector<simp::UniformPoint> img;
                for (int x = 0; x < space->size(); ++x)
                    img.push_back(simp::canonical_projection(c, nv, x));
                simp::PairScanReport scan;
                bool ok = simp::verify_lipschitz_uniform(*space, img, eps, &scan);
                std::cout << (ok ? "lipschitz-ok" : "VIOLATION") << " ratio "
                          << scan.max_ratio << " pairs " << scan.pairs
                          << (scan.exhaustive ? " (exhaustive)" : " (sampled)")
                          << "\n";
                return ok ? 0 : kVerificationFailed;
            }
        }

        if (*gog_cmd) {
            auto g = load_gog(g_model);
            if (*g_reduce) {
                auto w = parse_gword(*g, g_word, g->base_vertex());
                auto red = g->reduce(w);
                auto canon = g->canonical(w);
                auto minimal = g->norm_minimized(w);
                std::cout << "reduced   " << g->format(red) << "\n";
                std::cout << "canonical " << g->format(canon) << "\n";
                std::cout << "minimal   " << g->format(minimal) << " norm "
                          << g->reduced_form_norm(w) << "\n";
                std::cout << "reduced?  " << (g->is_reduced(w) ? "yes" : "no") << "\n";
                std::cout << "pi1?      " << (g->pi1_membership(w) ? "yes" : "no")
                          << "\n";
                std::cout << "quotient  "
                          << g->format_quotient(g->project_to_pi1_tree(canon)) << "\n";
                return 0;
            }
            if (*g_ball) {
                auto tb = g->tree_ball(g_radius, g_budget, cap);
                std::cout << "vertices " << tb.reps.size() << "\n";
                for (size_t v = 0; v < tb.reps.size(); ++v)
                    std::cout << "  depth " << tb.tree.depth[v] << "  "
                              << g->vertex_name(tb.vertex_type[v]) << "  "
                              << (tb.labels[v].empty() ? "1" : tb.labels[v]) << "\n";
                return 0;
            }
            if (*g_stab) {
                auto words = g->r_stabilizer(g_R, g_budget, cap);
                std::cout << "words " << words.size() << "\n";
                for (const auto& w : words) std::cout << "  " << g->format(w) << "\n";
                return 0;
            }
            if (*g_strata) {
                for (i64 kk = 0; kk <= g_budget; ++kk) {
                    auto words = g->h_stratum(kk, g_budget, cap);
                    if (words.empty()) continue;
                    std::cout << "H_" << kk << " " << words.size() << " words\n";
                }
                return 0;
            }
            if (*g_lem) {
                auto pieces = g->stratum_pieces(g_k, g->edge_by_name(g_edge), g_r,
                                                g_budget, cap);
                std::cout << pieces.diagnostic << "\n";
                std::cout << "covers slice: "
                          << (pieces.covers_stratum_slice ? "yes" : "no") << "\n";
                std::cout << "r-disjoint:   " << (pieces.r_disjoint ? "yes" : "no")
                          << "\n";
                return pieces.covers_stratum_slice && pieces.r_disjoint
                           ? 0
                           : kVerificationFailed;
            }
        }

        if (*synth_cmd) {
            auto model = load_model(y_model);
            synth::ActionContext ctx;
            if (model.kind == io::ModelHandle::Kind::Gog)
                ctx = synth::context_from_gog(*model.graph, y_radius, 6, int(y_k), cap);
            else
                ctx = synth::context_from_tree_ball(model.ball(y_radius, cap),
                                                    int(y_k), y_model + " ball");
            std::optional<synth::PipelineParams> params;
            if (!y_eps.empty() || y_r > 0 || y_sep > 0 || y_relax) {
                synth::PipelineParams p;
                p.epsilon = y_eps.empty() ? Rat(1, 2) : Rat::parse(y_eps);
                p.r = y_r > 0 ? y_r : 2;
                p.separation = y_sep;
                p.relax_hypotheses = y_relax;
                params = p;
            }
            auto res = synth::ball_cover_pipeline(ctx, y_d, params);
            if (*y_run) {
                std::string path = out_dir + "/" + y_model + "-synth.manifest";
                io::write_file(path, res.manifest);
                std::cout << res.manifest;
                std::cout << "manifest " << path << "\n";
                return 0;
            }
            if (*y_verify) {
                std::string persisted = io::read_file(y_manifest);
                bool same = persisted == res.manifest;
                std::cout << (same ? "manifest reproduced byte-for-byte"
                                   : "MANIFEST MISMATCH")
                          << "\n";
                return same ? 0 : kVerificationFailed;
            }
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.code();
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kInternal;
    }
    return 0;
}
