#include "asdim/recipes.hpp"

#include <random>
#include <sstream>

#include "asdim/cover_search.hpp"
#include "asdim/error.hpp"
#include "asdim/io.hpp"
#include "asdim/synth.hpp"
#include "asdim/util.hpp"

namespace asdim {
namespace recipes {

using covers::Cover;
using covers::PointSet;
using covers::SpaceRef;

std::vector<Recipe> bundled_recipes() {
    std::vector<Recipe> rs;
    auto add = [&](Recipe r) { rs.push_back(std::move(r)); };

    add({"z-upper", "two interval families on a Z ball", "cover-search",
         {{"model", "Z"}, {"radius", "50"}, {"d", "5"}, {"B", "12"}, {"n", "1"}},
         "upper"});
    add({"z-refute-n0",
         "one bounded family cannot cover a long segment", "cover-refute",
         {{"model", "Z"}, {"radius", "18"}, {"d", "2"}, {"B", "6"}, {"n", "0"}},
         "refuted"});
    add({"z2-upper-bricks", "brick-wall three-coloring of a Z^2 ball",
         "cover-search-bricks",
         {{"model", "Z2"}, {"radius", "20"}, {"d", "4"}, {"B", "40"}},
         "upper"});
    add({"z2-refute-sharpness",
         "two families are impossible on Z^2 at a fixed scale; evidence for "
         "the amalgam sharpness example",
         "cover-refute-grow",
         {{"model", "Z2"}, {"d", "3"}, {"B", "6"}, {"n", "1"},
          {"radius-min", "4"}, {"radius-max", "9"}},
         "refuted"});
    add({"z2-upper-at-sharpness-scale",
         "three brick families at the same scale the refuter closes",
         "cover-search-bricks",
         {{"model", "Z2"}, {"radius", "9"}, {"d", "3"}, {"B", "6"}},
         "upper"});
    add({"f2-tree-cover", "two-family annulus cover of a free-group ball",
         "tree-cover", {{"model", "F2"}, {"radius", "6"}, {"d", "1"}}, "ok"});
    add({"f2-pipeline",
         "end-to-end cover synthesis on the free group (radius 30 exceeds "
         "the element cap and reports budget-exceeded)",
         "synth",
         {{"model", "F2"}, {"radius", "30"}, {"d", "4"}, {"k", "0"}}, ""});
    add({"f2-pipeline-feasible",
         "end-to-end cover synthesis on a free-group ball within the cap",
         "synth", {{"model", "F2"}, {"radius", "12"}, {"d", "4"}, {"k", "0"}},
         "verified"});
    add({"kb-pipeline",
         "end-to-end cover synthesis on the Klein-bottle amalgam ball",
         "synth",
         {{"model", "klein-bottle"}, {"radius", "30"}, {"d", "3"}, {"k", "1"}},
         "verified"});
    add({"amalgam-prop5",
         "path length vs tree displacement, exhaustive over the amalgam ball",
         "stabilizer-sweep",
         {{"model", "klein-bottle"}, {"budget", "8"}, {"R", "3"}}, "ok"});
    add({"hnn-prop5",
         "path length vs tree displacement, exhaustive over the HNN ball",
         "stabilizer-sweep", {{"model", "bs12"}, {"budget", "8"}, {"R", "3"}},
         "ok"});
    add({"lemma3-amalgam", "stratum pieces and the r-strip on the amalgam",
         "stratum-pieces",
         {{"model", "klein-bottle"}, {"k", "1"}, {"r", "3"}, {"budget", "12"},
          {"edge", "y"}},
         "ok"});
    add({"lemma3-free-product",
         "stratum pieces with nonempty truncations (trivial edge group)",
         "stratum-pieces",
         {{"model", "zz-free-product"}, {"k", "1"}, {"r", "3"}, {"budget", "12"},
          {"edge", "y"}},
         "ok"});
    add({"prop1-verify",
         "canonical projections are eps-Lipschitz under the Lebesgue threshold",
         "projection-lipschitz", {{"instances", "12"}}, "ok"});
    add({"prop3-cn", "sampled prism uniformization constants", "cn-estimate",
         {{"n", "1"}}, "ok"});
    add({"assertion1-roundtrip",
         "colored families to covers and back at reduced scale",
         "roundtrip", {{"instances", "20"}}, "ok"});
    return rs;
}

Recipe find_recipe(const std::string& name) {
    for (auto& r : bundled_recipes())
        if (r.name == name) return r;
    throw ParseError("unknown recipe: " + name);
}

Recipe parse_recipe(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || trim(line) != "asdim-recipe v1")
        throw ParseError("recipe: bad header");
    Recipe r;
    while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        auto toks = split_ws(line);
        if (toks[0] == "name") r.name = toks[1];
        else if (toks[0] == "operation") r.operation = toks[1];
        else if (toks[0] == "expect") r.expected_verdict = toks[1];
        else if (toks[0] == "param" && toks.size() >= 3) r.params[toks[1]] = toks[2];
        else if (toks[0] == "description")
            r.description = trim(line.substr(line.find("description") + 11));
    }
    if (r.name.empty() || r.operation.empty())
        throw ParseError("recipe: name and operation required");
    return r;
}

std::string write_recipe(const Recipe& r) {
    std::ostringstream out;
    out << "asdim-recipe v1\n";
    out << "name " << r.name << "\n";
    out << "description " << r.description << "\n";
    out << "operation " << r.operation << "\n";
    for (const auto& [k, v] : r.params) out << "param " << k << " " << v << "\n";
    if (!r.expected_verdict.empty()) out << "expect " << r.expected_verdict << "\n";
    return out.str();
}

namespace {

i64 param_i(const Recipe& r, const std::string& key, i64 def = -1) {
    auto it = r.params.find(key);
    if (it == r.params.end()) {
        if (def >= 0) return def;
        throw PreconditionError("recipe parameter missing: " + key);
    }
    return std::stoll(it->second);
}

std::string param_s(const Recipe& r, const std::string& key) {
    auto it = r.params.find(key);
    if (it == r.params.end())
        throw PreconditionError("recipe parameter missing: " + key);
    return it->second;
}

SpaceRef recipe_space(const Recipe& r, i64 budget,
                      std::optional<groups::CayleyBall>* ball_out = nullptr) {
    auto model = io::builtin_model(param_s(r, "model"));
    auto ball = model.ball(param_i(r, "radius"), budget);
    if (ball_out) *ball_out = ball;
    return ball.space;
}

std::vector<std::pair<i64, i64>> z2_coords(const MetricSpace& s) {
    std::vector<std::pair<i64, i64>> coords;
    for (int i = 0; i < s.size(); ++i) {
        auto lbl = s.label(i);
        auto comma = lbl.find(',');
        coords.push_back({std::stoll(lbl.substr(0, comma)),
                          std::stoll(lbl.substr(comma + 1))});
    }
    return coords;
}

std::string attrs_line(const covers::CoverAttributes& a) {
    std::ostringstream out;
    out << "multiplicity " << a.multiplicity << " bound " << a.bound.str()
        << " lebesgue " << a.lebesgue.str() << " covers "
        << (a.covers ? "yes" : "no");
    return out.str();
}

} // namespace

RunResult run_recipe(const Recipe& r, std::uint64_t seed, double timeout_seconds,
                     i64 budget_override) {
    RunResult out;
    std::ostringstream rep;
    rep << "asdim-report v1\n";
    rep << "recipe " << r.name << "\n";
    rep << "operation " << r.operation << "\n";
    for (const auto& [k, v] : r.params) rep << "param " << k << " " << v << "\n";
    rep << "seed " << seed << "\n";
    i64 cap = budget_override > 0 ? budget_override : groups::kDefaultElementCap;

    auto finish = [&](const std::string& verdict, int code) {
        rep << "verdict " << verdict << "\n";
        out.verdict = verdict;
        out.exit_code = code;
        if (!r.expected_verdict.empty()) {
            bool match = verdict.rfind(r.expected_verdict, 0) == 0;
            rep << "expected " << r.expected_verdict << " match "
                << (match ? "yes" : "no") << "\n";
            if (!match && code == 0) out.exit_code = kVerificationFailed;
        }
        out.report = rep.str();
    };

    try {
        if (r.operation == "cover-search") {
            SpaceRef space = recipe_space(r, cap);
            auto cert = covers::scale_dim_upper(space, Rat(param_i(r, "d")),
                                                Rat(param_i(r, "B")),
                                                int(param_i(r, "n")));
            std::string why;
            if (!covers::verify_certificate(cert, space, &why))
                throw VerificationError(why);
            out.certificate = io::write_certificate(cert);
            out.certificate_ext = ".cert";
            rep << "reverified yes\n";
            finish("upper(" + std::to_string(cert.n) + ")", 0);
        } else if (r.operation == "cover-search-bricks") {
            SpaceRef space = recipe_space(r, cap);
            auto coords = z2_coords(*space);
            i64 d = param_i(r, "d");
            i64 w = 2 * (d - 1) + (d % 2 == 0 ? 0 : 2); // even, >= 2(d-1)
            if (w % 2) ++w;
            if (w < 2) w = 2;
            i64 h = std::max<i64>(d - 1, 1);
            auto cert = covers::scale_dim_upper_bricks(space, coords, Rat(d),
                                                       Rat(param_i(r, "B")), w, h);
            std::string why;
            if (!covers::verify_certificate(cert, space, &why))
                throw VerificationError(why);
            out.certificate = io::write_certificate(cert);
            out.certificate_ext = ".cert";
            rep << "reverified yes\n";
            finish("upper(2)", 0);
        } else if (r.operation == "cover-refute") {
            SpaceRef space = recipe_space(r, cap);
            covers::SearchLimits limits;
            limits.timeout_seconds = timeout_seconds;
            auto cert = covers::scale_dim_refute(space, Rat(param_i(r, "d")),
                                                 Rat(param_i(r, "B")),
                                                 int(param_i(r, "n")), limits);
            out.certificate = io::write_certificate(cert);
            out.certificate_ext = ".cert";
            rep << "transcript " << cert.transcript << "\n";
            finish(cert.verdict == covers::Verdict::Refuted
                       ? "refuted(" + std::to_string(cert.n) + "," + cert.B.str() + ")"
                       : "upper(" + std::to_string(cert.n) + ")",
                   0);
        } else if (r.operation == "cover-refute-grow") {
            auto model = io::builtin_model(param_s(r, "model"));
            i64 d = param_i(r, "d"), B = param_i(r, "B");
            int n = int(param_i(r, "n"));
            covers::SearchLimits limits;
            limits.timeout_seconds = timeout_seconds;
            for (i64 rad = param_i(r, "radius-min"); rad <= param_i(r, "radius-max");
                 ++rad) {
                SpaceRef space = model.ball(rad, cap).space;
                auto cert = covers::scale_dim_refute(space, Rat(d), Rat(B), n, limits);
                rep << "radius " << rad << " " << cert.transcript << "\n";
                if (cert.verdict == covers::Verdict::Refuted) {
                    out.certificate = io::write_certificate(cert);
                    out.certificate_ext = ".cert";
                    finish("refuted(" + std::to_string(n) + "," +
                               std::to_string(B) + ") radius " +
                               std::to_string(rad),
                           0);
                    return out;
                }
            }
            finish("not-refuted-within-radius-range", kSearchExhausted);
        } else if (r.operation == "tree-cover") {
            std::optional<groups::CayleyBall> ball;
            SpaceRef space = recipe_space(r, cap, &ball);
            if (!ball->tree) throw PreconditionError("model ball carries no tree");
            auto cf = covers::tree_cover(space, *ball->tree, param_i(r, "d"));
            std::string why;
            if (!covers::verify_colored(cf, &why)) throw VerificationError(why);
            covers::ScaleDimCertificate cert;
            cert.verdict = covers::Verdict::Upper;
            cert.n = 1;
            cert.d = cf.scale_d;
            cert.B = cf.bound_B;
            cert.space_hash = space->content_hash();
            cert.witness = cf;
            cert.note = "tree annulus construction";
            out.certificate = io::write_certificate(cert);
            out.certificate_ext = ".cert";
            rep << "families 2 bound " << cf.bound_B.str() << "\n";
            finish("ok", 0);
        } else if (r.operation == "synth") {
            auto model = io::builtin_model(param_s(r, "model"));
            int k = int(param_i(r, "k"));
            synth::ActionContext ctx;
            if (model.kind == io::ModelHandle::Kind::Gog) {
                ctx = synth::context_from_gog(*model.graph, param_i(r, "radius"),
                                              6, k, cap);
            } else {
                auto ball = model.ball(param_i(r, "radius"), cap);
                ctx = synth::context_from_tree_ball(ball, k, model.name + " ball");
            }
            auto res = synth::ball_cover_pipeline(ctx, param_i(r, "d"));
            out.certificate = res.manifest;
            out.certificate_ext = ".manifest";
            rep << "pieces " << res.pieces << " collars " << res.collars << "\n";
            rep << attrs_line(res.attrs) << "\n";
            rep << "boundary_exact "
                << (res.boundary_exact ? "yes" : "no") << " checks "
                << res.exact_boundary_checks << "\n";
            finish("verified", 0);
        } else if (r.operation == "stabilizer-sweep") {
            auto g = io::builtin_gog(param_s(r, "model"));
            i64 budget = param_i(r, "budget");
            i64 R = param_i(r, "R");
            auto ball = g->k_ball(budget, cap, false, false);
            auto tb = g->tree_ball(budget + 1, budget, cap);
            i64 mismatches = 0;
            for (const auto& w : ball.words) {
                i64 len = w.length();
                i64 disp = tb.tree.depth[tb.locate(*g, w)];
                if (len != disp) ++mismatches;
            }
            rep << "words " << ball.words.size() << " mismatches " << mismatches
                << " R-range 0.." << R << "\n";
            finish(mismatches == 0 ? "ok" : "mismatch", mismatches == 0 ? 0 : kVerificationFailed);
        } else if (r.operation == "stratum-pieces") {
            auto g = io::builtin_gog(param_s(r, "model"));
            auto pieces = g->stratum_pieces(param_i(r, "k"),
                                            g->edge_by_name(param_s(r, "edge")),
                                            param_i(r, "r"), param_i(r, "budget"),
                                            cap);
            rep << pieces.diagnostic << "\n";
            rep << "covers_slice " << (pieces.covers_stratum_slice ? "yes" : "no")
                << " r_disjoint " << (pieces.r_disjoint ? "yes" : "no") << "\n";
            finish(pieces.covers_stratum_slice && pieces.r_disjoint ? "ok" : "failed",
                   pieces.covers_stratum_slice && pieces.r_disjoint
                       ? 0
                       : kVerificationFailed);
        } else if (r.operation == "projection-lipschitz") {
            // randomized interval covers on Z balls at the threshold
            std::mt19937_64 rng(seed);
            int instances = int(param_i(r, "instances", 12));
            int bad = 0;
            for (int t = 0; t < instances; ++t) {
                i64 radius = 300 + i64(rng() % 500);
                auto ball = io::builtin_model("Z").ball(radius, cap);
                Rat eps(1, 1 + int(rng() % 2));
                int kk = 1;
                Rat nu = simp::min_lebesgue_for_lipschitz(eps, kk);
                i64 overlap = nu.num() / nu.den() * 2 + 4 + i64(rng() % 10);
                i64 len = overlap * 3;
                Cover c;
                c.space = ball.space;
                std::map<i64, int> pos;
                for (int i = 0; i < ball.space->size(); ++i)
                    pos[std::stoll(ball.space->label(i))] = i;
                for (i64 lo = -radius; lo <= radius; lo += len - overlap) {
                    PointSet s;
                    for (i64 v = lo; v < lo + len && v <= radius; ++v)
                        if (pos.count(v)) s.push_back(pos[v]);
                    std::sort(s.begin(), s.end());
                    if (!s.empty()) c.sets.push_back(s);
                }
                auto attrs = covers::attributes(c);
                if (!(attrs.lebesgue > nu) || attrs.multiplicity > kk + 1) continue;
                auto nv = simp::nerve(c);
                std::vector<simp::UniformPoint> img;
                for (int x = 0; x < ball.space->size(); ++x)
                    img.push_back(simp::canonical_projection(c, nv, x));
                simp::PairScanReport scan;
                if (!simp::verify_lipschitz_uniform(*ball.space, img, eps, &scan))
                    ++bad;
                rep << "instance " << t << " eps " << eps.str() << " nu "
                    << nu.str() << " L " << attrs.lebesgue.str() << " ratio "
                    << scan.max_ratio << "\n";
            }
            finish(bad == 0 ? "ok" : "lipschitz-violation",
                   bad == 0 ? 0 : kVerificationFailed);
        } else if (r.operation == "cn-estimate") {
            auto est = simp::estimate_cn(int(param_i(r, "n", 1)));
            rep << "density " << est.density << "\n";
            for (int kk = 1; kk < int(est.lambda.size()); ++kk)
                rep << "lambda_" << kk << " " << est.lambda[kk] << "\n";
            rep << "c_n " << est.value << "\n";
            finish(est.value >= 1.0 ? "ok" : "suspicious", 0);
        } else if (r.operation == "roundtrip") {
            std::mt19937_64 rng(seed);
            int instances = int(param_i(r, "instances", 20));
            int failures = 0;
            for (int t = 0; t < instances; ++t) {
                i64 radius = 40 + i64(rng() % 40);
                auto ball = io::builtin_model("Z").ball(radius, cap);
                i64 s6 = 6 * (2 + i64(rng() % 3));
                i64 block = s6 + i64(rng() % 5);
                covers::ColoredFamilies cf;
                cf.space = ball.space;
                cf.scale_d = Rat(s6);
                cf.families.assign(2, {});
                std::map<i64, int> pos;
                for (int i = 0; i < ball.space->size(); ++i)
                    pos[std::stoll(ball.space->label(i))] = i;
                int fam = 0;
                for (i64 lo = -radius; lo <= radius; lo += block + s6) {
                    PointSet piece;
                    for (i64 v = lo; v < lo + block && v <= radius; ++v)
                        if (pos.count(v)) piece.push_back(pos[v]);
                    std::sort(piece.begin(), piece.end());
                    if (!piece.empty()) cf.families[fam].push_back(piece);
                    fam ^= 1;
                }
                // leftover gap points join nothing: fill by alternating blocks
                // covering everything instead
                cf.families.assign(2, {});
                fam = 0;
                for (i64 lo = -radius; lo <= radius; lo += block) {
                    PointSet piece;
                    for (i64 v = lo; v < lo + block && v <= radius; ++v)
                        if (pos.count(v)) piece.push_back(pos[v]);
                    std::sort(piece.begin(), piece.end());
                    if (!piece.empty()) {
                        cf.families[fam].push_back(piece);
                        fam ^= 1;
                    }
                }
                cf.scale_d = Rat(block); // same-family blocks are block+1 apart
                cf.bound_B = covers::max_diameter(*ball.space, cf.flatten().sets);
                std::string why;
                if (!covers::verify_colored(cf, &why)) {
                    ++failures;
                    rep << "instance " << t << " generator-invalid: " << why << "\n";
                    continue;
                }
                Cover c = covers::colored_to_cover(cf);
                auto attrs = covers::attributes(c);
                Rat back_scale = cf.scale_d / Rat(6);
                try {
                    auto cf2 = covers::cover_to_colored(c, back_scale, 2);
                    std::string why2;
                    if (!covers::verify_colored(cf2, &why2)) {
                        ++failures;
                        rep << "instance " << t << " reconversion-invalid: " << why2
                            << "\n";
                    } else {
                        rep << "instance " << t << " ok mult "
                            << attrs.multiplicity << " L " << attrs.lebesgue.str()
                            << "\n";
                    }
                } catch (const Error& e) {
                    ++failures;
                    rep << "instance " << t << " " << e.what() << "\n";
                }
            }
            finish(failures == 0 ? "ok" : "roundtrip-failures",
                   failures == 0 ? 0 : kVerificationFailed);
        } else {
            throw ParseError("unknown operation: " + r.operation);
        }
    } catch (const Error& e) {
        rep << "error " << e.what() << "\n";
        finish(std::string("error: ") + e.what(), e.code());
    }
    return out;
}

} // namespace recipes
} // namespace asdim
