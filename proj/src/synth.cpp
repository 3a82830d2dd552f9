#include "asdim/synth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "asdim/error.hpp"
#include "asdim/kernels.hpp"
#include "asdim/util.hpp"

namespace asdim {
namespace synth {

using covers::Cover;
using covers::PointSet;
using covers::SpaceRef;

void ActionContext::recompute_lambda() {
    auto ball = std::dynamic_pointer_cast<const BallSpace>(group_space);
    if (!ball) return;
    i64 lam = 0;
    int root = orbit_map.empty() ? 0 : orbit_map[0];
    for (int i = 0; i < ball->size(); ++i) {
        if (ball->norm(i) != 1) continue;
        lam = std::max(lam, tree.tree_dist(root, orbit_map[i]));
    }
    lambda = std::max<i64>(lam, 1);
}

ActionContext context_from_tree_ball(const groups::CayleyBall& ball,
                                     int stabilizer_dim,
                                     const std::string& description) {
    if (!ball.tree)
        throw PreconditionError("context needs a model whose Cayley graph is a tree");
    ActionContext ctx;
    ctx.group_space = ball.space;
    ctx.tree_space = ball.space;
    ctx.tree = *ball.tree;
    ctx.orbit_map.resize(ball.space->size());
    for (int i = 0; i < ball.space->size(); ++i) ctx.orbit_map[i] = i;
    ctx.stabilizer_dim = stabilizer_dim;
    ctx.description = description;
    ctx.recompute_lambda();
    return ctx;
}

ActionContext context_from_gog(const gog::GraphOfGroups& g, i64 budget,
                               i64 tree_coeff_budget, int stabilizer_dim, i64 cap) {
    ActionContext ctx;
    auto kball = g.k_ball(budget, cap, false, true);
    auto tball = g.tree_ball(budget, tree_coeff_budget, cap);
    ctx.group_space = kball.space;
    ctx.tree_space = tball.space;
    ctx.tree = tball.tree;
    ctx.orbit_map.resize(kball.words.size());
    for (size_t i = 0; i < kball.words.size(); ++i)
        ctx.orbit_map[i] = tball.locate(g, kball.words[i]);
    ctx.stabilizer_dim = stabilizer_dim;
    ctx.description = "graph-of-groups word ball, budget " + std::to_string(budget);
    ctx.recompute_lambda();
    return ctx;
}

OrbitCoverData orbit_cover(const ActionContext& ctx, i64 separation, i64 r,
                           bool relax) {
    if (!relax && separation < 4 * ctx.lambda * r)
        throw PreconditionError("separation-too-small: need separation >= 4*lambda*r");
    covers::ColoredFamilies tc =
        covers::tree_cover(ctx.tree_space, ctx.tree, separation);

    // orbit = image of the orbit map
    std::set<int> orbit_set(ctx.orbit_map.begin(), ctx.orbit_map.end());
    std::vector<char> in_orbit(ctx.tree_space->size(), 0);
    for (int v : orbit_set) in_orbit[v] = 1;

    OrbitCoverData out;
    for (int fam = 0; fam < 2; ++fam) {
        for (const auto& piece : tc.families[fam]) {
            PointSet restricted;
            for (int v : piece)
                if (in_orbit[v]) restricted.push_back(v);
            if (restricted.empty()) continue;
            out.pieces.push_back(restricted);
            out.family_of.push_back(fam);
            out.center.push_back(restricted.front());
        }
    }
    // lambda*r enlargement within the orbit, by BFS over the tree
    std::vector<std::vector<int>> children(ctx.tree.size());
    for (int v = 0; v < ctx.tree.size(); ++v)
        if (ctx.tree.parent[v] >= 0) children[ctx.tree.parent[v]].push_back(v);
    i64 radius = ctx.lambda * r;
    for (const auto& piece : out.pieces) {
        std::vector<i64> dist(ctx.tree.size(), -1);
        std::vector<int> frontier = piece;
        for (int v : piece) dist[v] = 0;
        for (i64 step = 1; step <= radius && !frontier.empty(); ++step) {
            std::vector<int> next;
            for (int v : frontier) {
                std::vector<int> nbrs = children[v];
                if (ctx.tree.parent[v] >= 0) nbrs.push_back(ctx.tree.parent[v]);
                for (int u : nbrs)
                    if (dist[u] < 0) {
                        dist[u] = step;
                        next.push_back(u);
                    }
            }
            frontier = std::move(next);
        }
        PointSet grown;
        for (int v = 0; v < ctx.tree.size(); ++v)
            if (dist[v] >= 0 && in_orbit[v]) grown.push_back(v);
        out.enlarged.push_back(grown);
    }
    std::map<int, int> count;
    for (const auto& s : out.enlarged)
        for (int v : s) ++count[v];
    for (auto& [v, c] : count)
        out.enlarged_multiplicity = std::max(out.enlarged_multiplicity, c);
    if (out.enlarged_multiplicity > 2)
        throw VerificationError(
            "orbit cover enlargement has multiplicity " +
            std::to_string(out.enlarged_multiplicity) + " > 2");
    // uniform radius: N_{lambda r}(W) inside B_R(x_W)
    for (size_t p = 0; p < out.pieces.size(); ++p) {
        for (int v : out.enlarged[p])
            out.uniform_radius =
                std::max(out.uniform_radius, ctx.tree.tree_dist(out.center[p], v));
    }
    return out;
}

namespace {

// Single-set cover of the domain subspace (the degenerate certificate).
Cover whole_set_cover(const SpaceRef& sub) {
    Cover c;
    c.space = sub;
    PointSet all(sub->size());
    for (int i = 0; i < sub->size(); ++i) all[i] = i;
    c.sets.push_back(all);
    return c;
}

} // namespace

StabilizerCovers stabilizer_covers(const ActionContext& ctx,
                                   const PointSet& domain, const Rat& level_fine,
                                   const Rat& level_coarse, int k,
                                   bool structured) {
    StabilizerCovers out;
    out.domain = domain;
    auto sub = std::make_shared<SubSpace>(ctx.group_space, domain);

    if (structured) {
        // Scale-certificate route: families at scale 3*level+3, enlarged by
        // a third, give L > level with multiplicity <= k+1.
        auto build = [&](const Rat& level) -> std::optional<Cover> {
            Rat d = level * Rat(3) + Rat(3);
            Rat B = d * Rat(4);
            try {
                auto cert = covers::scale_dim_upper(sub, d, B, k);
                Cover c = covers::colored_to_cover(*cert.witness);
                return c;
            } catch (const SearchExhausted&) {
                return std::nullopt;
            }
        };
        auto fine = build(level_fine);
        if (fine) {
            Rat b_fine = covers::max_diameter(*sub, fine->sets);
            auto coarse = build(max(level_coarse, b_fine));
            if (coarse) {
                out.fine = *fine;
                out.coarse = *coarse;
                out.fine_bound = b_fine;
                return out;
            }
        }
    }
    // Degenerate fallback: one set covering everything has multiplicity 1
    // and infinite Lebesgue number, against any threshold.
    out.fine = whole_set_cover(sub);
    out.coarse = whole_set_cover(sub);
    out.degenerate = true;
    out.fine_bound = Rat(0); // reported as a bound only when finite sets exist
    return out;
}

simp::SimplicialMap nerve_refinement_map(const Cover& fine, const Cover& coarse,
                                         const simp::ComplexRef& nerve_fine,
                                         const simp::ComplexRef& nerve_coarse) {
    simp::SimplicialMap g;
    g.domain = nerve_fine;
    g.codomain = nerve_coarse;
    for (const auto& vset : fine.sets) {
        PointSet v = vset;
        std::sort(v.begin(), v.end());
        int chosen = -1;
        for (int u = 0; u < int(coarse.sets.size()); ++u) {
            PointSet cu = coarse.sets[u];
            std::sort(cu.begin(), cu.end());
            if (std::includes(cu.begin(), cu.end(), v.begin(), v.end())) {
                chosen = u;
                break;
            }
        }
        if (chosen < 0)
            throw PreconditionError(
                "containment-failure: a fine set lies in no coarse set");
        g.vertex_map.push_back(chosen);
    }
    std::string why;
    if (!g.simplicial(&why))
        throw VerificationError("refinement map is not simplicial: " + why);
    return g;
}

CollarMap collar_cylinder_map(const SpaceRef& ball, const PointSet& A,
                              const PointSet& collar, i64 rho,
                              const Cover& fine_restricted,
                              const Cover& coarse_restricted,
                              const simp::ComplexRef& nerve_fine,
                              const simp::ComplexRef& nerve_coarse,
                              const simp::SimplicialMap& g,
                              const simp::MappingCylinder& cyl, const Rat& eps) {
    CollarMap out;
    out.points = collar;
    Rat rho_r(rho);
    const auto& sub = *fine_restricted.space; // SubSpace over `collar`

    for (int i = 0; i < int(collar.size()); ++i) {
        int x = collar[i];
        ExtRat dxA_e = covers::dist_to_set(*ball, x, A);
        Rat dxA = dxA_e.is_infinite() ? rho_r : dxA_e.finite();
        Rat t = min(Rat(2), (dxA + dxA) / rho_r);
        simp::UniformPoint pv = simp::canonical_projection(fine_restricted, nerve_fine, i);
        simp::UniformPoint value;
        int branch;
        if (dxA + dxA > rho_r) { // d(x, A) > rho/2
            branch = 1;
            value = simp::cylinder_point(cyl, g, pv, Rat(2) - t);
        } else {
            branch = 2;
            simp::UniformPoint pu =
                simp::canonical_projection(coarse_restricted, nerve_coarse, i);
            simp::UniformPoint gv = g.push(pv);
            value.complex = cyl.complex;
            for (const auto& [v, c] : gv.coords) {
                Rat w = t * c;
                if (!w.is_zero()) value.coords[cyl.codomain_vertex(v)] = w;
            }
            for (const auto& [v, c] : pu.coords) {
                Rat w = (Rat(1) - t) * c;
                if (w.is_zero()) continue;
                auto [it, fresh] = value.coords.emplace(cyl.codomain_vertex(v), w);
                if (!fresh) it->second += w;
            }
        }
        out.values.push_back(value);
        out.branch.push_back(branch);

        // Exact boundary and agreement conditions.
        if (dxA.is_zero()) {
            simp::UniformPoint pu =
                simp::canonical_projection(coarse_restricted, nerve_coarse, i);
            simp::UniformPoint expect;
            expect.complex = cyl.complex;
            for (const auto& [v, c] : pu.coords)
                expect.coords[cyl.codomain_vertex(v)] = c;
            ++out.exact_boundary_checks;
            if (!(simp::uniform_dist_sq(value, expect).is_zero()))
                out.boundary_exact = false;
        }
        if (dxA == rho_r) {
            // outer boundary must land on the domain copy at p_V, built
            // here directly rather than through the staircase algebra
            simp::UniformPoint expect;
            expect.complex = cyl.complex;
            for (const auto& [v, c] : pv.coords)
                expect.coords[cyl.domain_vertex(v)] = c;
            ++out.exact_boundary_checks;
            if (!(simp::uniform_dist_sq(value, expect).is_zero()))
                out.boundary_exact = false;
        }
        if (dxA + dxA == rho_r) { // threshold: both formulas agree
            simp::UniformPoint alt = simp::cylinder_point(cyl, g, pv, Rat(1));
            ++out.exact_boundary_checks;
            if (!(simp::uniform_dist_sq(value, alt).is_zero()))
                out.boundary_exact = false;
        }
    }

    simp::PairScanReport rep;
    simp::verify_lipschitz_uniform(sub, out.values, eps, &rep);
    out.sampled_lipschitz = rep.max_ratio;

    // Coboundedness: preimages of subcylinders over the fine-nerve
    // simplices have diameter at most twice the coarse bound.
    out.cobound = Rat(0);
    std::map<simp::Simplex, PointSet> groups;
    for (int i = 0; i < int(collar.size()); ++i) {
        simp::UniformPoint pv = simp::canonical_projection(fine_restricted, nerve_fine, i);
        groups[pv.support()].push_back(i);
    }
    for (auto& [sig, pts] : groups)
        out.cobound = max(out.cobound, covers::set_diameter(sub, pts));
    return out;
}

GluedMap build_glued_map(const ActionContext& ctx, const PipelineParams& params) {
    GluedMap out;
    i64 r = params.r;
    i64 rho = params.rho > 0 ? params.rho : r;
    i64 sep = params.separation > 0 ? params.separation : 4 * ctx.lambda * r;
    const SpaceRef& ball = ctx.group_space;
    int n_pts = ball->size();

    OrbitCoverData oc = orbit_cover(ctx, sep, r, params.relax_hypotheses);
    int n_pieces = int(oc.pieces.size());

    // hypothesis bookkeeping
    int k = ctx.stabilizer_dim;
    simp::CnEstimate cn = simp::estimate_cn(std::min(k, 3));
    i64 ck = i64(std::ceil(cn.value));
    Rat nu = simp::min_lebesgue_for_lipschitz(params.epsilon / Rat(4 * ck), k);
    auto note_violation = [&](const std::string& s) {
        out.hypothesis_violations.push_back(s);
        if (!params.relax_hypotheses)
            throw PreconditionError("hypothesis-violation: " + s);
    };
    if (Rat(r) <= Rat(8) / params.epsilon)
        note_violation("collar radius r <= 8/eps (r=" + std::to_string(r) + ")");
    if (Rat(r) <= nu)
        note_violation("collar radius r <= nu(eps/4c_k,k) = " + nu.str());

    // group-side pieces and their stabilizer covers
    std::vector<PointSet> bars(n_pieces); // pi^-1(W)
    {
        std::vector<int> piece_of_vertex(ctx.tree_space->size(), -1);
        for (int p = 0; p < n_pieces; ++p)
            for (int v : oc.pieces[p]) piece_of_vertex[v] = p;
        for (int x = 0; x < n_pts; ++x) {
            int p = piece_of_vertex[ctx.orbit_map[x]];
            if (p < 0) throw std::logic_error("orbit point outside every piece");
            bars[p].push_back(x);
        }
    }

    // W_R(x_W) domains
    std::vector<PointSet> domains(n_pieces);
    for (int x = 0; x < n_pts; ++x)
        for (int p = 0; p < n_pieces; ++p)
            if (ctx.tree.tree_dist(ctx.orbit_map[x], oc.center[p]) <=
                oc.uniform_radius + ctx.lambda * r)
                domains[p].push_back(x);

    std::vector<StabilizerCovers> stabs;
    std::vector<simp::ComplexRef> nerves;
    for (int p = 0; p < n_pieces; ++p) {
        StabilizerCovers sc =
            stabilizer_covers(ctx, domains[p], max(Rat(std::max(r, i64(1))), nu),
                              Rat(0), k, params.structured_stabilizers);
        stabs.push_back(sc);
        nerves.push_back(simp::nerve(stabs[p].fine));
    }

    // collars between touching enlarged pieces
    struct Collar {
        int p, q;      // pieces, p < q
        PointSet A;    // group side of the overlap
        PointSet pts;  // N_r(A)
    };
    std::vector<Collar> collars;
    for (int p = 0; p < n_pieces; ++p)
        for (int q = p + 1; q < n_pieces; ++q) {
            std::vector<char> inq(ctx.tree_space->size(), 0);
            for (int v : oc.enlarged[q]) inq[v] = 1;
            PointSet overlap;
            for (int v : oc.enlarged[p])
                if (inq[v]) overlap.push_back(v);
            if (overlap.empty()) continue;
            Collar c;
            c.p = p;
            c.q = q;
            std::vector<char> in_overlap(ctx.tree_space->size(), 0);
            for (int v : overlap) in_overlap[v] = 1;
            for (int x = 0; x < n_pts; ++x)
                if (in_overlap[ctx.orbit_map[x]]) c.A.push_back(x);
            if (c.A.empty()) continue;
            for (int x = 0; x < n_pts; ++x) {
                ExtRat d = covers::dist_to_set(*ball, x, c.A);
                if (!d.is_infinite() && d.finite() <= Rat(r)) c.pts.push_back(x);
            }
            collars.push_back(std::move(c));
        }
    out.collar_count = int(collars.size());

    // collar neighborhoods must be pairwise disjoint
    {
        std::vector<int> owner(n_pts, -1);
        for (int ci = 0; ci < int(collars.size()); ++ci)
            for (int x : collars[ci].pts) {
                if (owner[x] >= 0)
                    throw VerificationError(
                        "edge-overlap: collar neighborhoods intersect "
                        "(enlarged multiplicity would exceed 2)");
                owner[x] = ci;
            }
    }

    // ---- assemble K ----
    // vertices: per piece, the fine-nerve vertices; per collar, the coarse
    // restricted nerve vertices.
    std::vector<std::string> k_labels;
    std::vector<std::vector<int>> piece_vertex(n_pieces);
    for (int p = 0; p < n_pieces; ++p)
        for (int v = 0; v < nerves[p]->vertex_count(); ++v) {
            piece_vertex[p].push_back(int(k_labels.size()));
            k_labels.push_back("W" + std::to_string(p) + ":" +
                               nerves[p]->vertex_label(v));
        }

    struct CollarLocal {
        Cover fine_r, coarse_r;
        simp::ComplexRef nerve_fine, nerve_coarse;
        simp::SimplicialMap g;
        simp::MappingCylinder cyl;
        std::vector<int> fine_owner;   // fine_r set -> fine set of the piece
        std::vector<int> coarse_vertex; // coarse_r set -> K vertex
        CollarMap map;
    };
    std::vector<CollarLocal> locals(collars.size());

    for (int ci = 0; ci < int(collars.size()); ++ci) {
        const Collar& c = collars[ci];
        CollarLocal& L = locals[ci];
        auto collar_sub = std::make_shared<SubSpace>(ball, c.pts);
        // restrict the smaller-index piece's covers to the collar
        auto restrict_cover = [&](const Cover& big, const PointSet& domain_pts,
                                  std::vector<int>* owner) {
            Cover out_c;
            out_c.space = collar_sub;
            std::vector<int> pos(n_pts, -1);
            for (int i = 0; i < int(c.pts.size()); ++i) pos[c.pts[i]] = i;
            for (int s = 0; s < int(big.sets.size()); ++s) {
                PointSet restricted;
                for (int local_idx : big.sets[s]) {
                    int global = domain_pts[local_idx];
                    if (pos[global] >= 0) restricted.push_back(pos[global]);
                }
                if (restricted.empty()) continue;
                std::sort(restricted.begin(), restricted.end());
                out_c.sets.push_back(restricted);
                if (owner) owner->push_back(s);
            }
            return out_c;
        };
        L.fine_r = restrict_cover(stabs[c.p].fine, domains[c.p], &L.fine_owner);
        std::vector<int> coarse_owner;
        L.coarse_r = restrict_cover(stabs[c.p].coarse, domains[c.p], &coarse_owner);
        if (!covers::is_cover(int(c.pts.size()), L.fine_r.sets) ||
            !covers::is_cover(int(c.pts.size()), L.coarse_r.sets))
            throw VerificationError("collar not covered by restricted covers");
        L.nerve_fine = simp::nerve(L.fine_r);
        L.nerve_coarse = simp::nerve(L.coarse_r);
        L.g = nerve_refinement_map(L.fine_r, L.coarse_r, L.nerve_fine, L.nerve_coarse);
        L.cyl = simp::mapping_cylinder(L.g);
        for (int u = 0; u < L.nerve_coarse->vertex_count(); ++u) {
            L.coarse_vertex.push_back(int(k_labels.size()));
            k_labels.push_back("e" + std::to_string(ci) + ":" +
                               L.nerve_coarse->vertex_label(u));
        }
        L.map = collar_cylinder_map(ball, c.A, c.pts, rho, L.fine_r, L.coarse_r,
                                    L.nerve_fine, L.nerve_coarse, L.g, L.cyl,
                                    params.epsilon);
        out.exact_boundary_checks += L.map.exact_boundary_checks;
        out.boundary_exact = out.boundary_exact && L.map.boundary_exact;
    }

    auto K = std::make_shared<simp::OrientedComplex>(k_labels);
    for (int p = 0; p < n_pieces; ++p)
        for (const auto& s : nerves[p]->simplices()) {
            simp::Simplex t;
            for (int v : s) t.push_back(piece_vertex[p][v]);
            K->add_simplex(t);
        }
    for (int ci = 0; ci < int(collars.size()); ++ci) {
        const CollarLocal& L = locals[ci];
        auto to_K = [&](int cyl_vertex) {
            if (cyl_vertex < L.cyl.domain_vertices) {
                // fine restricted vertex -> piece vertex
                int piece_set = L.fine_owner[cyl_vertex];
                return piece_vertex[collars[ci].p][piece_set];
            }
            return L.coarse_vertex[cyl_vertex - L.cyl.domain_vertices];
        };
        for (const auto& s : L.cyl.complex->simplices()) {
            simp::Simplex t;
            for (int v : s) t.push_back(to_K(v));
            K->add_simplex(t);
        }
    }
    out.target = K;
    out.dimension = K->dimension();

    // ---- values of psi ----
    std::vector<int> collar_of(n_pts, -1);
    for (int ci = 0; ci < int(collars.size()); ++ci)
        for (int x : collars[ci].pts) collar_of[x] = ci;
    std::vector<int> piece_of_point(n_pts, -1);
    {
        std::vector<int> piece_of_vertex(ctx.tree_space->size(), -1);
        for (int p = 0; p < n_pieces; ++p)
            for (int v : oc.pieces[p]) piece_of_vertex[v] = p;
        for (int x = 0; x < n_pts; ++x)
            piece_of_point[x] = piece_of_vertex[ctx.orbit_map[x]];
    }
    // per-piece projection prerequisites
    std::vector<std::vector<int>> domain_pos(n_pieces);
    for (int p = 0; p < n_pieces; ++p) {
        domain_pos[p].assign(n_pts, -1);
        for (int i = 0; i < int(domains[p].size()); ++i)
            domain_pos[p][domains[p][i]] = i;
    }
    std::vector<std::vector<int>> collar_pos(collars.size());
    for (int ci = 0; ci < int(collars.size()); ++ci) {
        collar_pos[ci].assign(n_pts, -1);
        for (int i = 0; i < int(collars[ci].pts.size()); ++i)
            collar_pos[ci][collars[ci].pts[i]] = i;
    }

    out.values.resize(n_pts);
    out.provenance.resize(n_pts);
    for (int x = 0; x < n_pts; ++x) {
        int ci = collar_of[x];
        if (ci >= 0) {
            const CollarLocal& L = locals[ci];
            const simp::UniformPoint& raw = L.map.values[collar_pos[ci][x]];
            simp::UniformPoint val;
            val.complex = K;
            auto to_K = [&](int cyl_vertex) {
                if (cyl_vertex < L.cyl.domain_vertices)
                    return piece_vertex[collars[ci].p][L.fine_owner[cyl_vertex]];
                return L.coarse_vertex[cyl_vertex - L.cyl.domain_vertices];
            };
            for (const auto& [v, cc] : raw.coords) {
                auto [it, fresh] = val.coords.emplace(to_K(v), cc);
                if (!fresh) it->second += cc;
            }
            out.values[x] = val;
            out.provenance[x] = "collar" + std::to_string(ci);
        } else {
            int p = piece_of_point[x];
            int local = domain_pos[p][x];
            if (local < 0) throw std::logic_error("piece point outside its own domain");
            simp::UniformPoint pv =
                simp::canonical_projection(stabs[p].fine, nerves[p], local);
            simp::UniformPoint val;
            val.complex = K;
            for (const auto& [v, cc] : pv.coords)
                val.coords[piece_vertex[p][v]] = cc;
            out.values[x] = val;
            out.provenance[x] = "piece" + std::to_string(p);
        }
        std::string why;
        if (!out.values[x].valid(&why))
            throw VerificationError("psi value invalid at point " +
                                    ball->label(x) + ": " + why);
    }

    simp::PairScanReport rep;
    bool ok = simp::verify_lipschitz_uniform(*ball, out.values, params.epsilon, &rep);
    out.sampled_lipschitz = rep.max_ratio;
    out.lipschitz_within_eps = ok;
    if (!ok && !params.relax_hypotheses)
        throw VerificationError("psi is not eps-Lipschitz (sampled constant " +
                                std::to_string(rep.max_ratio) + ")");

    // coboundedness of psi over maximal simplices of K
    out.cobound = Rat(0);
    {
        std::map<simp::Simplex, PointSet> groups;
        for (int x = 0; x < n_pts; ++x) groups[out.values[x].support()].push_back(x);
        for (auto& [sig, pts] : groups)
            out.cobound = max(out.cobound, covers::set_diameter(*ball, pts));
    }
    return out;
}

PipelineResult ball_cover_pipeline(const ActionContext& ctx, i64 d,
                                   std::optional<PipelineParams> override_params) {
    PipelineResult res;
    int k = ctx.stabilizer_dim;
    int dimK = k + 1;

    PipelineParams params;
    if (override_params) {
        params = *override_params;
        simp::CnEstimate cn = simp::estimate_cn(std::min(k, 3));
        res.c_k_ceiling = i64(std::ceil(cn.value));
        res.nu_threshold = simp::min_lebesgue_for_lipschitz(
            params.epsilon / Rat(4 * res.c_k_ceiling), k);
    } else {
        // star-depth of any point of a complex of dimension <= dimK is at
        // least 1/(dimK+1) (its largest coordinate), so eps below
        // 1/((dimK+1)*d) forces pullback Lebesgue number > d.
        params.epsilon = Rat(1, (i64(dimK) + 1) * d + 1);
        simp::CnEstimate cn = simp::estimate_cn(std::min(k, 3));
        i64 ck = i64(std::ceil(cn.value));
        Rat nu = simp::min_lebesgue_for_lipschitz(params.epsilon / Rat(4 * ck), k);
        Rat r_min = max(nu, Rat(8) / params.epsilon);
        params.r = r_min.num() / r_min.den() + 1;
        params.separation = 4 * ctx.lambda * params.r;
        res.c_k_ceiling = ck;
        res.nu_threshold = nu;
    }
    res.epsilon = params.epsilon;
    res.r = params.r;
    res.separation = params.separation > 0 ? params.separation
                                           : 4 * ctx.lambda * params.r;

    GluedMap psi = build_glued_map(ctx, params);
    res.collars = psi.collar_count;
    res.psi_lipschitz = psi.sampled_lipschitz;
    res.exact_boundary_checks = psi.exact_boundary_checks;
    res.boundary_exact = psi.boundary_exact;
    res.hypothesis_violations = psi.hypothesis_violations;
    if (psi.dimension > dimK)
        throw VerificationError("glued complex dimension " +
                                std::to_string(psi.dimension) + " exceeds " +
                                std::to_string(dimK));

    simp::StarPullback pb = simp::pullback_star_cover(ctx.group_space, psi.values);
    res.cover = pb.cover;
    res.attrs = covers::attributes(res.cover);
    res.pieces = int(res.cover.sets.size());
    res.degenerate = psi.collar_count == 0;

    std::string why;
    if (!res.attrs.covers)
        throw VerificationError("pullback star cover misses points");
    if (res.attrs.multiplicity > dimK + 1)
        throw VerificationError("pullback multiplicity " +
                                std::to_string(res.attrs.multiplicity) +
                                " exceeds n+2 = " + std::to_string(dimK + 1));
    if (!(res.attrs.lebesgue > Rat(d)))
        throw VerificationError("pullback Lebesgue number " +
                                res.attrs.lebesgue.str() + " is not > " +
                                std::to_string(d));

    std::ostringstream m;
    m << "pipeline manifest v1\n";
    m << "context: " << ctx.description << "\n";
    m << "points: " << ctx.group_space->size() << "\n";
    m << "stabilizer_dim: " << k << "\n";
    m << "target_scale_d: " << d << "\n";
    m << "epsilon: " << res.epsilon.str() << "\n";
    m << "c_k_ceiling: " << res.c_k_ceiling << "\n";
    m << "nu_threshold: " << res.nu_threshold.str() << "\n";
    m << "collar_r: " << res.r << "\n";
    m << "separation: " << res.separation << "\n";
    m << "lambda: " << ctx.lambda << "\n";
    m << "orbit_pieces+collars: " << res.pieces << " sets, " << res.collars
      << " collars\n";
    m << "psi_sampled_lipschitz: " << res.psi_lipschitz << "\n";
    m << "psi_cobound: " << psi.cobound.str() << "\n";
    m << "boundary_exact_checks: " << res.exact_boundary_checks << " exact="
      << (res.boundary_exact ? "yes" : "no") << "\n";
    m << "cover: sets=" << res.cover.sets.size()
      << " multiplicity=" << res.attrs.multiplicity
      << " bound=" << res.attrs.bound.str()
      << " lebesgue=" << res.attrs.lebesgue.str() << "\n";
    for (const auto& v : res.hypothesis_violations)
        m << "hypothesis_violation: " << v << "\n";
    m << "degenerate: " << (res.degenerate ? "yes" : "no") << "\n";
    res.manifest = m.str();
    return res;
}

} // namespace synth
} // namespace asdim
