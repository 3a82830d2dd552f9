#ifndef ASDIM_SYNTH_HPP
#define ASDIM_SYNTH_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asdim/cover_search.hpp"
#include "asdim/covers.hpp"
#include "asdim/gog.hpp"
#include "asdim/simplicial.hpp"

namespace asdim {
namespace synth {

// A group ball acting on a tree ball through the orbit map g -> g(x0).
struct ActionContext {
    covers::SpaceRef group_space;
    covers::SpaceRef tree_space;
    TreeGraph tree;
    std::vector<int> orbit_map; // group point -> tree vertex
    i64 lambda = 1;             // recomputed generator displacement
    int stabilizer_dim = 0;     // k: certified dimension bound of stabilizers
    std::string description;

    // max displacement of norm-1 elements; norms must be exposed by the
    // group space (BallSpace).
    void recompute_lambda();
};

// Context builders for the two supported model shapes.
ActionContext context_from_tree_ball(const groups::CayleyBall& ball,
                                     int stabilizer_dim,
                                     const std::string& description);
ActionContext context_from_gog(const gog::GraphOfGroups& g, i64 budget,
                               i64 tree_coeff_budget, int stabilizer_dim,
                               i64 cap = groups::kDefaultElementCap);

struct PipelineParams {
    Rat epsilon;
    i64 r = 1;          // collar radius
    i64 rho = 0;        // interpolation width, defaults to r
    i64 separation = 0; // orbit-cover scale, defaults to 4*lambda*r
    bool relax_hypotheses = false;
    bool structured_stabilizers = false; // search for genuine multi-set covers
    std::uint64_t seed = 1;
};

struct OrbitCoverData {
    std::vector<covers::PointSet> pieces; // tree points, restricted to the orbit
    std::vector<int> family_of;
    std::vector<int> center;               // x_W per piece
    std::vector<covers::PointSet> enlarged; // lambda*r enlargement on the orbit
    int enlarged_multiplicity = 0;
    i64 uniform_radius = 0; // R with N_{lambda r}(W) inside B_R(x_W)
};

// Two-family orbit cover from the tree construction; multiplicity of the
// lambda*r enlargement is recomputed and must stay <= 2.
OrbitCoverData orbit_cover(const ActionContext& ctx, i64 separation, i64 r,
                           bool relax);

struct StabilizerCovers {
    std::vector<int> domain; // group-ball indices of W_R(x_W)
    covers::Cover fine;      // V: L > max(r, nu)
    covers::Cover coarse;    // U: L > b(V)
    Rat fine_bound;          // recomputed b(V) when finite sets are built
    bool degenerate = false; // single-set covers
};

StabilizerCovers stabilizer_covers(const ActionContext& ctx,
                                   const covers::PointSet& domain,
                                   const Rat& level_fine, const Rat& level_coarse,
                                   int k, bool structured);

// Vertex map V -> smallest U containing it; fails when L(U) <= b(V) left a
// fine set uncovered.
simp::SimplicialMap nerve_refinement_map(const covers::Cover& fine,
                                         const covers::Cover& coarse,
                                         const simp::ComplexRef& nerve_fine,
                                         const simp::ComplexRef& nerve_coarse);

struct CollarMap {
    std::vector<int> points; // group-ball indices of N_r(A)
    std::vector<simp::UniformPoint> values;
    std::vector<int> branch; // 1 = cylinder side, 2 = nerve combination
    i64 exact_boundary_checks = 0;
    bool boundary_exact = true;
    double sampled_lipschitz = 0.0;
    Rat cobound; // max diameter of a subcylinder preimage
};

// The collar interpolation into a mapping cylinder: p_U on A, the cylinder
// base on the outer boundary, linear interpolation through g in between.
// All three boundary/agreement conditions are checked in exact rationals.
CollarMap collar_cylinder_map(const covers::SpaceRef& ball,
                              const covers::PointSet& A,
                              const covers::PointSet& collar, i64 rho,
                              const covers::Cover& fine_restricted,
                              const covers::Cover& coarse_restricted,
                              const simp::ComplexRef& nerve_fine,
                              const simp::ComplexRef& nerve_coarse,
                              const simp::SimplicialMap& g,
                              const simp::MappingCylinder& cyl,
                              const Rat& eps);

struct GluedMap {
    simp::ComplexRef target;                 // K
    std::vector<simp::UniformPoint> values;  // per group-ball point
    std::vector<std::string> provenance;     // piece / collar tags
    int dimension = 0;
    double sampled_lipschitz = 0.0;
    bool lipschitz_within_eps = false;
    Rat cobound;
    i64 exact_boundary_checks = 0;
    bool boundary_exact = true;
    int collar_count = 0;
    std::vector<std::string> hypothesis_violations;
};

GluedMap build_glued_map(const ActionContext& ctx, const PipelineParams& params);

struct PipelineResult {
    covers::Cover cover;
    covers::CoverAttributes attrs;
    int pieces = 0;
    int collars = 0;
    bool degenerate = false;
    Rat epsilon;
    i64 r = 0;
    i64 separation = 0;
    i64 c_k_ceiling = 0;
    Rat nu_threshold;
    double psi_lipschitz = 0.0;
    i64 exact_boundary_checks = 0;
    bool boundary_exact = true;
    std::vector<std::string> hypothesis_violations;
    std::string manifest;
};

// End-to-end: derive scales from the requested d, build psi, pull back the
// open-star cover and re-verify multiplicity / coverage / Lebesgue number
// with the independent cover checkers.
PipelineResult ball_cover_pipeline(const ActionContext& ctx, i64 d,
                                   std::optional<PipelineParams> override_params =
                                       std::nullopt);

} // namespace synth
} // namespace asdim

#endif
