#ifndef ASDIM_SIMPLICIAL_HPP
#define ASDIM_SIMPLICIAL_HPP

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "asdim/covers.hpp"
#include "asdim/metric.hpp"
#include "asdim/rational.hpp"

namespace asdim {
namespace simp {

using Simplex = std::vector<int>; // sorted vertex indices

// Finite simplicial complex; the vertex index order is the orientation.
class OrientedComplex {
  public:
    OrientedComplex() = default;
    explicit OrientedComplex(std::vector<std::string> vertex_labels)
        : labels_(std::move(vertex_labels)) {
        for (int v = 0; v < int(labels_.size()); ++v) simplices_.insert({v});
    }

    int vertex_count() const { return int(labels_.size()); }
    const std::string& vertex_label(int v) const { return labels_[v]; }
    int vertex_by_label(const std::string& l) const;

    // Inserts a simplex together with all of its faces.
    void add_simplex(Simplex s);
    bool has_simplex(const Simplex& s) const { return simplices_.count(s) > 0; }
    const std::set<Simplex>& simplices() const { return simplices_; }
    std::vector<Simplex> maximal_simplices() const;
    int dimension() const;

    bool well_formed(std::string* why = nullptr) const;

  private:
    std::vector<std::string> labels_;
    std::set<Simplex> simplices_;
};

using ComplexRef = std::shared_ptr<const OrientedComplex>;

// A point of the uniform realization: sparse barycentric coordinates whose
// support must be a simplex.  Vertices are orthonormal, so distances are
// l2 distances of coordinate vectors.
struct UniformPoint {
    ComplexRef complex;
    std::map<int, Rat> coords; // positive entries only

    Simplex support() const;
    bool valid(std::string* why = nullptr) const;
    static UniformPoint vertex(ComplexRef k, int v);
};

Rat uniform_dist_sq(const UniformPoint& p, const UniformPoint& q);
double uniform_dist(const UniformPoint& p, const UniformPoint& q);

struct SimplicialMap {
    ComplexRef domain;
    ComplexRef codomain;
    std::vector<int> vertex_map;

    bool simplicial(std::string* why = nullptr) const;
    Simplex image_simplex(const Simplex& s) const;
    UniformPoint push(const UniformPoint& p) const;
};

// Nerve of a cover: one vertex per set in canonical order; a subset spans a
// simplex iff the sets share a point.
ComplexRef nerve(const covers::Cover& c);

// Barycentric projection x -> (d(x, X\U) / sum_V d(x, X\V))_U; the support
// is exactly the family of sets containing x.
UniformPoint canonical_projection(const covers::Cover& c, const ComplexRef& nv,
                                  int x);

// Smallest Lebesgue number that forces the canonical projection of an
// order <= k+1 cover to be eps-Lipschitz: (2k+3)^2 / eps.
Rat min_lebesgue_for_lipschitz(const Rat& eps, int k);

// ---------------------------------------------------------------- prisms

// Triangulation of (k-simplex) x [0,1] by chains in the product order on
// vertices x {0,1}.  Vertex i of the base maps to index i (level 0) and
// k+1+i (level 1); maximal simplices are the k+1 staircase chains.
ComplexRef prism_triangulation(int k, const std::vector<std::string>& base_labels = {});

// Mapping cylinder of a simplicial map g: prisms over the simplices of the
// domain with (v,1) identified to g(v), glued with the codomain along g's
// image.  Vertices: domain copy first, then codomain.
struct MappingCylinder {
    ComplexRef complex;
    int domain_vertices = 0;   // X-copy occupies indices [0, domain_vertices)
    int codomain_vertices = 0; // Y occupies the rest
    int domain_vertex(int v) const { return v; }
    int codomain_vertex(int v) const { return domain_vertices + v; }
};

MappingCylinder mapping_cylinder(const SimplicialMap& g);

// Point of the cylinder under the quotient: (p, t) with p in the domain
// realization and t in [0,1]; t = 0 is the domain copy, t = 1 lands in the
// codomain through g.  Exact rational barycentric algebra.
UniformPoint cylinder_point(const MappingCylinder& cyl, const SimplicialMap& g,
                            const UniformPoint& p, const Rat& t);

// ------------------------------------------------------- Lipschitz checks

struct PairScanReport {
    bool exhaustive = true;
    i64 pairs = 0;
    double max_ratio = 0.0; // sup d_image / d_domain over scanned pairs
    int worst_a = -1, worst_b = -1;
};

// Exact check: image distances are uniform-metric distances; the inequality
// dist(f(x),f(y))^2 <= eps^2 dist(x,y)^2 is evaluated in rationals.
bool verify_lipschitz_uniform(const MetricSpace& domain,
                              const std::vector<UniformPoint>& image,
                              const Rat& eps, PairScanReport* report = nullptr,
                              int exhaustive_cap = 3000,
                              std::uint64_t seed = 1,
                              Exec mode = Exec::Parallel);

// Exact eps-Lipschitz check specialized to canonical projections of covers
// of integer-metric spaces: depths and normalization sums stay in 64-bit
// integers and the pair inequality is a 128-bit cross multiplication.
// Equivalent to verify_lipschitz_uniform over the projection images.
bool verify_projection_lipschitz(const covers::Cover& c, const Rat& eps,
                                 PairScanReport* report = nullptr,
                                 Exec mode = Exec::Parallel);

// Ratio estimate for a point map between metric spaces (indices into a
// codomain space).
PairScanReport estimate_lipschitz(const MetricSpace& domain,
                                  const MetricSpace& codomain,
                                  const std::vector<int>& point_map,
                                  int exhaustive_cap = 3000,
                                  std::uint64_t seed = 1,
                                  Exec mode = Exec::Parallel);

// Sampled Lipschitz constant of the uniformization of the k-prism
// (Delta^{k-1} with the uniform metric) x [0,1] with the product metric.
struct CnEstimate {
    double value = 1.0;
    int max_prism = 0;
    std::string density;
    std::vector<double> lambda; // lambda[k] for k = 1..max_prism
};

CnEstimate estimate_cn(int n, int grid = 4, int t_steps = 8);

// ------------------------------------------------------------ star covers

// Open-star cover of the image of a pointwise map into a complex: one set
// per vertex, the preimage of positive coordinate.  Empty sets dropped;
// keeps the vertex owning each cover set.
struct StarPullback {
    covers::Cover cover;
    std::vector<int> star_vertex; // cover.sets[i] is the star of this vertex
};

StarPullback pullback_star_cover(const covers::SpaceRef& domain,
                                 const std::vector<UniformPoint>& image);

// Pull back an arbitrary cover of the complex given by vertex membership:
// preimages of the input cover's sets under supports.
covers::Cover pullback_cover(const covers::SpaceRef& domain,
                             const std::vector<UniformPoint>& image,
                             const std::vector<std::vector<int>>& vertex_sets);

// -------------------------------------------------------------- gluing

struct GlueReport {
    bool ok = false;
    double eta = 0.0; // midpoint slack of integer paths
    int witness_a = -1, witness_b = -1;
    std::string diagnostic;
};

// Checks that eps-Lipschitz restrictions to N_r(A) and to W \ N_{r-1}(A)
// force f to be eps(1+eta)-Lipschitz on W, with eta the shortest-path
// midpoint slack through the boundary shell.
GlueReport glue_check(const MetricSpace& space, const covers::PointSet& A,
                      const covers::PointSet& W, const Rat& r,
                      const std::vector<UniformPoint>& f_on_W,
                      const Rat& eps);

} // namespace simp
} // namespace asdim

#endif
