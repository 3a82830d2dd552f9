#ifndef ASDIM_COVERS_HPP
#define ASDIM_COVERS_HPP

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asdim/exec.hpp"
#include "asdim/metric.hpp"
#include "asdim/rational.hpp"

namespace asdim {
namespace covers {

using PointSet = std::vector<int>; // sorted point indices
using SpaceRef = std::shared_ptr<const MetricSpace>;

// A family of subsets of a space.  `covers` marks families asserted to be
// covers; partial families carry covers = false.
struct Cover {
    SpaceRef space;
    std::vector<PointSet> sets;
    bool covers = true;
};

// n+1 families of d-disjoint, B-bounded sets whose union covers the space.
struct ColoredFamilies {
    SpaceRef space;
    std::vector<std::vector<PointSet>> families;
    Rat scale_d;
    Rat bound_B;

    int colors() const { return int(families.size()); }
    Cover flatten() const;
};

// Point-to-set and set-geometry primitives.  All scans have serial and
// OpenMP variants with identical results.
ExtRat dist_to_set(const MetricSpace& s, int x, const PointSet& set);
Rat set_diameter(const MetricSpace& s, const PointSet& set,
                 Exec mode = Exec::Parallel);
ExtRat cross_distance(const MetricSpace& s, const PointSet& a, const PointSet& b,
                      Exec mode = Exec::Parallel); // min over cross pairs
PointSet complement(int space_size, const PointSet& set);
PointSet closed_neighborhood(const MetricSpace& s, const PointSet& set, const Rat& d,
                             Exec mode = Exec::Parallel);

bool is_cover(int space_size, const std::vector<PointSet>& sets);
bool d_disjoint(const MetricSpace& s, const std::vector<PointSet>& family,
                const Rat& d, Exec mode = Exec::Parallel);
int multiplicity(int space_size, const std::vector<PointSet>& sets);
int d_multiplicity(const MetricSpace& s, const std::vector<PointSet>& sets,
                   const Rat& d, Exec mode = Exec::Parallel);

// min over x (in A, or everywhere) of max over U of d(x, X \ U); the
// complement-empty convention gives +infinity.
ExtRat lebesgue_number(const MetricSpace& s, const std::vector<PointSet>& sets,
                       const PointSet* over = nullptr,
                       Exec mode = Exec::Parallel);

Rat max_diameter(const MetricSpace& s, const std::vector<PointSet>& sets,
                 Exec mode = Exec::Parallel);

Cover enlarge(const Cover& c, const Rat& d);
ColoredFamilies enlarge(const ColoredFamilies& cf, const Rat& d);

// U \ N_d(X \ U) per set; requires L(cover) >= 2d for the result to cover.
Cover shrink(const Cover& c, const Rat& d);

// Enlarges every set by d/3; the result is a cover with multiplicity
// <= n+1 and Lebesgue number > d/3.  All attributes recomputed.
struct CoverAttributes {
    Rat bound;
    bool bound_exact = true; // false: doubled eccentricity upper bound
    int multiplicity = 0;
    ExtRat lebesgue;
    bool covers = false;
};
// Sets larger than `exact_cap` get a sound upper diameter bound (twice the
// eccentricity of the first point) instead of the exact pair scan.
CoverAttributes attributes(const Cover& c, Exec mode = Exec::Parallel,
                           int exact_cap = 4000);

Cover colored_to_cover(const ColoredFamilies& cf);

// Shrinks by d, then colors the shrunk sets so sets within distance < d get
// distinct colors; greedy first, exact backtracking on failure.
ColoredFamilies cover_to_colored(const Cover& c, const Rat& d, int n_plus_1);

// Full checker for colored families: per-family d-disjointness, per-set
// diameter <= B, exact coverage.
bool verify_colored(const ColoredFamilies& cf, std::string* why = nullptr,
                    Exec mode = Exec::Parallel);

// ------------------------------------------------------------ certificates

enum class Verdict { Upper, Refuted, Unknown };

struct ScaleDimCertificate {
    Verdict verdict = Verdict::Unknown;
    int n = 0;
    Rat d;
    Rat B;
    std::uint64_t space_hash = 0;
    std::optional<ColoredFamilies> witness;
    std::string transcript; // exhaustion statistics for refutations
    std::string note;
    std::uint64_t content_hash() const;
};

// Re-runs the disjointness/diameter/coverage checks on the witness.
bool verify_certificate(const ScaleDimCertificate& cert, const SpaceRef& space,
                        std::string* why = nullptr);

// --------------------------------------------------- union-theorem checks

struct UniformCheckResult {
    bool ok = false;
    Rat common_bound;
    std::string diagnostic;
};

// True iff every witness has n+1 families, is d-disjoint per family, covers
// its space; returns the common bound R = max over all sets.
UniformCheckResult check_uniform_asdim(
    const std::vector<SpaceRef>& spaces,
    const std::vector<ColoredFamilies>& witnesses, const Rat& d, int n);

struct InfiniteUnionCheck {
    bool ok = false;
    std::string diagnostic;
};

// Hypothesis checker: (a) uniform witnesses for the pieces at scale d,
// (b) a valid certificate for Y_r, (c) r-disjointness of {F_a \ Y_r}.
// The conclusion of the union theorem is cited by callers, never re-derived.
InfiniteUnionCheck check_infinite_union_hypotheses(
    const SpaceRef& X, const std::vector<PointSet>& pieces,
    const std::vector<ColoredFamilies>& piece_witnesses, const PointSet& Y_r,
    const ScaleDimCertificate& y_cert, const Rat& r, int n, const Rat& d);

} // namespace covers
} // namespace asdim

#endif
