#ifndef ASDIM_COVER_SEARCH_HPP
#define ASDIM_COVER_SEARCH_HPP

#include "asdim/covers.hpp"
#include "asdim/util.hpp"

namespace asdim {
namespace covers {

struct SearchLimits {
    i64 node_budget = 500'000'000;
    double timeout_seconds = 0; // 0 = none
    int parallel_split_depth = 12;
};

// Constructive upper bound: greedy B-diameter clustering over points in
// canonical order, then an exact (n+1)-coloring of the piece proximity
// graph.  Failure is SearchExhausted, never a refutation.
ScaleDimCertificate scale_dim_upper(const SpaceRef& space, const Rat& d,
                                    const Rat& B, int n,
                                    Exec mode = Exec::Parallel);

// Shifted-grid pieces for Z^2 balls (vertex / edge / face bands of an
// M-grid), the constructive witness used for upper(2).
ScaleDimCertificate scale_dim_upper_bricks(const SpaceRef& space,
                                           const std::vector<std::pair<i64, i64>>& coords,
                                           const Rat& d, const Rat& B, i64 M, i64 m);

// Exhaustive search over all decompositions into B-bounded d-disjoint
// pieces with n+1 colors.  A decomposition exists iff some (n+1)-coloring
// of the points has every monochromatic chain-component (pairs at distance
// < d chain) of diameter <= B, so the search branches on point colors in
// canonical order with color-introduction symmetry breaking.
ScaleDimCertificate scale_dim_refute(const SpaceRef& space, const Rat& d,
                                     const Rat& B, int n,
                                     const SearchLimits& limits = {},
                                     Exec mode = Exec::Parallel);

// Two d-disjoint families covering a rooted tree ball: depth bands of width
// 2d indexed by k, pieces grouped by the ancestor at depth 2kd - ceil(d/2),
// families by parity of k.  Diameters are reported, not assumed.
ColoredFamilies tree_cover(const SpaceRef& space, const TreeGraph& tree, i64 d);

} // namespace covers
} // namespace asdim

#endif
