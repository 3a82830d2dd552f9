#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "asdim/groups.hpp"
#include "asdim/simplicial.hpp"

using namespace asdim;
using namespace asdim::simp;

namespace {

covers::SpaceRef z_seg(i64 lo, i64 hi, std::map<i64, int>* pos_out = nullptr) {
    std::vector<std::string> labels;
    std::vector<Rat> m;
    std::vector<i64> vals;
    for (i64 v = lo; v <= hi; ++v) vals.push_back(v);
    for (size_t i = 0; i < vals.size(); ++i) {
        labels.push_back(std::to_string(vals[i]));
        for (size_t j = 0; j < i; ++j) m.push_back(Rat(vals[i] - vals[j]));
    }
    if (pos_out)
        for (size_t i = 0; i < vals.size(); ++i) (*pos_out)[vals[i]] = int(i);
    return std::make_shared<DenseSpace>(labels, m);
}

covers::PointSet iv(const std::map<i64, int>& pos, i64 a, i64 b) {
    covers::PointSet s;
    for (i64 v = a; v <= b; ++v)
        if (pos.count(v)) s.push_back(pos.at(v));
    return s;
}

ComplexRef full_simplex(int n) {
    std::vector<std::string> labels;
    for (int i = 0; i < n; ++i) labels.push_back("v" + std::to_string(i));
    auto k = std::make_shared<OrientedComplex>(labels);
    Simplex all;
    for (int i = 0; i < n; ++i) all.push_back(i);
    k->add_simplex(all);
    return k;
}

} // namespace

TEST_CASE("uniform metric basics") {
    auto tri = full_simplex(3);
    auto a = UniformPoint::vertex(tri, 0);
    auto b = UniformPoint::vertex(tri, 1);
    CHECK(uniform_dist_sq(a, a) == Rat(0));
    CHECK(uniform_dist_sq(a, b) == Rat(2)); // orthonormal vertices
    UniformPoint mid;
    mid.complex = tri;
    mid.coords[0] = Rat(1, 2);
    mid.coords[1] = Rat(1, 2);
    CHECK(mid.valid());
    CHECK(uniform_dist_sq(mid, a) == Rat(1, 2)); // sqrt(2)/2
}

TEST_CASE("nerve reflects intersection patterns") {
    std::map<i64, int> pos;
    auto s = z_seg(0, 10, &pos);
    covers::Cover disjoint{s, {iv(pos, 0, 3), iv(pos, 6, 10)}, false};
    auto n1 = nerve(disjoint);
    CHECK(n1->vertex_count() == 2);
    CHECK_FALSE(n1->has_simplex({0, 1}));

    covers::Cover overlapping{s, {iv(pos, 0, 6), iv(pos, 4, 10)}, true};
    auto n2 = nerve(overlapping);
    CHECK(n2->has_simplex({0, 1}));

    // interval cover of multiplicity 2 gives a path graph
    covers::Cover path{s,
                       {iv(pos, 0, 3), iv(pos, 3, 6), iv(pos, 6, 10)},
                       true};
    auto n3 = nerve(path);
    CHECK(n3->has_simplex({0, 1}));
    CHECK(n3->has_simplex({1, 2}));
    CHECK_FALSE(n3->has_simplex({0, 2}));
    CHECK(n3->dimension() == 1);
}

TEST_CASE("canonical projection: deep point, tie point, spec instance") {
    std::map<i64, int> pos;
    auto s = z_seg(0, 10, &pos);
    covers::Cover c{s, {iv(pos, 0, 6), iv(pos, 4, 10)}, true};
    auto nv = nerve(c);

    auto deep = canonical_projection(c, nv, pos.at(1)); // only in U0
    CHECK(deep.coords.size() == 1);
    CHECK(deep.coords.at(0) == Rat(1));

    // x = 5: depths d(5, [7,10]) = 2 and d(5, [0,3]) = 2
    auto tie = canonical_projection(c, nv, pos.at(5));
    CHECK(tie.coords.at(0) == Rat(1, 2));
    CHECK(tie.coords.at(1) == Rat(1, 2));
    CHECK(tie.valid());

    // a cover with an uncovered point has a zero denominator there
    covers::Cover partial{s, {iv(pos, 0, 4)}, false};
    auto pn = nerve(partial);
    CHECK_THROWS(canonical_projection(partial, pn, pos.at(9)));
}

TEST_CASE("Lebesgue threshold formula") {
    CHECK(min_lebesgue_for_lipschitz(Rat(1), 0) == Rat(9));
    CHECK(min_lebesgue_for_lipschitz(Rat(9), 0) == Rat(1));
    CHECK(min_lebesgue_for_lipschitz(Rat(1, 2), 1) == Rat(50));
}

TEST_CASE("prism triangulation counts") {
    for (int k = 0; k <= 5; ++k) {
        auto p = prism_triangulation(k);
        CHECK(p->vertex_count() == 2 * (k + 1));
        auto maximal = p->maximal_simplices();
        CHECK(int(maximal.size()) == k + 1); // staircase chains
        for (const auto& s : maximal) CHECK(int(s.size()) == k + 2);
        CHECK(p->well_formed());
        // all vertices are used by the maximal simplices
        std::set<int> used;
        for (const auto& s : maximal) used.insert(s.begin(), s.end());
        CHECK(int(used.size()) == 2 * (k + 1));
    }
}

TEST_CASE("mapping cylinders: edge cases from small maps") {
    // identity on a vertex: a single edge
    auto v1 = full_simplex(1);
    SimplicialMap idv{v1, v1, {0}};
    auto c1 = mapping_cylinder(idv);
    CHECK(c1.complex->vertex_count() == 2);
    CHECK(c1.complex->dimension() == 1);

    // edge collapsed to a vertex: 3 vertices, structurally valid
    auto e = full_simplex(2);
    auto v = full_simplex(1);
    SimplicialMap collapse{e, v, {0, 0}};
    auto c2 = mapping_cylinder(collapse);
    CHECK(c2.complex->vertex_count() == 3);
    CHECK(c2.complex->well_formed());

    // identity on an edge: the square prism, 4 vertices, 2 triangles
    SimplicialMap ide{e, e, {0, 1}};
    auto c3 = mapping_cylinder(ide);
    CHECK(c3.complex->vertex_count() == 4);
    int triangles = 0;
    for (const auto& s : c3.complex->simplices())
        if (s.size() == 3) ++triangles;
    CHECK(triangles == 2);
}

TEST_CASE("cylinder points: ends, interior, validity") {
    auto e = full_simplex(2);
    SimplicialMap ide{e, e, {0, 1}};
    auto cyl = mapping_cylinder(ide);

    auto v0 = UniformPoint::vertex(e, 0);
    auto at0 = cylinder_point(cyl, ide, v0, Rat(0));
    CHECK(at0.coords.size() == 1);
    CHECK(at0.coords.count(cyl.domain_vertex(0)) == 1);
    auto at1 = cylinder_point(cyl, ide, v0, Rat(1));
    CHECK(at1.coords.count(cyl.codomain_vertex(0)) == 1);

    UniformPoint mid;
    mid.complex = e;
    mid.coords[0] = Rat(1, 2);
    mid.coords[1] = Rat(1, 2);
    auto inner = cylinder_point(cyl, ide, mid, Rat(1, 2));
    CHECK(inner.valid());
    Rat sum(0);
    for (auto& [v, c] : inner.coords) sum += c;
    CHECK(sum == Rat(1));

    // collapsing map: coordinates add at the identified vertex
    auto vv = full_simplex(1);
    SimplicialMap collapse{e, vv, {0, 0}};
    auto ccyl = mapping_cylinder(collapse);
    auto top = cylinder_point(ccyl, collapse, mid, Rat(1));
    CHECK(top.coords.size() == 1);
    CHECK(top.coords.at(ccyl.codomain_vertex(0)) == Rat(1));
}

TEST_CASE("cylinder quotient is within the sampled prism constant") {
    auto e = full_simplex(2);
    SimplicialMap ide{e, e, {0, 1}};
    auto cyl = mapping_cylinder(ide);
    auto cn = estimate_cn(0, 6, 6);
    // dense-ish sample of the square
    std::vector<UniformPoint> pts;
    std::vector<std::pair<UniformPoint, Rat>> raw;
    for (int a = 0; a <= 6; ++a)
        for (int t = 0; t <= 6; ++t) {
            UniformPoint p;
            p.complex = e;
            if (a > 0) p.coords[0] = Rat(a, 6);
            if (a < 6) p.coords[1] = Rat(6 - a, 6);
            raw.push_back({p, Rat(t, 6)});
            pts.push_back(cylinder_point(cyl, ide, p, Rat(t, 6)));
        }
    double worst = 0;
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) {
            double dom = std::sqrt(
                uniform_dist_sq(raw[i].first, raw[j].first).to_double() +
                (raw[i].second - raw[j].second).squared().to_double());
            if (dom == 0) continue;
            double img = uniform_dist(pts[i], pts[j]);
            worst = std::max(worst, img / dom);
        }
    CHECK(worst <= cn.value * 1.0001);
}

TEST_CASE("prism constants: sane, monotone, above 1") {
    auto c0 = estimate_cn(0, 3, 6);
    CHECK(c0.value >= 1.0);
    CHECK(c0.lambda[1] >= 1.41); // the 1-prism stretches by sqrt(2)
    auto c1 = estimate_cn(1, 3, 6);
    CHECK(c1.value >= c0.value); // max over more prisms
}

TEST_CASE("star pullbacks: stars of the projection recover the cover") {
    std::map<i64, int> pos;
    auto s = z_seg(0, 10, &pos);
    covers::Cover c{s, {iv(pos, 0, 6), iv(pos, 4, 10)}, true};
    auto nv = nerve(c);
    std::vector<UniformPoint> img;
    for (int x = 0; x < s->size(); ++x)
        img.push_back(canonical_projection(c, nv, x));
    auto pb = pullback_star_cover(s, img);
    REQUIRE(pb.cover.sets.size() == 2);
    CHECK(pb.cover.sets[0] == c.sets[0]);
    CHECK(pb.cover.sets[1] == c.sets[1]);
    CHECK(covers::multiplicity(s->size(), pb.cover.sets) == 2);

    // constant map pulls a one-set cover back to everything
    std::vector<UniformPoint> constant(s->size(), UniformPoint::vertex(nv, 0));
    auto whole = pullback_cover(s, constant, {{0, 1}});
    REQUIRE(whole.sets.size() == 1);
    CHECK(int(whole.sets[0].size()) == s->size());
}

TEST_CASE("open stars of a triangle have multiplicity 3") {
    auto tri = full_simplex(3);
    // barycentric grid sample as a pointwise map
    std::vector<UniformPoint> img;
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; a + b <= 4; ++b) {
            int c = 4 - a - b;
            UniformPoint p;
            p.complex = tri;
            if (a) p.coords[0] = Rat(a, 4);
            if (b) p.coords[1] = Rat(b, 4);
            if (c) p.coords[2] = Rat(c, 4);
            img.push_back(p);
        }
    int n = int(img.size());
    std::vector<std::string> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = "g" + std::to_string(i);
    std::vector<Rat> m;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j) m.push_back(Rat(1)); // discrete metric
    auto grid = std::make_shared<DenseSpace>(labels, m);
    auto pb = pullback_star_cover(grid, img);
    CHECK(pb.cover.sets.size() == 3);
    CHECK(covers::multiplicity(n, pb.cover.sets) == 3); // interior point
}

TEST_CASE("exact Lipschitz verification of projections") {
    std::map<i64, int> pos;
    auto s = z_seg(0, 200, &pos);
    covers::Cover c{s, {}, true};
    for (i64 lo = 0; lo <= 200; lo += 60)
        c.sets.push_back(iv(pos, lo, std::min<i64>(lo + 119, 200)));
    auto attrs = covers::attributes(c);
    REQUIRE(attrs.multiplicity <= 2);
    Rat eps(1);
    Rat nu = min_lebesgue_for_lipschitz(eps, 1);
    REQUIRE(attrs.lebesgue > nu);
    auto nv = nerve(c);
    std::vector<UniformPoint> img;
    for (int x = 0; x < s->size(); ++x)
        img.push_back(canonical_projection(c, nv, x));
    PairScanReport rep;
    CHECK(verify_lipschitz_uniform(*s, img, eps, &rep));
    CHECK(rep.exhaustive);
    CHECK(rep.max_ratio <= 1.0);
    // identity and constant maps through estimate_lipschitz
    std::vector<int> idmap(s->size());
    for (int i = 0; i < s->size(); ++i) idmap[i] = i;
    auto est = estimate_lipschitz(*s, *s, idmap);
    CHECK(est.max_ratio == doctest::Approx(1.0));
    std::vector<int> cmap(s->size(), 0);
    auto cst = estimate_lipschitz(*s, *s, cmap);
    CHECK(cst.max_ratio == 0.0);
}

TEST_CASE("specialized projection scan agrees with the generic verifier") {
    std::map<i64, int> pos;
    auto s = z_seg(0, 120, &pos);
    covers::Cover c{s, {}, true};
    for (i64 lo = 0; lo <= 120; lo += 30)
        c.sets.push_back(iv(pos, lo, std::min<i64>(lo + 59, 120)));
    auto nv = nerve(c);
    std::vector<UniformPoint> img;
    for (int x = 0; x < s->size(); ++x)
        img.push_back(canonical_projection(c, nv, x));
    for (Rat eps : {Rat(1, 8), Rat(1, 12), Rat(1, 15), Rat(1)}) {
        PairScanReport ga, gb;
        bool a = verify_lipschitz_uniform(*s, img, eps, &ga);
        bool b = verify_projection_lipschitz(c, eps, &gb);
        CHECK(a == b);
        CHECK(ga.pairs == gb.pairs);
        CHECK(ga.max_ratio == doctest::Approx(gb.max_ratio));
    }
}

TEST_CASE("glue check: constant map passes, violations carry witnesses") {
    std::map<i64, int> pos;
    auto s = z_seg(0, 20, &pos);
    covers::PointSet A = iv(pos, 9, 11);
    covers::PointSet W = iv(pos, 0, 20);
    auto tri = full_simplex(2);
    std::vector<UniformPoint> constant(W.size(), UniformPoint::vertex(tri, 0));
    auto rep = glue_check(*s, A, W, Rat(3), constant, Rat(1, 2));
    CHECK(rep.ok);

    // jump inside the neighborhood violates the restriction
    std::vector<UniformPoint> jump = constant;
    jump[10] = UniformPoint::vertex(tri, 1);
    auto bad = glue_check(*s, A, W, Rat(3), jump, Rat(1, 2));
    CHECK_FALSE(bad.ok);
    CHECK(bad.witness_a >= 0);
}
