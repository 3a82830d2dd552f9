#include <doctest.h>

#include "asdim/io.hpp"
#include "asdim/synth.hpp"

using namespace asdim;
using namespace asdim::synth;

TEST_CASE("action context from a free-group ball") {
    groups::FreeModel f2(2);
    auto ball = f2.ball(6);
    auto ctx = context_from_tree_ball(ball, 0, "F2 ball 6");
    CHECK(ctx.lambda == 1);
    CHECK(ctx.group_space->size() == ctx.tree_space->size());
}

TEST_CASE("orbit cover: multiplicity 2 after enlargement on F2") {
    groups::FreeModel f2(2);
    auto ball = f2.ball(8);
    auto ctx = context_from_tree_ball(ball, 0, "F2 ball 8");
    auto oc = orbit_cover(ctx, 4, 1, false);
    CHECK(oc.enlarged_multiplicity <= 2);
    CHECK(oc.pieces.size() >= 2);
    // pieces partition the orbit
    size_t total = 0;
    for (auto& p : oc.pieces) total += p.size();
    CHECK(total == size_t(ctx.tree_space->size()));
    // separation below 4*lambda*r is rejected in strict mode
    CHECK_THROWS_AS(orbit_cover(ctx, 3, 1, false), PreconditionError);
}

TEST_CASE("degenerate stabilizer covers always verify") {
    groups::FreeModel f2(2);
    auto ball = f2.ball(5);
    auto ctx = context_from_tree_ball(ball, 0, "F2 ball 5");
    covers::PointSet all(ctx.group_space->size());
    for (int i = 0; i < ctx.group_space->size(); ++i) all[i] = i;
    auto sc = stabilizer_covers(ctx, all, Rat(100), Rat(0), 0, false);
    CHECK(sc.degenerate);
    auto attrs = covers::attributes(sc.fine);
    CHECK(attrs.multiplicity == 1);
    CHECK(attrs.lebesgue.is_infinite());
}

TEST_CASE("nerve refinement maps fine sets into containing coarse sets") {
    groups::ZmModel z(1);
    auto ball = z.ball(20);
    auto space = ball.space;
    std::map<i64, int> pos;
    for (int i = 0; i < space->size(); ++i) pos[std::stoll(space->label(i))] = i;
    auto interval = [&](i64 a, i64 b) {
        covers::PointSet s;
        for (i64 v = a; v <= b; ++v)
            if (pos.count(v)) s.push_back(pos[v]);
        std::sort(s.begin(), s.end());
        return s;
    };
    covers::Cover fine{space, {interval(-20, -6), interval(-8, 8), interval(6, 20)}, true};
    covers::Cover coarse{space, {interval(-20, 9), interval(-9, 20)}, true};
    auto nf = simp::nerve(fine);
    auto nc = simp::nerve(coarse);
    auto g = nerve_refinement_map(fine, coarse, nf, nc);
    CHECK(g.vertex_map == std::vector<int>{0, 0, 1});
    // an uncontainable fine set raises containment-failure
    covers::Cover too_coarse{space, {interval(-20, 0), interval(1, 20)}, true};
    auto ntc = simp::nerve(too_coarse);
    CHECK_THROWS_AS(nerve_refinement_map(fine, too_coarse, nf, ntc),
                    PreconditionError);
}

TEST_CASE("pipeline on the free group: degenerate scales verify") {
    groups::FreeModel f2(2);
    auto ball = f2.ball(8);
    auto ctx = context_from_tree_ball(ball, 0, "F2 ball 8");
    auto res = ball_cover_pipeline(ctx, 4);
    CHECK(res.attrs.covers);
    CHECK(res.attrs.multiplicity <= 2);
    CHECK(res.attrs.lebesgue > Rat(4));
    CHECK(res.degenerate); // the ball is far smaller than the derived scales
    CHECK(res.manifest.find("pipeline manifest v1") == 0);
}

TEST_CASE("pipeline with explicit small scales exercises the collar maps") {
    groups::ZmModel z(1);
    auto ball = z.ball(30);
    auto ctx = context_from_tree_ball(ball, 0, "Z ball 30");
    PipelineParams p;
    p.epsilon = Rat(2);
    p.r = 2;
    p.separation = 8;
    p.relax_hypotheses = true;
    auto res = ball_cover_pipeline(ctx, 0, p);
    CHECK(res.collars > 0);
    CHECK(res.exact_boundary_checks > 0);
    CHECK(res.boundary_exact);
    CHECK_FALSE(res.hypothesis_violations.empty());
    CHECK(res.attrs.covers);
    CHECK(res.attrs.multiplicity <= 2);
}

TEST_CASE("pipeline determinism: identical manifests on identical input") {
    groups::FreeModel f2(2);
    auto ball = f2.ball(6);
    auto ctx = context_from_tree_ball(ball, 0, "F2 ball 6");
    auto a = ball_cover_pipeline(ctx, 3);
    auto b = ball_cover_pipeline(ctx, 3);
    CHECK(a.manifest == b.manifest);
}

TEST_CASE("pipeline on the Klein-bottle amalgam ball") {
    auto g = io::builtin_gog("klein-bottle");
    auto ctx = context_from_gog(*g, 12, 6, 1);
    CHECK(ctx.lambda == 1);
    auto res = ball_cover_pipeline(ctx, 3);
    CHECK(res.attrs.covers);
    CHECK(res.attrs.multiplicity <= 3);
    CHECK(res.attrs.lebesgue > Rat(3));
}
