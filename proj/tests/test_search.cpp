#include <doctest.h>

#include "asdim/cover_search.hpp"
#include "asdim/groups.hpp"

using namespace asdim;
using namespace asdim::covers;

namespace {

SpaceRef z_ball(i64 r) { return groups::ZmModel(1).ball(r).space; }
SpaceRef z2_ball(i64 r) { return groups::ZmModel(2).ball(r).space; }

std::vector<std::pair<i64, i64>> coords_of(const MetricSpace& s) {
    std::vector<std::pair<i64, i64>> out;
    for (int i = 0; i < s.size(); ++i) {
        auto lbl = s.label(i);
        auto comma = lbl.find(',');
        out.push_back({std::stoll(lbl.substr(0, comma)),
                       std::stoll(lbl.substr(comma + 1))});
    }
    return out;
}

} // namespace

TEST_CASE("upper search: trivial and interval instances") {
    // single point
    std::vector<std::string> lbl{"p"};
    auto pt = std::make_shared<DenseSpace>(lbl, std::vector<Rat>{});
    auto cert = scale_dim_upper(pt, Rat(5), Rat(0), 0);
    CHECK(cert.verdict == Verdict::Upper);
    std::string why;
    CHECK(verify_certificate(cert, pt, &why));

    // Z ball of radius 50 with two shifted interval families
    auto z = z_ball(50);
    auto zc = scale_dim_upper(z, Rat(5), Rat(12), 1);
    CHECK(zc.verdict == Verdict::Upper);
    CHECK(verify_certificate(zc, z, &why));
}

TEST_CASE("upper search: brick wall on a Z^2 ball") {
    auto s = z2_ball(20);
    auto cert = scale_dim_upper_bricks(s, coords_of(*s), Rat(4), Rat(40), 6, 3);
    CHECK(cert.verdict == Verdict::Upper);
    std::string why;
    CHECK(verify_certificate(cert, s, &why));
    CHECK(cert.witness->families.size() == 3);
}

TEST_CASE("refuter closes trivial instances") {
    // two points at distance d-1 cannot be split into 0-bounded pieces of
    // one d-disjoint family
    std::vector<std::string> lbl{"a", "b"};
    auto two = std::make_shared<DenseSpace>(lbl, std::vector<Rat>{Rat(4)});
    auto cert = scale_dim_refute(two, Rat(5), Rat(0), 0);
    CHECK(cert.verdict == Verdict::Refuted);
    CHECK(!cert.transcript.empty());

    // one bounded d-disjoint family cannot cover a segment longer than B
    auto z = z_ball(9); // 3B with B = 6
    auto zc = scale_dim_refute(z, Rat(2), Rat(6), 0);
    CHECK(zc.verdict == Verdict::Refuted);
}

TEST_CASE("refuter finds decompositions when they exist") {
    auto z = z_ball(10);
    auto cert = scale_dim_refute(z, Rat(2), Rat(10), 1);
    CHECK(cert.verdict == Verdict::Upper);
    std::string why;
    CHECK(verify_certificate(cert, z, &why));
}

TEST_CASE("upper and refute never disagree") {
    for (i64 radius : {4, 6}) {
        auto s = z_ball(radius);
        for (i64 B : {3, 5}) {
            ScaleDimCertificate r = scale_dim_refute(s, Rat(2), Rat(B), 0);
            bool upper_ok;
            try {
                auto u = scale_dim_upper(s, Rat(2), Rat(B), 0);
                upper_ok = true;
            } catch (const SearchExhausted&) {
                upper_ok = false;
            }
            if (r.verdict == Verdict::Refuted) CHECK_FALSE(upper_ok);
            if (upper_ok) CHECK(r.verdict == Verdict::Upper);
        }
    }
}

TEST_CASE("upper witnesses are monotone in the parameters") {
    auto z = z_ball(30);
    auto cert = scale_dim_upper(z, Rat(4), Rat(10), 1);
    REQUIRE(cert.verdict == Verdict::Upper);
    // same witness at smaller scale and larger bound
    ColoredFamilies w = *cert.witness;
    w.scale_d = Rat(3);
    w.bound_B = Rat(12);
    CHECK(verify_colored(w));
}

TEST_CASE("refuter is schedule independent") {
    auto s = z2_ball(4);
    auto serial = scale_dim_refute(s, Rat(3), Rat(4), 1, {}, Exec::Serial);
    auto parallel = scale_dim_refute(s, Rat(3), Rat(4), 1, {}, Exec::Parallel);
    CHECK(serial.verdict == parallel.verdict);
    if (serial.witness && parallel.witness) {
        CHECK(serial.witness->families.size() == parallel.witness->families.size());
    }
}

TEST_CASE("tree cover: bands and parity families") {
    // single vertex
    groups::FreeModel f1(1);
    auto tiny = f1.ball(0);
    auto cf0 = tree_cover(tiny.space, *tiny.tree, 2);
    CHECK(cf0.families.size() == 2);
    CHECK(cf0.families[0].size() + cf0.families[1].size() == 1);

    // path of length 10d rooted at an end: alternating bands
    groups::ZmModel z(1);
    auto seg = z.ball(20); // line through 0; root at 0
    auto cf1 = tree_cover(seg.space, *seg.tree, 2);
    CHECK(verify_colored(cf1));
    CHECK(cf1.families.size() == 2);

    // free-group ball: both families d-disjoint, verified by the checker
    groups::FreeModel f2(2);
    auto ball = f2.ball(6);
    auto cf = tree_cover(ball.space, *ball.tree, 1);
    CHECK(cf.families.size() == 2);
    std::string why;
    CHECK(verify_colored(cf, &why));
    for (const auto& fam : cf.families)
        CHECK(d_disjoint(*ball.space, fam, Rat(1)));
}

TEST_CASE("tree cover pieces stay d-disjoint at larger scales") {
    groups::FreeModel f2(2);
    auto ball = f2.ball(8);
    for (i64 d : {2, 3, 4}) {
        auto cf = tree_cover(ball.space, *ball.tree, d);
        std::string why;
        CHECK(verify_colored(cf, &why));
    }
}
