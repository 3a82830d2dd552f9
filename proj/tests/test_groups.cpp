#include <doctest.h>

#include <map>

#include "asdim/groups.hpp"

using namespace asdim;
using namespace asdim::groups;

TEST_CASE("Z norms and balls") {
    ZmModel z(1);
    CHECK(z.norm({0}) == 0);       // identity
    CHECK(z.norm({5}) == 5);       // |5|
    CHECK(z.metric({2}, {7}) == 5); // translation invariance
    auto ball = z.ball(3);
    CHECK(ball.space->size() == 7); // {-3..3}
    CHECK(ball.tree.has_value());
    CHECK(ball.tree->well_formed());
}

TEST_CASE("Z^2 norm matches a BFS oracle") {
    ZmModel z2(2);
    // independent oracle: plain lattice BFS
    i64 bfs = bfs_norm(
        z2.identity(), z2.generators(),
        [&](const ZmModel::Elem& a, const ZmModel::Elem& b) {
            return z2.multiply(a, b);
        },
        ZmModel::Elem{3, 4}, 100000);
    CHECK(bfs == 7);
    CHECK(z2.norm({3, 4}) == 7);
    CHECK(z2.ball(2).space->size() == 13); // 1 + 4 + 8
}

TEST_CASE("Z^2 ball is a metric space in canonical order") {
    ZmModel z2(2);
    auto ball = z2.ball(5);
    CHECK(ball.space->check_metric_axioms());
    // canonical order: norms nondecreasing
    auto* bs = ball.space.get();
    for (int i = 1; i < bs->size(); ++i) CHECK(bs->norm(i - 1) <= bs->norm(i));
}

TEST_CASE("free group reduction, metric, ball counts") {
    FreeModel f2(2);
    auto ab = f2.parse("ab");
    auto abinv = f2.parse("aB");
    // (ab)^-1 (aB) = B b^-1... reduced to b^-2, length 2
    CHECK(f2.metric(ab, abinv) == 2);
    CHECK(f2.multiply(ab, f2.invert(ab)).empty());
    CHECK(f2.format(f2.multiply(f2.parse("abB"), f2.parse("A"))) == "1");
    auto ball = f2.ball(3);
    CHECK(ball.space->size() == 53); // 1 + 4 + 12 + 36
    CHECK(ball.tree->well_formed());
    CHECK(ball.space->check_metric_axioms());
}

TEST_CASE("word norms satisfy the norm axioms on samples") {
    FreeModel f2(2);
    auto ball = f2.ball(4);
    auto& s = *ball.space;
    for (int i = 0; i < s.size(); i += 7)
        for (int j = 0; j < s.size(); j += 11)
            for (int k = 0; k < s.size(); k += 13) {
                CHECK(s.dist(i, k) <= s.dist(i, j) + s.dist(j, k));
                CHECK(s.dist(i, j) == s.dist(j, i));
            }
}

TEST_CASE("finite table model: cyclic group of order 4") {
    // Z/4 with generator g and its inverse
    std::vector<std::string> names{"e", "g", "g2", "g3"};
    std::vector<int> table;
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) table.push_back((a + b) % 4);
    FiniteTableModel m(names, table, 0, {1, 3});
    CHECK(m.check_axioms());
    CHECK(m.norm(0) == 0);
    CHECK(m.norm(1) == 1);
    CHECK(m.norm(2) == 2);
    CHECK(m.norm(3) == 1); // g3 = g^-1
    auto ball = m.ball(1);
    CHECK(ball.space->size() == 3);
}

TEST_CASE("custom generating sets stay bi-Lipschitz to the standard one") {
    ZmModel std_z(1);
    ZmModel wide_z(1, {{2}, {-2}, {3}, {-3}});
    // identity map between balls: distances compare within the max
    // cross-norm of the generators (here 3 and 2)
    i64 cross_a = std_z.norm({2}), cross_b = wide_z.norm({1}, 1000);
    CHECK(cross_a == 2);
    CHECK(cross_b == 2); // 1 = 3 - 2 needs two generators
    for (i64 v = -9; v <= 9; ++v) {
        i64 a = std_z.norm({v});
        i64 b = wide_z.norm({v}, 100000);
        CHECK(b <= cross_a * a);
        CHECK(a <= 3 * b);
    }
}

TEST_CASE("ball enumeration respects the element cap") {
    FreeModel f3(3);
    CHECK_THROWS_AS(f3.ball(10, 1000), BudgetExceeded);
}
