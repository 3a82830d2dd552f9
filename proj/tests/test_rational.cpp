#include <doctest.h>

#include "asdim/rational.hpp"

using namespace asdim;

TEST_CASE("rational arithmetic and normalization") {
    CHECK(Rat(2, 4) == Rat(1, 2));
    CHECK(Rat(-2, -4) == Rat(1, 2));
    CHECK(Rat(2, -4) == Rat(-1, 2));
    CHECK(Rat(1, 3) + Rat(1, 6) == Rat(1, 2));
    CHECK(Rat(1, 2) * Rat(2, 3) == Rat(1, 3));
    CHECK(Rat(7) / Rat(2) == Rat(7, 2));
    CHECK(Rat(3, 2) - Rat(3, 2) == Rat(0));
    CHECK(Rat(1, 3) < Rat(1, 2));
    CHECK(Rat(-5) < Rat(-4));
    CHECK(abs(Rat(-3, 7)) == Rat(3, 7));
    CHECK(Rat(5, 3).squared() == Rat(25, 9));
}

TEST_CASE("rational parsing and formatting") {
    CHECK(Rat::parse("3/9") == Rat(1, 3));
    CHECK(Rat::parse("-4") == Rat(-4));
    CHECK(Rat(22, 7).str() == "22/7");
    CHECK(Rat(-8, 2).str() == "-4");
    CHECK_THROWS(Rat::parse("x"));
    CHECK_THROWS(Rat(1, 0));
}

TEST_CASE("overflow is an error, not a wrong value") {
    Rat big(INT64_MAX / 2, 1);
    CHECK_THROWS_AS(big * big, OverflowError);
    // near-limit sums that stay in range are exact
    CHECK(Rat(INT64_MAX - 1, 2) + Rat(1, 2) == Rat(INT64_MAX, 2));
}

TEST_CASE("extended rationals order infinity last") {
    ExtRat inf = ExtRat::infinity();
    CHECK(ExtRat(Rat(5)) < inf);
    CHECK(inf > Rat(1000000));
    CHECK(min(inf, ExtRat(Rat(3))) == ExtRat(Rat(3)));
    CHECK(max(inf, ExtRat(Rat(3))) == inf);
    CHECK(inf == ExtRat::infinity());
    CHECK(inf.str() == "inf");
}
