#include <doctest.h>

#include <set>

#include "asdim/gog.hpp"
#include "asdim/io.hpp"

using namespace asdim;
using namespace asdim::gog;

namespace {

GWord word(const GraphOfGroups& g, int start, std::vector<std::string> edges,
           std::vector<std::string> coeffs) {
    GWord w;
    w.start = start;
    int at = start;
    w.coeffs.push_back(g.vertex_group(at).parse(coeffs[0]));
    for (size_t i = 0; i < edges.size(); ++i) {
        int e = g.edge_by_name(edges[i]);
        w.path.push_back(e);
        at = g.edge(e).to;
        w.coeffs.push_back(g.vertex_group(at).parse(coeffs[i + 1]));
    }
    return w;
}

} // namespace

TEST_CASE("amalgam pinches: y (image) y- collapses to the other image") {
    auto g = io::builtin_gog("klein-bottle");
    REQUIRE(g->validate());
    // y z^4 y- = x^4 (z^4 is the image of c^2 under doubling)
    GWord w = word(*g, 0, {"y", "y-"}, {"0", "4", "0"});
    CHECK_FALSE(g->is_reduced(w));
    GWord r = g->reduce(w);
    CHECK(r.length() == 0);
    CHECK(g->vertex_group(0).format(r.coeffs[0]) == "4");
    // odd powers are outside the edge image, so the word is reduced
    GWord odd = word(*g, 0, {"y", "y-"}, {"0", "3", "0"});
    CHECK(g->is_reduced(odd));
    CHECK(g->reduce(odd).length() == 2);
    // the empty word is reduced
    CHECK(g->is_reduced(g->identity_word(0)));
}

TEST_CASE("type-1 shuttling: x^2 y equals y z^2") {
    auto g = io::builtin_gog("klein-bottle");
    GWord a = word(*g, 0, {"y"}, {"2", "0"});
    GWord b = word(*g, 0, {"y"}, {"0", "2"});
    CHECK(g->equal(a, b));
    CHECK_FALSE(g->equal(a, word(*g, 0, {"y"}, {"1", "0"})));
    // canonical forms agree verbatim
    CHECK(g->format(g->canonical(a)) == g->format(g->canonical(b)));
}

TEST_CASE("multiplication and inversion") {
    auto g = io::builtin_gog("klein-bottle");
    GWord w = word(*g, 0, {"y"}, {"1", "1"});
    GWord winv = g->inv(w);
    GWord prod = g->mul(w, winv);
    CHECK(prod.length() == 0);
    CHECK(g->vertex_group(0).is_identity(prod.coeffs[0]));
    // multiplying by the identity changes nothing
    GWord e = g->identity_word(1); // endpoint of w is Q
    CHECK(g->equal(g->mul(w, e), w));
    // a pinch product drops to length 0
    GWord left = word(*g, 0, {"y"}, {"0", "4"});
    GWord right = word(*g, 1, {"y-"}, {"0", "0"});
    CHECK(g->mul(left, right).length() == 0);
}

TEST_CASE("reduction is confluent on sampled triples") {
    auto g = io::builtin_gog("klein-bottle");
    auto ball = g->k_ball(5);
    // associativity through canonical forms
    for (size_t i = 0; i < ball.words.size(); i += 17)
        for (size_t j = 0; j < ball.words.size(); j += 23) {
            const GWord& a = ball.words[i];
            const GWord& b = ball.words[j];
            if (g->endpoint(a) != b.start) continue;
            for (size_t k = 0; k < ball.words.size(); k += 29) {
                const GWord& c = ball.words[k];
                if (g->endpoint(b) != c.start) continue;
                CHECK(g->equal(g->mul(g->mul(a, b), c), g->mul(a, g->mul(b, c))));
            }
        }
}

TEST_CASE("norms: BFS layers equal the reduced-form norm for the amalgam") {
    auto g = io::builtin_gog("klein-bottle");
    CHECK(g->norm_formula_exact());
    auto ball = g->k_ball(6);
    for (size_t i = 0; i < ball.words.size(); ++i)
        CHECK(g->reduced_form_norm(ball.words[i]) == ball.norms[i]);
    // identity is the only norm-0 word; single edge costs 1
    CHECK(ball.norms[0] == 0);
    CHECK(g->reduced_form_norm(word(*g, 0, {"y"}, {"0", "0"})) == 1);
}

TEST_CASE("HNN doubling rescales norms, the formula mode says so") {
    auto g = io::builtin_gog("bs12");
    CHECK_FALSE(g->norm_formula_exact());
    auto ball = g->k_ball(7);
    // x^6 admits the shorter spelling through a conjugation
    GWord x6 = word(*g, 0, {}, {"6"});
    auto it = ball.index.find(g->format(g->canonical(x6)));
    REQUIRE(it != ball.index.end());
    CHECK(ball.norms[it->second] == 5); // y x^3 y^-1
    CHECK(g->reduced_form_norm(x6) == 6);
    // norm minimization moves doubled halves across the stable letter
    GWord w = word(*g, 0, {"y"}, {"8", "0"});
    CHECK(g->reduced_form_norm(w) == 5); // becomes y x^4
}

TEST_CASE("pi1 membership is path closure") {
    auto g = io::builtin_gog("klein-bottle");
    CHECK(g->pi1_membership(word(*g, 0, {}, {"3"})));
    CHECK_FALSE(g->pi1_membership(word(*g, 0, {"y"}, {"0", "0"})));
    CHECK(g->pi1_membership(word(*g, 0, {"y", "y-"}, {"0", "1", "0"})));
    auto hnn = io::builtin_gog("bs12");
    CHECK(hnn->pi1_membership(word(*hnn, 0, {"y"}, {"0", "0"}))); // one vertex
}

TEST_CASE("quotient by tree edges and the lift back") {
    auto g = io::builtin_gog("klein-bottle");
    // closed words: lift(project(w)) equals w
    auto ball = g->k_ball(6, 100000, true);
    int checked = 0;
    for (const auto& w : ball.words) {
        auto q = g->project_to_pi1_tree(w);
        CHECK(g->equal(g->lift_from_pi1_tree(q), w));
        ++checked;
    }
    CHECK(checked > 10);
    // amalgam words project to alternating vertex-group letters
    GWord w = word(*g, 0, {"y", "y-"}, {"1", "1", "1"});
    auto q = g->project_to_pi1_tree(w);
    CHECK(g->format_quotient(q) == "P:1*Q:1*P:1");
    // HNN: the stable letter survives in the quotient
    auto hnn = io::builtin_gog("bs12");
    auto qh = hnn->project_to_pi1_tree(word(*hnn, 0, {"y"}, {"1", "0"}));
    CHECK(hnn->format_quotient(qh) == "P:1*g[y]");
}

TEST_CASE("Bass-Serre tree balls: amalgam line, HNN trident") {
    auto kb = io::builtin_gog("klein-bottle");
    auto t0 = kb->tree_ball(0, 4);
    CHECK(t0.reps.size() == 1);
    auto t1 = kb->tree_ball(1, 4);
    CHECK(t1.reps.size() == 1 + 2); // index-2 image on each side
    auto t3 = kb->tree_ball(3, 4);
    CHECK(t3.tree.well_formed());
    // the Klein-bottle tree is a line: every ball has 2 ends
    int leaves = 0;
    std::set<int> parents(t3.tree.parent.begin(), t3.tree.parent.end());
    for (int v = 0; v < t3.tree.size(); ++v)
        if (!parents.count(v)) ++leaves;
    CHECK(t3.reps.size() == 7);
    CHECK(leaves == 2);

    auto bs = io::builtin_gog("bs12");
    auto b1 = bs->tree_ball(1, 4);
    CHECK(b1.reps.size() == 1 + 3); // 2 + 1 coset directions
    auto b3 = bs->tree_ball(3, 6);
    CHECK(b3.tree.well_formed());

    auto zz = io::builtin_gog("zz-free-product");
    auto z2 = zz->tree_ball(2, 2);
    // trivial edge group: one coset per vertex-group element with norm <= 2
    CHECK(z2.tree.well_formed());
    CHECK(z2.tree.depth.back() == 2);
}

TEST_CASE("left action by enumerated elements preserves adjacency") {
    auto g = io::builtin_gog("klein-bottle");
    auto tb = g->tree_ball(4, 6);
    auto ball = g->k_ball(3, 100000, true);
    for (const auto& w : ball.words) {
        // the action maps edges to edges wherever both endpoints stay inside
        for (int v = 1; v < std::min<int>(tb.tree.size(), 20); ++v) {
            int pv = tb.tree.parent[v];
            try {
                GWord img_v = g->mul(w, tb.reps[v]);
                GWord img_p = g->mul(w, tb.reps[pv]);
                int iv_idx = tb.locate(*g, img_v);
                int ip_idx = tb.locate(*g, img_p);
                CHECK(tb.tree.tree_dist(iv_idx, ip_idx) == 1);
            } catch (const BudgetExceeded&) {
                // outside the enumerated ball: fine
            }
        }
    }
}

TEST_CASE("stabilizers: path length bounds and strata decomposition") {
    auto g = io::builtin_gog("klein-bottle");
    // R = 0: exactly the base vertex group elements within budget
    auto w0 = g->r_stabilizer(0, 4);
    for (const auto& w : w0) CHECK(w.length() == 0);
    CHECK(w0.size() == 9); // x^-4 .. x^4
    // W_R is the union of the strata
    auto wr = g->r_stabilizer(2, 6);
    size_t total = 0;
    for (i64 k = 0; k <= 2; ++k) total += g->h_stratum(k, 6).size();
    CHECK(wr.size() == total);
    // a reduced word with l(c) = R+1 is excluded and displaces the root by R+1
    auto tb = g->tree_ball(6, 8);
    GWord deep = word(*g, 0, {"y", "y-", "y"}, {"0", "1", "1", "0"});
    REQUIRE(g->is_reduced(deep));
    CHECK(tb.tree.depth[tb.locate(*g, deep)] == 3);
}

TEST_CASE("path length equals tree displacement at desk scale") {
    struct Budgets {
        const char* name;
        i64 words, radius, coeffs;
    };
    for (Budgets m : {Budgets{"klein-bottle", 6, 7, 6},
                      Budgets{"bs12", 6, 7, 6},
                      Budgets{"zz-free-product", 4, 5, 4},
                      Budgets{"infinite-dihedral", 6, 7, 6}}) {
        auto g = io::builtin_gog(m.name);
        auto ball = g->k_ball(m.words);
        auto tb = g->tree_ball(m.radius, m.coeffs);
        for (const auto& w : ball.words) {
            i64 displacement = tb.tree.depth[tb.locate(*g, w)];
            CHECK(displacement == w.length());
        }
    }
}

TEST_CASE("stratum pieces: amalgam strip swallows the stratum") {
    auto g = io::builtin_gog("klein-bottle");
    auto pieces = g->stratum_pieces(1, g->edge_by_name("y"), 3, 10);
    CHECK(pieces.covers_stratum_slice);
    CHECK(pieces.r_disjoint); // vacuous: the image is 1-dense
    size_t truncated_total = 0;
    for (const auto& t : pieces.truncated) truncated_total += t.size();
    CHECK(truncated_total == 0);
}

TEST_CASE("stratum pieces: free product separates pieces by more than 2r") {
    auto g = io::builtin_gog("zz-free-product");
    auto pieces = g->stratum_pieces(1, g->edge_by_name("y"), 3, 12);
    CHECK(pieces.covers_stratum_slice);
    CHECK(pieces.r_disjoint);
    size_t truncated_total = 0;
    for (const auto& t : pieces.truncated) truncated_total += t.size();
    CHECK(truncated_total > 0);
    REQUIRE_FALSE(pieces.min_cross_distance.is_infinite());
    CHECK(pieces.min_cross_distance.finite() > Rat(6)); // > 2r
}

TEST_CASE("infinite dihedral: finite vertex groups work throughout") {
    auto g = io::builtin_gog("infinite-dihedral");
    REQUIRE(g->validate());
    auto ball = g->k_ball(5);
    CHECK(ball.words.size() > 5);
    auto tb = g->tree_ball(4, 2);
    CHECK(tb.tree.well_formed());
    // D_inf is a line
    std::set<int> parents(tb.tree.parent.begin(), tb.tree.parent.end());
    int leaves = 0;
    for (int v = 0; v < tb.tree.size(); ++v)
        if (!parents.count(v)) ++leaves;
    CHECK(leaves == 2);
}
