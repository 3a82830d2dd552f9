#include "asdim/covers.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "asdim/error.hpp"
#include "asdim/kernels.hpp"
#include "asdim/util.hpp"

namespace asdim {
namespace covers {

Cover ColoredFamilies::flatten() const {
    Cover c;
    c.space = space;
    for (const auto& fam : families)
        for (const auto& s : fam) c.sets.push_back(s);
    return c;
}

ExtRat dist_to_set(const MetricSpace& s, int x, const PointSet& set) {
    if (set.empty()) return ExtRat::infinity();
    ExtRat best = ExtRat::infinity();
    for (int p : set) {
        ExtRat d{s.dist(x, p)};
        if (d < best) best = d;
    }
    return best;
}

Rat set_diameter(const MetricSpace& s, const PointSet& set, Exec mode) {
    int n = int(set.size());
    if (n <= 1) return Rat(0);
    return kern::fold_pairs<Rat>(
        n, Rat(0), [&](int i, int j) { return s.dist(set[i], set[j]); },
        [](const Rat& a, const Rat& b) { return max(a, b); }, mode);
}

ExtRat cross_distance(const MetricSpace& s, const PointSet& a, const PointSet& b,
                      Exec mode) {
    if (a.empty() || b.empty()) return ExtRat::infinity();
    return kern::fold_index<ExtRat>(
        i64(a.size()), ExtRat::infinity(),
        [&](long long i) {
            ExtRat best = ExtRat::infinity();
            for (int q : b) {
                ExtRat d{s.dist(a[size_t(i)], q)};
                if (d < best) best = d;
            }
            return best;
        },
        [](const ExtRat& x, const ExtRat& y) { return min(x, y); }, mode);
}

PointSet complement(int space_size, const PointSet& set) {
    std::vector<char> in(space_size, 0);
    for (int p : set) in[p] = 1;
    PointSet out;
    out.reserve(space_size - set.size());
    for (int i = 0; i < space_size; ++i)
        if (!in[i]) out.push_back(i);
    return out;
}

PointSet closed_neighborhood(const MetricSpace& s, const PointSet& set,
                             const Rat& d, Exec mode) {
    int n = s.size();
    std::vector<char> keep(n, 0);
    kern::for_index(
        n,
        [&](long long x) {
            ExtRat dx = dist_to_set(s, int(x), set);
            if (!dx.is_infinite() && dx.finite() <= d) keep[x] = 1;
        },
        mode);
    PointSet out;
    for (int i = 0; i < n; ++i)
        if (keep[i]) out.push_back(i);
    return out;
}

bool is_cover(int space_size, const std::vector<PointSet>& sets) {
    std::vector<char> hit(space_size, 0);
    for (const auto& s : sets)
        for (int p : s) hit[p] = 1;
    for (char h : hit)
        if (!h) return false;
    return true;
}

bool d_disjoint(const MetricSpace& s, const std::vector<PointSet>& family,
                const Rat& d, Exec mode) {
    int m = int(family.size());
    return !kern::any_index(
        i64(m) * m,
        [&](long long idx) {
            int i = int(idx / m), j = int(idx % m);
            if (i >= j) return false;
            ExtRat cd = cross_distance(s, family[i], family[j], Exec::Serial);
            return cd < ExtRat(d);
        },
        mode);
}

int multiplicity(int space_size, const std::vector<PointSet>& sets) {
    std::vector<int> count(space_size, 0);
    for (const auto& s : sets)
        for (int p : s) ++count[p];
    int m = 0;
    for (int c : count) m = std::max(m, c);
    return m;
}

int d_multiplicity(const MetricSpace& s, const std::vector<PointSet>& sets,
                   const Rat& d, Exec mode) {
    int n = s.size();
    return (int)kern::fold_index<i64>(
        n, 0,
        [&](long long x) {
            i64 c = 0;
            for (const auto& u : sets) {
                ExtRat du = dist_to_set(s, int(x), u);
                if (!du.is_infinite() && du.finite() <= d) ++c;
            }
            return c;
        },
        [](i64 a, i64 b) { return std::max(a, b); }, mode);
}

ExtRat lebesgue_number(const MetricSpace& s, const std::vector<PointSet>& sets,
                       const PointSet* over, Exec mode) {
    int n = s.size();
    std::vector<PointSet> complements;
    complements.reserve(sets.size());
    for (const auto& u : sets) complements.push_back(complement(n, u));
    auto depth_at = [&](int x) {
        ExtRat best{Rat(0)};
        bool first = true;
        for (size_t u = 0; u < sets.size(); ++u) {
            ExtRat d = dist_to_set(s, x, complements[u]);
            if (first || d > best) { best = d; first = false; }
        }
        return best;
    };
    if (over) {
        if (over->empty()) return ExtRat::infinity();
        return kern::fold_index<ExtRat>(
            i64(over->size()), ExtRat::infinity(),
            [&](long long i) { return depth_at((*over)[size_t(i)]); },
            [](const ExtRat& a, const ExtRat& b) { return min(a, b); }, mode);
    }
    if (n == 0) return ExtRat::infinity();
    return kern::fold_index<ExtRat>(
        n, ExtRat::infinity(), [&](long long x) { return depth_at(int(x)); },
        [](const ExtRat& a, const ExtRat& b) { return min(a, b); }, mode);
}

Rat max_diameter(const MetricSpace& s, const std::vector<PointSet>& sets,
                 Exec mode) {
    Rat b(0);
    for (const auto& u : sets) b = max(b, set_diameter(s, u, mode));
    return b;
}

Cover enlarge(const Cover& c, const Rat& d) {
    Cover out;
    out.space = c.space;
    out.covers = c.covers;
    for (const auto& u : c.sets)
        out.sets.push_back(closed_neighborhood(*c.space, u, d));
    return out;
}

ColoredFamilies enlarge(const ColoredFamilies& cf, const Rat& d) {
    ColoredFamilies out;
    out.space = cf.space;
    out.scale_d = cf.scale_d;
    out.bound_B = cf.bound_B + d + d;
    for (const auto& fam : cf.families) {
        std::vector<PointSet> nf;
        for (const auto& u : fam)
            nf.push_back(closed_neighborhood(*cf.space, u, d));
        out.families.push_back(std::move(nf));
    }
    return out;
}

Cover shrink(const Cover& c, const Rat& d) {
    const MetricSpace& s = *c.space;
    int n = s.size();
    Cover out;
    out.space = c.space;
    for (const auto& u : c.sets) {
        PointSet comp = complement(n, u);
        PointSet v;
        for (int x : u) {
            ExtRat dx = dist_to_set(s, x, comp);
            if (dx > ExtRat(d)) v.push_back(x);
        }
        if (!v.empty()) out.sets.push_back(std::move(v));
    }
    if (c.covers && !is_cover(n, out.sets)) {
        ExtRat L = lebesgue_number(s, c.sets);
        throw VerificationError(
            "shrink lost coverage (L(cover) = " + L.str() +
            " < 2d = " + (d + d).str() + ")");
    }
    return out;
}

CoverAttributes attributes(const Cover& c, Exec mode, int exact_cap) {
    CoverAttributes a;
    a.bound = Rat(0);
    for (const auto& u : c.sets) {
        if (int(u.size()) <= exact_cap) {
            a.bound = max(a.bound, set_diameter(*c.space, u, mode));
            continue;
        }
        a.bound_exact = false;
        Rat ecc = kern::fold_index<Rat>(
            i64(u.size()), Rat(0),
            [&](long long i) { return c.space->dist(u[0], u[size_t(i)]); },
            [](const Rat& x, const Rat& y) { return max(x, y); }, mode);
        a.bound = max(a.bound, ecc + ecc);
    }
    a.multiplicity = multiplicity(c.space->size(), c.sets);
    a.lebesgue = lebesgue_number(*c.space, c.sets, nullptr, mode);
    a.covers = is_cover(c.space->size(), c.sets);
    return a;
}

Cover colored_to_cover(const ColoredFamilies& cf) {
    Rat third = cf.scale_d / Rat(3);
    Cover out;
    out.space = cf.space;
    for (const auto& fam : cf.families)
        for (const auto& u : fam)
            out.sets.push_back(closed_neighborhood(*cf.space, u, third));
    return out;
}

namespace {

// Exact graph coloring by backtracking, vertices in canonical order with a
// greedy clique used as a lower-bound seed.
bool color_graph(const std::vector<std::vector<char>>& adj, int colors,
                 std::vector<int>& assignment) {
    int n = int(adj.size());
    assignment.assign(n, -1);
    // Order vertices by degree (descending), ties by index.
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::vector<int> degree(n, 0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) degree[i] += adj[i][j];
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return degree[a] > degree[b]; });
    std::vector<int> greedy_clique;
    for (int v : order) {
        bool all = true;
        for (int u : greedy_clique)
            if (!adj[v][u]) { all = false; break; }
        if (all) greedy_clique.push_back(v);
    }
    if (int(greedy_clique.size()) > colors) return false;

    std::function<bool(int)> rec = [&](int idx) {
        if (idx == n) return true;
        int v = order[idx];
        int used_max = -1;
        for (int i = 0; i < idx; ++i) used_max = std::max(used_max, assignment[order[i]]);
        // New colors are introduced in order, breaking color symmetry.
        int limit = std::min(colors - 1, used_max + 1);
        for (int c = 0; c <= limit; ++c) {
            bool ok = true;
            for (int u = 0; u < n; ++u)
                if (adj[v][u] && assignment[u] == c) { ok = false; break; }
            if (!ok) continue;
            assignment[v] = c;
            if (rec(idx + 1)) return true;
            assignment[v] = -1;
        }
        return false;
    };
    return rec(0);
}

} // namespace

ColoredFamilies cover_to_colored(const Cover& c, const Rat& d, int n_plus_1) {
    const MetricSpace& s = *c.space;
    Cover shrunk = shrink(c, d);
    int m = int(shrunk.sets.size());
    std::vector<std::vector<char>> adj(m, std::vector<char>(m, 0));
    for (int i = 0; i < m; ++i)
        for (int j = i + 1; j < m; ++j) {
            ExtRat cd = cross_distance(s, shrunk.sets[i], shrunk.sets[j]);
            if (cd < ExtRat(d)) adj[i][j] = adj[j][i] = 1;
        }
    // Greedy pass in canonical order.
    std::vector<int> color(m, -1);
    int greedy_max = -1;
    for (int i = 0; i < m; ++i) {
        std::vector<char> used(m + 1, 0);
        for (int j = 0; j < m; ++j)
            if (adj[i][j] && color[j] >= 0) used[color[j]] = 1;
        int cpick = 0;
        while (used[cpick]) ++cpick;
        color[i] = cpick;
        greedy_max = std::max(greedy_max, cpick);
    }
    if (greedy_max + 1 > n_plus_1) {
        if (!color_graph(adj, n_plus_1, color))
            throw SearchExhausted("no " + std::to_string(n_plus_1) +
                                  "-coloring of the shrunk proximity graph");
    }
    ColoredFamilies out;
    out.space = c.space;
    out.scale_d = d;
    out.families.assign(n_plus_1, {});
    for (int i = 0; i < m; ++i) out.families[color[i]].push_back(shrunk.sets[i]);
    out.bound_B = max_diameter(s, shrunk.sets);
    return out;
}

bool verify_colored(const ColoredFamilies& cf, std::string* why, Exec mode) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    const MetricSpace& s = *cf.space;
    std::vector<PointSet> all;
    for (size_t f = 0; f < cf.families.size(); ++f) {
        if (!d_disjoint(s, cf.families[f], cf.scale_d, mode))
            return fail("family " + std::to_string(f) + " is not " +
                        cf.scale_d.str() + "-disjoint");
        for (const auto& u : cf.families[f]) {
            if (u.empty()) return fail("empty set in family " + std::to_string(f));
            Rat diam = set_diameter(s, u, mode);
            if (diam > cf.bound_B)
                return fail("set diameter " + diam.str() + " exceeds bound " +
                            cf.bound_B.str());
            all.push_back(u);
        }
    }
    if (!is_cover(s.size(), all)) return fail("families do not cover the space");
    return true;
}

std::uint64_t ScaleDimCertificate::content_hash() const {
    std::ostringstream out;
    out << int(verdict) << " n=" << n << " d=" << d.str() << " B=" << B.str()
        << " space=" << hex64(space_hash) << "\n";
    if (witness) {
        for (const auto& fam : witness->families) {
            out << "fam";
            for (const auto& set : fam) {
                out << " {";
                for (int p : set) out << p << ",";
                out << "}";
            }
            out << "\n";
        }
    }
    out << transcript;
    return fnv64(out.str());
}

bool verify_certificate(const ScaleDimCertificate& cert, const SpaceRef& space,
                        std::string* why) {
    if (cert.space_hash != space->content_hash()) {
        if (why) *why = "space hash mismatch";
        return false;
    }
    if (cert.verdict == Verdict::Upper) {
        if (!cert.witness) {
            if (why) *why = "upper verdict without witness";
            return false;
        }
        if (int(cert.witness->families.size()) != cert.n + 1) {
            if (why) *why = "witness family count != n+1";
            return false;
        }
        ColoredFamilies w = *cert.witness;
        w.space = space;
        w.scale_d = cert.d;
        w.bound_B = cert.B;
        return verify_colored(w, why);
    }
    if (cert.verdict == Verdict::Refuted) {
        // A refutation is an exhaustion transcript; it cannot be replayed
        // cheaply, but its parameters must be internally consistent.
        if (cert.transcript.empty()) {
            if (why) *why = "refutation without exhaustion transcript";
            return false;
        }
        return true;
    }
    if (why) *why = "verdict unknown";
    return false;
}

UniformCheckResult check_uniform_asdim(
    const std::vector<SpaceRef>& spaces,
    const std::vector<ColoredFamilies>& witnesses, const Rat& d, int n) {
    UniformCheckResult res;
    if (spaces.size() != witnesses.size()) {
        res.diagnostic = "one witness per space required";
        return res;
    }
    Rat R(0);
    for (size_t i = 0; i < spaces.size(); ++i) {
        ColoredFamilies w = witnesses[i];
        w.space = spaces[i];
        if (int(w.families.size()) != n + 1) {
            res.diagnostic = "space " + std::to_string(i) + ": family count " +
                             std::to_string(w.families.size()) + " != n+1";
            return res;
        }
        w.scale_d = d;
        // Common bound: take the max actual diameter, then recheck.
        Rat local(0);
        for (const auto& fam : w.families)
            for (const auto& u : fam)
                local = max(local, set_diameter(*spaces[i], u));
        w.bound_B = local;
        std::string why;
        if (!verify_colored(w, &why)) {
            res.diagnostic = "space " + std::to_string(i) + ": " + why;
            return res;
        }
        R = max(R, local);
    }
    res.ok = true;
    res.common_bound = R;
    return res;
}

InfiniteUnionCheck check_infinite_union_hypotheses(
    const SpaceRef& X, const std::vector<PointSet>& pieces,
    const std::vector<ColoredFamilies>& piece_witnesses, const PointSet& Y_r,
    const ScaleDimCertificate& y_cert, const Rat& r, int n, const Rat& d) {
    InfiniteUnionCheck res;
    if (!is_cover(X->size(), pieces)) {
        res.diagnostic = "pieces do not cover the space";
        return res;
    }
    std::vector<SpaceRef> piece_spaces(pieces.size(), X);
    auto uni = check_uniform_asdim(piece_spaces, piece_witnesses, d, n);
    if (!uni.ok) {
        res.diagnostic = "uniform witness check: " + uni.diagnostic;
        return res;
    }
    std::string why;
    if (y_cert.verdict != Verdict::Upper || y_cert.n > n) {
        res.diagnostic = "Y_r certificate is not an upper(" + std::to_string(n) +
                         ") certificate";
        return res;
    }
    if (y_cert.witness) {
        ColoredFamilies w = *y_cert.witness;
        if (!verify_colored(w, &why)) {
            res.diagnostic = "Y_r witness: " + why;
            return res;
        }
    }
    // r-disjointness of the truncated pieces.
    std::vector<char> in_y(X->size(), 0);
    for (int p : Y_r) in_y[p] = 1;
    std::vector<PointSet> truncated;
    for (const auto& f : pieces) {
        PointSet t;
        for (int p : f)
            if (!in_y[p]) t.push_back(p);
        truncated.push_back(std::move(t));
    }
    if (!d_disjoint(*X, truncated, r)) {
        res.diagnostic = "truncated pieces are not r-disjoint";
        return res;
    }
    res.ok = true;
    return res;
}

} // namespace covers
} // namespace asdim
