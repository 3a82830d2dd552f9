#include "asdim/simplicial.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "asdim/error.hpp"
#include "asdim/kernels.hpp"
#include "asdim/util.hpp"

namespace asdim {
namespace simp {

int OrientedComplex::vertex_by_label(const std::string& l) const {
    for (int v = 0; v < int(labels_.size()); ++v)
        if (labels_[v] == l) return v;
    throw std::out_of_range("no vertex labeled " + l);
}

void OrientedComplex::add_simplex(Simplex s) {
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    for (int v : s)
        if (v < 0 || v >= vertex_count())
            throw std::out_of_range("simplex vertex out of range");
    if (s.empty()) return;
    // all nonempty faces
    int m = int(s.size());
    for (unsigned mask = 1; mask < (1u << m); ++mask) {
        Simplex face;
        for (int i = 0; i < m; ++i)
            if (mask & (1u << i)) face.push_back(s[i]);
        simplices_.insert(std::move(face));
    }
}

std::vector<Simplex> OrientedComplex::maximal_simplices() const {
    std::vector<Simplex> out;
    for (const auto& s : simplices_) {
        bool maximal = true;
        for (const auto& t : simplices_) {
            if (t.size() <= s.size()) continue;
            if (std::includes(t.begin(), t.end(), s.begin(), s.end())) {
                maximal = false;
                break;
            }
        }
        if (maximal) out.push_back(s);
    }
    return out;
}

int OrientedComplex::dimension() const {
    size_t d = 0;
    for (const auto& s : simplices_) d = std::max(d, s.size());
    return int(d) - 1;
}

bool OrientedComplex::well_formed(std::string* why) const {
    for (const auto& s : simplices_) {
        if (!std::is_sorted(s.begin(), s.end())) {
            if (why) *why = "unsorted simplex";
            return false;
        }
        int m = int(s.size());
        for (unsigned mask = 1; mask < (1u << m); ++mask) {
            Simplex face;
            for (int i = 0; i < m; ++i)
                if (mask & (1u << i)) face.push_back(s[i]);
            if (!simplices_.count(face)) {
                if (why) *why = "missing face";
                return false;
            }
        }
    }
    for (int v = 0; v < vertex_count(); ++v)
        if (!simplices_.count({v})) {
            if (why) *why = "vertex missing as a simplex";
            return false;
        }
    return true;
}

Simplex UniformPoint::support() const {
    Simplex s;
    for (const auto& [v, c] : coords)
        if (!c.is_zero()) s.push_back(v);
    return s;
}

bool UniformPoint::valid(std::string* why) const {
    Rat sum(0);
    for (const auto& [v, c] : coords) {
        if (c < Rat(0)) {
            if (why) *why = "negative coordinate";
            return false;
        }
        sum += c;
    }
    if (sum != Rat(1)) {
        if (why) *why = "coordinates sum to " + sum.str();
        return false;
    }
    Simplex s = support();
    if (!complex->has_simplex(s)) {
        if (why) *why = "support is not a simplex";
        return false;
    }
    return true;
}

UniformPoint UniformPoint::vertex(ComplexRef k, int v) {
    UniformPoint p;
    p.complex = std::move(k);
    p.coords[v] = Rat(1);
    return p;
}

Rat uniform_dist_sq(const UniformPoint& p, const UniformPoint& q) {
    if (p.complex != q.complex)
        throw PreconditionError("uniform distance between different complexes");
    Rat acc(0);
    auto it = p.coords.begin();
    auto jt = q.coords.begin();
    while (it != p.coords.end() || jt != q.coords.end()) {
        if (jt == q.coords.end() || (it != p.coords.end() && it->first < jt->first)) {
            acc += it->second.squared();
            ++it;
        } else if (it == p.coords.end() || jt->first < it->first) {
            acc += jt->second.squared();
            ++jt;
        } else {
            acc += (it->second - jt->second).squared();
            ++it;
            ++jt;
        }
    }
    return acc;
}

double uniform_dist(const UniformPoint& p, const UniformPoint& q) {
    return std::sqrt(uniform_dist_sq(p, q).to_double());
}

bool SimplicialMap::simplicial(std::string* why) const {
    if (int(vertex_map.size()) != domain->vertex_count()) {
        if (why) *why = "vertex map size mismatch";
        return false;
    }
    for (const auto& s : domain->simplices()) {
        Simplex img = image_simplex(s);
        if (!codomain->has_simplex(img)) {
            if (why) *why = "image of a simplex is not a simplex";
            return false;
        }
    }
    return true;
}

Simplex SimplicialMap::image_simplex(const Simplex& s) const {
    Simplex img;
    for (int v : s) img.push_back(vertex_map[v]);
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
    return img;
}

UniformPoint SimplicialMap::push(const UniformPoint& p) const {
    UniformPoint q;
    q.complex = codomain;
    for (const auto& [v, c] : p.coords) {
        auto [it, fresh] = q.coords.emplace(vertex_map[v], c);
        if (!fresh) it->second += c;
    }
    return q;
}

ComplexRef nerve(const covers::Cover& c) {
    std::vector<std::string> labels;
    for (size_t i = 0; i < c.sets.size(); ++i) labels.push_back("U" + std::to_string(i));
    auto k = std::make_shared<OrientedComplex>(std::move(labels));
    int n = c.space->size();
    std::vector<Simplex> membership(n);
    for (int i = 0; i < int(c.sets.size()); ++i)
        for (int p : c.sets[i]) membership[p].push_back(i);
    std::set<Simplex> seen;
    for (int p = 0; p < n; ++p)
        if (!membership[p].empty() && seen.insert(membership[p]).second)
            k->add_simplex(membership[p]);
    return k;
}

UniformPoint canonical_projection(const covers::Cover& c, const ComplexRef& nv,
                                  int x) {
    const MetricSpace& s = *c.space;
    int n = s.size();
    Rat total(0);
    std::vector<std::pair<int, Rat>> depths;
    for (int i = 0; i < int(c.sets.size()); ++i) {
        // d(x, X \ U) is zero when x lies outside U.
        bool inside =
            std::find(c.sets[i].begin(), c.sets[i].end(), x) != c.sets[i].end();
        if (!inside) continue;
        covers::PointSet comp = covers::complement(n, c.sets[i]);
        ExtRat d = covers::dist_to_set(s, x, comp);
        if (d.is_infinite()) {
            // U = X: the projection collapses to this vertex.
            UniformPoint p = UniformPoint::vertex(nv, i);
            return p;
        }
        depths.push_back({i, d.finite()});
        total += d.finite();
    }
    if (depths.empty() || total.is_zero())
        throw PreconditionError("canonical projection: point uncovered (zero denominator)");
    UniformPoint p;
    p.complex = nv;
    for (auto& [i, d] : depths) p.coords[i] = d / total;
    return p;
}

Rat min_lebesgue_for_lipschitz(const Rat& eps, int k) {
    if (!(eps > Rat(0))) throw PreconditionError("eps must be positive");
    i64 a = 2 * i64(k) + 3;
    return Rat(a * a) / eps;
}

// ---------------------------------------------------------------- prisms

ComplexRef prism_triangulation(int k, const std::vector<std::string>& base_labels) {
    std::vector<std::string> labels;
    auto base = [&](int i) {
        return base_labels.empty() ? "x" + std::to_string(i) : base_labels[i];
    };
    for (int i = 0; i <= k; ++i) labels.push_back(base(i) + "|0");
    for (int i = 0; i <= k; ++i) labels.push_back(base(i) + "|1");
    auto cx = std::make_shared<OrientedComplex>(std::move(labels));
    // staircase chains: (x0,0)..(xj,0),(xj,1)..(xk,1)
    for (int j = 0; j <= k; ++j) {
        Simplex s;
        for (int i = 0; i <= j; ++i) s.push_back(i);
        for (int i = j; i <= k; ++i) s.push_back(k + 1 + i);
        cx->add_simplex(s);
    }
    return cx;
}

MappingCylinder mapping_cylinder(const SimplicialMap& g) {
    std::string why;
    if (!g.simplicial(&why)) throw PreconditionError("map is not simplicial: " + why);
    const OrientedComplex& X = *g.domain;
    const OrientedComplex& Y = *g.codomain;
    std::vector<std::string> labels;
    for (int v = 0; v < X.vertex_count(); ++v) labels.push_back("X." + X.vertex_label(v));
    for (int v = 0; v < Y.vertex_count(); ++v) labels.push_back("Y." + Y.vertex_label(v));
    auto cx = std::make_shared<OrientedComplex>(std::move(labels));
    int off = X.vertex_count();

    for (const auto& s : Y.simplices()) {
        Simplex t;
        for (int v : s) t.push_back(off + v);
        cx->add_simplex(t);
    }
    for (const auto& sigma : X.maximal_simplices()) {
        int m = int(sigma.size()) - 1;
        for (int j = 0; j <= m; ++j) {
            Simplex chain;
            for (int i = 0; i <= j; ++i) chain.push_back(sigma[i]); // (v,0) -> X copy
            for (int i = j; i <= m; ++i)
                chain.push_back(off + g.vertex_map[sigma[i]]); // (v,1) -> g(v)
            cx->add_simplex(chain);
        }
    }
    MappingCylinder out;
    out.complex = cx;
    out.domain_vertices = X.vertex_count();
    out.codomain_vertices = Y.vertex_count();
    return out;
}

UniformPoint cylinder_point(const MappingCylinder& cyl, const SimplicialMap& g,
                            const UniformPoint& p, const Rat& t) {
    if (t < Rat(0) || t > Rat(1)) throw PreconditionError("cylinder parameter outside [0,1]");
    Simplex sigma = p.support();
    std::vector<Rat> lam;
    for (int v : sigma) lam.push_back(p.coords.at(v));
    int m = int(sigma.size()) - 1;
    // staircase containing (p, t): suffix_j <= t <= suffix_j + lam[j]
    Rat suffix(0);
    int j = m;
    for (; j >= 0; --j) {
        if (t <= suffix + lam[j]) break;
        suffix += lam[j];
    }
    if (j < 0) throw std::logic_error("cylinder point: no staircase found");
    Rat top = t - suffix;       // weight on (sigma[j], 1)
    Rat bottom = lam[j] - top;  // weight on (sigma[j], 0)

    UniformPoint out;
    out.complex = cyl.complex;
    auto add = [&](int vertex, const Rat& w) {
        if (w.is_zero()) return;
        auto [it, fresh] = out.coords.emplace(vertex, w);
        if (!fresh) it->second += w;
    };
    for (int l = 0; l < j; ++l) add(cyl.domain_vertex(sigma[l]), lam[l]);
    add(cyl.domain_vertex(sigma[j]), bottom);
    add(cyl.codomain_vertex(g.vertex_map[sigma[j]]), top);
    for (int l = j + 1; l <= m; ++l)
        add(cyl.codomain_vertex(g.vertex_map[sigma[l]]), lam[l]);
    return out;
}

// ------------------------------------------------------- Lipschitz checks

namespace {

std::vector<std::pair<int, int>> sample_pairs(int n, i64 target,
                                              std::uint64_t seed) {
    std::vector<std::pair<int, int>> out;
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (i64 t = 0; t < target; ++t) {
        int a = pick(rng), b = pick(rng);
        if (a != b) out.push_back({a, b});
    }
    return out;
}

} // namespace

bool verify_lipschitz_uniform(const MetricSpace& domain,
                              const std::vector<UniformPoint>& image,
                              const Rat& eps, PairScanReport* report,
                              int exhaustive_cap, std::uint64_t seed,
                              Exec mode) {
    int n = domain.size();
    Rat eps_sq = eps.squared();
    struct Acc {
        bool ok = true;
        double worst = 0.0;
        int a = -1, b = -1;
        i64 pairs = 0;
    };
    auto eval_pair = [&](int a, int b) {
        Acc acc;
        acc.pairs = 1;
        Rat dd = domain.dist(a, b);
        if (dd.is_zero()) return acc;
        Rat di = uniform_dist_sq(image[a], image[b]);
        if (di > eps_sq * dd.squared()) acc.ok = false;
        double ratio = std::sqrt(di.to_double()) / dd.to_double();
        acc.worst = ratio;
        acc.a = a;
        acc.b = b;
        return acc;
    };
    auto merge = [](const Acc& x, const Acc& y) {
        Acc out;
        out.ok = x.ok && y.ok;
        out.pairs = x.pairs + y.pairs;
        if (y.worst > x.worst) {
            out.worst = y.worst;
            out.a = y.a;
            out.b = y.b;
        } else {
            out.worst = x.worst;
            out.a = x.a;
            out.b = x.b;
        }
        return out;
    };
    Acc total;
    bool exhaustive = n <= exhaustive_cap;
    if (exhaustive) {
        total = kern::fold_pairs<Acc>(n, Acc{}, eval_pair, merge, mode);
    } else {
        auto pairs = sample_pairs(n, 2'000'000, seed);
        total = kern::fold_index<Acc>(
            i64(pairs.size()), Acc{},
            [&](long long i) { return eval_pair(pairs[size_t(i)].first, pairs[size_t(i)].second); },
            merge, mode);
    }
    if (report) {
        report->exhaustive = exhaustive;
        report->pairs = total.pairs;
        report->max_ratio = total.worst;
        report->worst_a = total.a;
        report->worst_b = total.b;
    }
    return total.ok;
}

bool verify_projection_lipschitz(const covers::Cover& c, const Rat& eps,
                                 PairScanReport* report, Exec mode) {
    const MetricSpace& s = *c.space;
    int n = s.size();
    // integer depths d(x, X \ U) for x in U, per set
    std::vector<std::vector<std::pair<int, i64>>> supp(n); // (set, depth)
    std::vector<i64> total(n, 0);
    for (int u = 0; u < int(c.sets.size()); ++u) {
        covers::PointSet comp = covers::complement(n, c.sets[u]);
        for (int x : c.sets[u]) {
            ExtRat d = covers::dist_to_set(s, x, comp);
            i64 depth;
            if (d.is_infinite()) {
                // U = X: use the diameter bound + 1 as a finite stand-in;
                // the normalization keeps the projection exact.
                depth = 0;
                for (int y = 0; y < n; ++y) {
                    Rat dy = s.dist(x, y);
                    if (!dy.is_integer()) throw PreconditionError(
                        "projection fast path needs an integer metric");
                    depth = std::max(depth, dy.num());
                }
                depth += 1;
            } else {
                if (!d.finite().is_integer())
                    throw PreconditionError(
                        "projection fast path needs an integer metric");
                depth = d.finite().num();
            }
            supp[x].push_back({u, depth});
            total[x] += depth;
        }
    }
    for (int x = 0; x < n; ++x)
        if (total[x] == 0)
            throw PreconditionError("canonical projection: point uncovered");

    i64 p = eps.num(), q = eps.den();
    struct Acc {
        bool ok = true;
        double worst = 0.0;
        i64 pairs = 0;
    };
    auto eval = [&](int a, int b) {
        Acc acc;
        acc.pairs = 1;
        Rat dr = s.dist(a, b);
        i64 dab = dr.num() / dr.den();
        if (dab == 0) return acc;
        i128 sum = 0;
        const auto& sa = supp[a];
        const auto& sb = supp[b];
        size_t i = 0, j = 0;
        while (i < sa.size() || j < sb.size()) {
            i64 na = 0, nb = 0;
            if (j == sb.size() || (i < sa.size() && sa[i].first < sb[j].first)) {
                na = sa[i++].second;
            } else if (i == sa.size() || sb[j].first < sa[i].first) {
                nb = sb[j++].second;
            } else {
                na = sa[i++].second;
                nb = sb[j++].second;
            }
            i128 diff = i128(na) * total[b] - i128(nb) * total[a];
            sum += diff * diff;
        }
        // sum / (Sa Sb)^2 <= eps^2 dab^2
        i128 lhs = sum * q * q;
        i128 rhs = i128(p) * p * dab * dab;
        i128 norm2 = i128(total[a]) * total[b];
        // rhs * norm2^2 may exceed 128 bits only for absurd scales; our
        // depths are bounded by the ball radius
        rhs *= norm2;
        rhs *= norm2;
        if (lhs > rhs) acc.ok = false;
        acc.worst = double(i128(sum)) /
                    (double(norm2) * double(norm2) * double(dab) * double(dab));
        return acc;
    };
    auto merge = [](const Acc& x, const Acc& y) {
        Acc out;
        out.ok = x.ok && y.ok;
        out.worst = std::max(x.worst, y.worst);
        out.pairs = x.pairs + y.pairs;
        return out;
    };
    Acc total_acc = kern::fold_pairs<Acc>(n, Acc{}, eval, merge, mode);
    if (report) {
        report->exhaustive = true;
        report->pairs = total_acc.pairs;
        report->max_ratio = std::sqrt(total_acc.worst);
    }
    return total_acc.ok;
}

PairScanReport estimate_lipschitz(const MetricSpace& domain,
                                  const MetricSpace& codomain,
                                  const std::vector<int>& point_map,
                                  int exhaustive_cap, std::uint64_t seed,
                                  Exec mode) {
    int n = domain.size();
    struct Acc {
        double worst = 0.0;
        int a = -1, b = -1;
        i64 pairs = 0;
    };
    auto eval_pair = [&](int a, int b) {
        Acc acc;
        acc.pairs = 1;
        Rat dd = domain.dist(a, b);
        if (dd.is_zero()) return acc;
        Rat di = codomain.dist(point_map[a], point_map[b]);
        acc.worst = di.to_double() / dd.to_double();
        acc.a = a;
        acc.b = b;
        return acc;
    };
    auto merge = [](const Acc& x, const Acc& y) {
        return y.worst > x.worst ? Acc{y.worst, y.a, y.b, x.pairs + y.pairs}
                                 : Acc{x.worst, x.a, x.b, x.pairs + y.pairs};
    };
    Acc total;
    PairScanReport rep;
    if (n <= exhaustive_cap) {
        total = kern::fold_pairs<Acc>(n, Acc{}, eval_pair, merge, mode);
        rep.exhaustive = true;
    } else {
        auto pairs = sample_pairs(n, 2'000'000, seed);
        total = kern::fold_index<Acc>(
            i64(pairs.size()), Acc{},
            [&](long long i) { return eval_pair(pairs[size_t(i)].first, pairs[size_t(i)].second); },
            merge, mode);
        rep.exhaustive = false;
    }
    rep.pairs = total.pairs;
    rep.max_ratio = total.worst;
    rep.worst_a = total.a;
    rep.worst_b = total.b;
    return rep;
}

CnEstimate estimate_cn(int n, int grid, int t_steps) {
    if (n > 3) throw PreconditionError("prism constant estimation capped at n = 3");
    CnEstimate est;
    est.max_prism = 2 * n + 2;
    est.lambda.assign(est.max_prism + 1, 0.0);
    std::ostringstream dens;
    dens << "barycentric grid 1/" << grid << ", t grid 1/" << t_steps;
    est.density = dens.str();

    for (int k = 1; k <= est.max_prism; ++k) {
        int verts = k; // (k-1)-simplex has k vertices
        auto prism = prism_triangulation(k - 1);
        // identity map used for the shared staircase algebra
        auto base_labels = std::vector<std::string>();
        for (int i = 0; i < verts; ++i) base_labels.push_back("x" + std::to_string(i));
        auto base = std::make_shared<OrientedComplex>(base_labels);
        {
            Simplex full;
            for (int i = 0; i < verts; ++i) full.push_back(i);
            base->add_simplex(full);
        }
        SimplicialMap idmap;
        idmap.domain = base;
        idmap.codomain = base;
        idmap.vertex_map.resize(verts);
        for (int i = 0; i < verts; ++i) idmap.vertex_map[i] = i;
        MappingCylinder fake;
        fake.complex = prism;
        fake.domain_vertices = verts;
        fake.codomain_vertices = verts;

        // enumerate barycentric compositions of `grid` into `verts` parts
        std::vector<std::vector<int>> comps;
        std::vector<int> cur(verts, 0);
        std::function<void(int, int)> rec = [&](int idx, int left) {
            if (idx == verts - 1) {
                cur[idx] = left;
                comps.push_back(cur);
                return;
            }
            for (int v = 0; v <= left; ++v) {
                cur[idx] = v;
                rec(idx + 1, left - v);
            }
        };
        rec(0, grid);

        struct Sample {
            UniformPoint base_pt;
            Rat t;
            UniformPoint img;
        };
        std::vector<Sample> samples;
        for (const auto& comp : comps) {
            UniformPoint bp;
            bp.complex = base;
            for (int i = 0; i < verts; ++i)
                if (comp[i] > 0) bp.coords[i] = Rat(comp[i], grid);
            for (int ts = 0; ts <= t_steps; ++ts) {
                Rat t(ts, t_steps);
                Sample s;
                s.base_pt = bp;
                s.t = t;
                s.img = cylinder_point(fake, idmap, bp, t);
                samples.push_back(std::move(s));
            }
        }
        int m = int(samples.size());
        double lam = kern::fold_pairs<double>(
            m, 0.0,
            [&](int a, int b) {
                Rat base_sq = uniform_dist_sq(samples[a].base_pt, samples[b].base_pt);
                Rat dt = samples[a].t - samples[b].t;
                double dom_sq = base_sq.to_double() + dt.squared().to_double();
                if (dom_sq == 0.0) return 0.0;
                double img_sq = uniform_dist_sq(samples[a].img, samples[b].img).to_double();
                return std::sqrt(img_sq / dom_sq);
            },
            [](double x, double y) { return x > y ? x : y; }, Exec::Parallel);
        est.lambda[k] = lam;
        est.value = std::max(est.value, lam);
    }
    return est;
}

// ------------------------------------------------------------ star covers

StarPullback pullback_star_cover(const covers::SpaceRef& domain,
                                 const std::vector<UniformPoint>& image) {
    int n = domain->size();
    if (int(image.size()) != n)
        throw PreconditionError("pullback: one image point per domain point");
    std::map<int, covers::PointSet> stars;
    for (int x = 0; x < n; ++x)
        for (const auto& [v, c] : image[x].coords)
            if (!c.is_zero()) stars[v].push_back(x);
    StarPullback out;
    out.cover.space = domain;
    for (auto& [v, pts] : stars) {
        out.cover.sets.push_back(pts);
        out.star_vertex.push_back(v);
    }
    return out;
}

covers::Cover pullback_cover(const covers::SpaceRef& domain,
                             const std::vector<UniformPoint>& image,
                             const std::vector<std::vector<int>>& vertex_sets) {
    int n = domain->size();
    covers::Cover out;
    out.space = domain;
    for (const auto& vs : vertex_sets) {
        std::set<int> verts(vs.begin(), vs.end());
        covers::PointSet s;
        for (int x = 0; x < n; ++x) {
            bool hit = false;
            for (const auto& [v, c] : image[x].coords)
                if (!c.is_zero() && verts.count(v)) { hit = true; break; }
            if (hit) s.push_back(x);
        }
        if (!s.empty()) out.sets.push_back(std::move(s));
    }
    return out;
}

// -------------------------------------------------------------- gluing

GlueReport glue_check(const MetricSpace& space, const covers::PointSet& A,
                      const covers::PointSet& W, const Rat& r,
                      const std::vector<UniformPoint>& f_on_W,
                      const Rat& eps) {
    GlueReport rep;
    if (f_on_W.size() != W.size())
        throw PreconditionError("glue check: one image per point of W");
    int m = int(W.size());
    std::vector<Rat> dA(m);
    for (int i = 0; i < m; ++i) {
        ExtRat d = covers::dist_to_set(space, W[i], A);
        if (d.is_infinite()) throw PreconditionError("glue check: A empty");
        dA[i] = d.finite();
    }
    Rat eps_sq = eps.squared();
    std::vector<int> inside, outside, shell;
    for (int i = 0; i < m; ++i) {
        if (dA[i] <= r) inside.push_back(i);
        if (dA[i] > r - Rat(1)) outside.push_back(i); // includes the shell
        if (dA[i] > r - Rat(1) && dA[i] <= r) shell.push_back(i);
    }
    auto check_part = [&](const std::vector<int>& part) {
        for (size_t a = 0; a < part.size(); ++a)
            for (size_t b = a + 1; b < part.size(); ++b) {
                int i = part[a], j = part[b];
                Rat dd = space.dist(W[i], W[j]);
                if (dd.is_zero()) continue;
                if (uniform_dist_sq(f_on_W[i], f_on_W[j]) > eps_sq * dd.squared()) {
                    rep.witness_a = W[i];
                    rep.witness_b = W[j];
                    return false;
                }
            }
        return true;
    };
    if (!check_part(inside)) {
        rep.diagnostic = "restriction to the neighborhood is not eps-Lipschitz";
        return rep;
    }
    if (!check_part(outside)) {
        rep.diagnostic = "restriction outside the neighborhood is not eps-Lipschitz";
        return rep;
    }
    // Crossing pairs route through the boundary shell; the detour factor is
    // the reported slack eta.
    double eta = 0.0;
    for (int i : inside) {
        if (dA[i] > r - Rat(1)) continue; // already in both parts
        for (int j : outside) {
            if (dA[j] <= r) continue;
            Rat dd = space.dist(W[i], W[j]);
            if (dd.is_zero()) continue;
            if (shell.empty()) {
                rep.diagnostic = "no boundary shell between the parts (no-path)";
                rep.witness_a = W[i];
                rep.witness_b = W[j];
                return rep;
            }
            ExtRat best = ExtRat::infinity();
            for (int z : shell) {
                ExtRat through{space.dist(W[i], W[z]) + space.dist(W[z], W[j])};
                if (through < best) best = through;
            }
            Rat detour = best.finite();
            eta = std::max(eta, detour.to_double() / dd.to_double() - 1.0);
            if (uniform_dist_sq(f_on_W[i], f_on_W[j]) > eps_sq * detour.squared()) {
                rep.diagnostic = "crossing pair violates the glued bound";
                rep.witness_a = W[i];
                rep.witness_b = W[j];
                rep.eta = eta;
                return rep;
            }
        }
    }
    rep.ok = true;
    rep.eta = eta;
    return rep;
}

} // namespace simp
} // namespace asdim
