#include "asdim/gog.hpp"

#include <algorithm>
#include <deque>
#include <queue>
#include <set>
#include <sstream>

#include "asdim/error.hpp"
#include "asdim/kernels.hpp"
#include "asdim/util.hpp"

namespace asdim {
namespace gog {

// ----------------------------------------------------------------- VGroup

VGroup VGroup::trivial() { return VGroup(); }

VGroup VGroup::z() {
    VGroup g;
    g.kind_ = Kind::Z;
    g.rank_ = 1;
    return g;
}

VGroup VGroup::zm(int rank) {
    VGroup g;
    g.kind_ = Kind::Zm;
    g.rank_ = rank;
    return g;
}

VGroup VGroup::finite(std::shared_ptr<groups::FiniteTableModel> table) {
    VGroup g;
    g.kind_ = Kind::Finite;
    g.table_ = std::move(table);
    return g;
}

VE VGroup::identity() const {
    switch (kind_) {
        case Kind::Trivial: return {};
        case Kind::Z: return {0};
        case Kind::Zm: return VE(rank_, 0);
        case Kind::Finite: return {i64(table_->identity())};
    }
    return {};
}

VE VGroup::mul(const VE& a, const VE& b) const {
    switch (kind_) {
        case Kind::Trivial: return {};
        case Kind::Z:
        case Kind::Zm: {
            VE r(a.size());
            for (size_t i = 0; i < a.size(); ++i)
                r[i] = checked_cast(i128(a[i]) + b[i]);
            return r;
        }
        case Kind::Finite:
            return {i64(table_->multiply(int(a[0]), int(b[0])))};
    }
    return {};
}

VE VGroup::inv(const VE& a) const {
    switch (kind_) {
        case Kind::Trivial: return {};
        case Kind::Z:
        case Kind::Zm: {
            VE r(a.size());
            for (size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
            return r;
        }
        case Kind::Finite: return {i64(table_->invert(int(a[0])))};
    }
    return {};
}

i64 VGroup::norm(const VE& a) const {
    switch (kind_) {
        case Kind::Trivial: return 0;
        case Kind::Z:
        case Kind::Zm: {
            i64 n = 0;
            for (i64 c : a) n = checked_cast(i128(n) + (c < 0 ? -c : c));
            return n;
        }
        case Kind::Finite: return table_->norm(int(a[0]));
    }
    return 0;
}

std::string VGroup::format(const VE& a) const {
    switch (kind_) {
        case Kind::Trivial: return "1";
        case Kind::Z: return std::to_string(a[0]);
        case Kind::Zm: {
            std::string s;
            for (size_t i = 0; i < a.size(); ++i) {
                if (i) s += ",";
                s += std::to_string(a[i]);
            }
            return s;
        }
        case Kind::Finite: return table_->format(int(a[0]));
    }
    return "1";
}

VE VGroup::parse(const std::string& s) const {
    switch (kind_) {
        case Kind::Trivial:
            if (s != "1") throw ParseError("trivial group element must be 1");
            return {};
        case Kind::Z: return {std::stoll(s)};
        case Kind::Zm: {
            VE e;
            std::string cur;
            std::istringstream in(s);
            while (std::getline(in, cur, ',')) e.push_back(std::stoll(trim(cur)));
            if (int(e.size()) != rank_) throw ParseError("bad Z^m element " + s);
            return e;
        }
        case Kind::Finite: return {i64(table_->parse(s))};
    }
    return {};
}

std::vector<VE> VGroup::generators() const {
    switch (kind_) {
        case Kind::Trivial: return {};
        case Kind::Z: return {{1}, {-1}};
        case Kind::Zm: {
            std::vector<VE> g;
            for (int i = 0; i < rank_; ++i) {
                VE e(rank_, 0);
                e[i] = 1;
                g.push_back(e);
                e[i] = -1;
                g.push_back(e);
            }
            return g;
        }
        case Kind::Finite: {
            std::vector<VE> g;
            for (int x : table_->generators()) g.push_back({i64(x)});
            return g;
        }
    }
    return {};
}

std::vector<VE> VGroup::ball(i64 norm_budget, i64 cap) const {
    std::vector<VE> out;
    switch (kind_) {
        case Kind::Trivial: out.push_back({}); break;
        case Kind::Z:
            for (i64 v = -norm_budget; v <= norm_budget; ++v) out.push_back({v});
            break;
        case Kind::Zm: {
            VE cur(rank_, 0);
            std::function<void(int, i64)> rec = [&](int i, i64 left) {
                if (i == rank_) {
                    out.push_back(cur);
                    return;
                }
                for (i64 v = -left; v <= left; ++v) {
                    cur[i] = v;
                    rec(i + 1, left - (v < 0 ? -v : v));
                }
                cur[i] = 0;
            };
            rec(0, norm_budget);
            break;
        }
        case Kind::Finite:
            for (int e = 0; e < table_->order(); ++e)
                if (table_->norm(e) <= norm_budget) out.push_back({i64(e)});
            break;
    }
    if (i64(out.size()) > cap) throw BudgetExceeded("vertex-group ball");
    std::sort(out.begin(), out.end(), [&](const VE& a, const VE& b) {
        auto ka = std::make_pair(norm(a), format(a));
        auto kb = std::make_pair(norm(b), format(b));
        return ka < kb;
    });
    return out;
}

// -------------------------------------------------------------- Injection

Injection Injection::trivial_into(const VGroup& target) {
    Injection f;
    f.source_ = VGroup::trivial();
    f.target_ = target;
    return f;
}

Injection Injection::z_into(const VGroup& target, VE image_of_gen) {
    if (target.kind() == VGroup::Kind::Finite || target.kind() == VGroup::Kind::Trivial)
        throw PreconditionError("Z cannot inject into a finite or trivial group");
    Injection f;
    f.source_ = VGroup::z();
    f.target_ = target;
    f.z_image_ = std::move(image_of_gen);
    if (f.target_.norm(f.z_image_) == 0)
        throw PreconditionError("edge-group generator must have nontrivial image");
    return f;
}

Injection Injection::finite_into(const VGroup& source, const VGroup& target,
                                 std::vector<int> element_images) {
    if (source.kind() != VGroup::Kind::Finite || target.kind() != VGroup::Kind::Finite)
        throw PreconditionError("finite injection needs finite groups");
    Injection f;
    f.source_ = source;
    f.target_ = target;
    f.elem_images_ = std::move(element_images);
    return f;
}

VE Injection::apply(const VE& a) const {
    switch (source_.kind()) {
        case VGroup::Kind::Trivial: return target_.identity();
        case VGroup::Kind::Z: {
            VE r(z_image_.size());
            for (size_t i = 0; i < z_image_.size(); ++i)
                r[i] = checked_cast(i128(z_image_[i]) * a[0]);
            return r;
        }
        case VGroup::Kind::Finite: return {i64(elem_images_[size_t(a[0])])};
        default: throw PreconditionError("unsupported injection source");
    }
}

bool Injection::in_image(const VE& g) const { return preimage(g).has_value(); }

std::optional<VE> Injection::preimage(const VE& g) const {
    switch (source_.kind()) {
        case VGroup::Kind::Trivial:
            if (target_.is_identity(g)) return VE{};
            return std::nullopt;
        case VGroup::Kind::Z: {
            // g = a * z_image for an integer a
            i64 a = 0;
            bool have = false;
            for (size_t i = 0; i < z_image_.size(); ++i) {
                if (z_image_[i] == 0) {
                    if (g[i] != 0) return std::nullopt;
                    continue;
                }
                if (g[i] % z_image_[i] != 0) return std::nullopt;
                i64 q = g[i] / z_image_[i];
                if (have && q != a) return std::nullopt;
                a = q;
                have = true;
            }
            if (!have) return std::nullopt;
            return VE{a};
        }
        case VGroup::Kind::Finite: {
            for (size_t a = 0; a < elem_images_.size(); ++a)
                if (i64(elem_images_[a]) == g[0]) return VE{i64(a)};
            return std::nullopt;
        }
        default: return std::nullopt;
    }
}

std::pair<VE, VE> Injection::factor(const VE& g) const {
    switch (source_.kind()) {
        case VGroup::Kind::Trivial: return {VE{}, g};
        case VGroup::Kind::Z: {
            if (target_.kind() == VGroup::Kind::Z) {
                i64 k = z_image_[0];
                i64 ak = k < 0 ? -k : k;
                i64 r0 = ((g[0] % ak) + ak) % ak;
                // minimal |rep|; ties keep the nonnegative residue
                i64 rep = (ak - r0 < r0) ? r0 - ak : r0;
                i64 a = (g[0] - rep) / k;
                return {VE{a}, VE{rep}};
            }
            // Z into Z^m: minimize |g - a*w| over integers a near coordinate
            // ratios.
            i64 lo = 0, hi = 0;
            bool have = false;
            for (size_t i = 0; i < z_image_.size(); ++i) {
                if (z_image_[i] == 0) continue;
                i64 q = g[i] / z_image_[i];
                if (!have) { lo = q - 2; hi = q + 2; have = true; }
                else { lo = std::min(lo, q - 2); hi = std::max(hi, q + 2); }
            }
            if (!have) return {VE{0}, g};
            i64 best_a = 0;
            i64 best_norm = -1;
            for (i64 a = lo; a <= hi; ++a) {
                VE rep(g.size());
                for (size_t i = 0; i < g.size(); ++i)
                    rep[i] = checked_cast(i128(g[i]) - i128(a) * z_image_[i]);
                i64 nn = target_.norm(rep);
                if (best_norm < 0 || nn < best_norm ||
                    (nn == best_norm && std::abs(a) < std::abs(best_a))) {
                    best_norm = nn;
                    best_a = a;
                }
            }
            VE rep(g.size());
            for (size_t i = 0; i < g.size(); ++i)
                rep[i] = checked_cast(i128(g[i]) - i128(best_a) * z_image_[i]);
            return {VE{best_a}, rep};
        }
        case VGroup::Kind::Finite: {
            // representatives of the coset image * g, minimal (norm, label)
            VE best;
            bool have = false;
            for (size_t a = 0; a < elem_images_.size(); ++a) {
                VE cand = target_.mul({i64(elem_images_[a])}, g);
                if (!have) { best = cand; have = true; continue; }
                auto kc = std::make_pair(target_.norm(cand), target_.format(cand));
                auto kb = std::make_pair(target_.norm(best), target_.format(best));
                if (kc < kb) best = cand;
            }
            // g = phi(a) * rep  =>  phi(a) = g * rep^-1
            VE img = target_.mul(g, target_.inv(best));
            auto a = preimage(img);
            if (!a) throw std::logic_error("coset factorization failed");
            return {*a, best};
        }
        default: return {VE{}, g};
    }
}

std::pair<VE, VE> Injection::right_factor(const VE& g) const {
    if (target_.kind() != VGroup::Kind::Finite) {
        auto [a, rep] = factor(g); // abelian target: cosets coincide
        return {rep, a};
    }
    switch (source_.kind()) {
        case VGroup::Kind::Trivial: return {g, VE{}};
        case VGroup::Kind::Finite: {
            VE best;
            bool have = false;
            for (size_t a = 0; a < elem_images_.size(); ++a) {
                VE cand = target_.mul(g, {i64(elem_images_[a])});
                if (!have) { best = cand; have = true; continue; }
                auto kc = std::make_pair(target_.norm(cand), target_.format(cand));
                auto kb = std::make_pair(target_.norm(best), target_.format(best));
                if (kc < kb) best = cand;
            }
            VE img = target_.mul(target_.inv(best), g);
            auto a = preimage(img);
            if (!a) throw std::logic_error("right coset factorization failed");
            return {best, *a};
        }
        default: throw PreconditionError("unsupported injection source");
    }
}

std::vector<VE> Injection::transversal(i64 norm_budget, i64 cap) const {
    std::vector<VE> out;
    for (const VE& g : target_.ball(norm_budget, cap)) {
        auto [rep, a] = right_factor(g);
        if (rep == g) out.push_back(g);
    }
    return out;
}

bool Injection::check_injective(std::string* why) const {
    switch (source_.kind()) {
        case VGroup::Kind::Trivial: return true;
        case VGroup::Kind::Z:
            if (target_.norm(z_image_) == 0) {
                if (why) *why = "generator image is trivial";
                return false;
            }
            return true;
        case VGroup::Kind::Finite: {
            std::set<int> seen(elem_images_.begin(), elem_images_.end());
            if (seen.size() != elem_images_.size()) {
                if (why) *why = "element images collide";
                return false;
            }
            // homomorphism check on all pairs (finite and small)
            const auto& t = source_.table();
            for (int a = 0; a < t.order(); ++a)
                for (int b = 0; b < t.order(); ++b) {
                    int ab = t.multiply(a, b);
                    VE lhs = {i64(elem_images_[size_t(ab)])};
                    VE rhs = target_.mul({i64(elem_images_[size_t(a)])},
                                         {i64(elem_images_[size_t(b)])});
                    if (lhs != rhs) {
                        if (why) *why = "images do not multiply homomorphically";
                        return false;
                    }
                }
            return true;
        }
        default: return false;
    }
}

// ---------------------------------------------------------- GraphOfGroups

GraphOfGroups::GraphOfGroups(std::vector<std::string> vertex_names,
                             std::vector<VGroup> vertex_groups, int base_vertex)
    : vertex_names_(std::move(vertex_names)), vgroups_(std::move(vertex_groups)),
      base_(base_vertex) {
    if (vertex_names_.size() != vgroups_.size() || base_ < 0 ||
        base_ >= int(vertex_names_.size()))
        throw PreconditionError("graph of groups: bad vertex data");
}

int GraphOfGroups::add_edge_pair(const std::string& name, int from, int to,
                                 const VGroup& edge_group, Injection phi_fwd,
                                 Injection phi_rev, bool in_tree) {
    int pair = int(egroups_.size());
    egroups_.push_back(edge_group);
    EdgeRec fwd, rev;
    fwd.name = name;
    fwd.from = from;
    fwd.to = to;
    fwd.pair = pair;
    fwd.in_tree = in_tree;
    fwd.phi = std::move(phi_fwd);
    rev.name = name + "-";
    rev.from = to;
    rev.to = from;
    rev.pair = pair;
    rev.in_tree = in_tree;
    rev.phi = std::move(phi_rev);
    int fi = int(edges_.size());
    fwd.reverse = fi + 1;
    rev.reverse = fi;
    edges_.push_back(std::move(fwd));
    edges_.push_back(std::move(rev));
    return fi;
}

int GraphOfGroups::edge_by_name(const std::string& n) const {
    for (int e = 0; e < int(edges_.size()); ++e)
        if (edges_[e].name == n) return e;
    throw ParseError("unknown edge: " + n);
}

bool GraphOfGroups::validate(std::string* why) const {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    for (const auto& e : edges_) {
        const EdgeRec& r = edges_[e.reverse];
        if (r.reverse != (&e - edges_.data())) return fail("involution broken");
        if (r.from != e.to || r.to != e.from) return fail("endpoint mismatch");
        if (e.phi.target().kind() != vgroups_[e.to].kind())
            return fail("injection target mismatch at edge " + e.name);
        std::string w;
        if (!e.phi.check_injective(&w))
            return fail("edge " + e.name + ": " + w);
    }
    // tree edges span the graph
    int n = vertex_count();
    std::vector<int> comp(n, -1);
    std::deque<int> q{base_};
    comp[base_] = 0;
    int seen = 1, tree_pairs = 0;
    for (const auto& e : edges_)
        if (e.in_tree && e.name.back() != '-') ++tree_pairs;
    while (!q.empty()) {
        int v = q.front();
        q.pop_front();
        for (const auto& e : edges_)
            if (e.in_tree && e.from == v && comp[e.to] < 0) {
                comp[e.to] = 0;
                ++seen;
                q.push_back(e.to);
            }
    }
    if (seen != n) return fail("tree edges do not span the graph");
    if (tree_pairs != n - 1) return fail("tree edge count is not |V|-1");
    return true;
}

GWord GraphOfGroups::identity_word(int at) const {
    GWord w;
    w.start = at;
    w.coeffs.push_back(vgroups_[at].identity());
    return w;
}

GWord GraphOfGroups::vertex_word(int at, const VE& g) const {
    GWord w;
    w.start = at;
    w.coeffs.push_back(g);
    return w;
}

int GraphOfGroups::endpoint(const GWord& w) const {
    return w.path.empty() ? w.start : edges_[w.path.back()].to;
}

bool GraphOfGroups::well_typed(const GWord& w, std::string* why) const {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    if (w.coeffs.size() != w.path.size() + 1) return fail("coefficient count");
    int at = w.start;
    for (size_t i = 0; i < w.path.size(); ++i) {
        const EdgeRec& e = edges_[w.path[i]];
        if (e.from != at) return fail("path not composable at step " + std::to_string(i));
        at = e.to;
    }
    return true;
}

i64 GraphOfGroups::coeff_norm_sum(const GWord& w) const {
    i64 s = 0;
    int at = w.start;
    for (size_t i = 0; i < w.coeffs.size(); ++i) {
        s += vgroups_[at].norm(w.coeffs[i]);
        if (i < w.path.size()) at = edges_[w.path[i]].to;
    }
    return s;
}

GWord GraphOfGroups::reduce(const GWord& w) const {
    GWord r = w;
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 1; i < r.path.size(); ++i) {
            int e_prev = r.path[i - 1];
            int e_next = r.path[i];
            if (edges_[e_prev].reverse != e_next) continue;
            const Injection& phi = edges_[e_prev].phi;          // G_e -> G_t(y)
            const Injection& phi_rev = edges_[e_next].phi;      // G_e -> G_i(y)
            auto a = phi.preimage(r.coeffs[i]);
            if (!a) continue;
            // y phi_y(a) y^-1 = phi_ybar(a)
            VE image = phi_rev.apply(*a);
            int left_vertex = edges_[e_prev].from;
            VE merged = vgroups_[left_vertex].mul(
                r.coeffs[i - 1], vgroups_[left_vertex].mul(image, r.coeffs[i + 1]));
            r.path.erase(r.path.begin() + i - 1, r.path.begin() + i + 1);
            r.coeffs.erase(r.coeffs.begin() + i, r.coeffs.begin() + i + 2);
            r.coeffs[i - 1] = merged;
            changed = true;
            break;
        }
    }
    return r;
}

bool GraphOfGroups::is_reduced(const GWord& w) const {
    for (size_t i = 1; i < w.path.size(); ++i) {
        if (edges_[w.path[i - 1]].reverse != w.path[i]) continue;
        if (edges_[w.path[i - 1]].phi.in_image(w.coeffs[i])) return false;
    }
    return true;
}

GWord GraphOfGroups::canonical(const GWord& w) const {
    GWord r = reduce(w);
    // Shuttle image factors leftward: coeffs[i] = phi_y(a) * rep becomes
    // rep, with phi_ybar(a) absorbed on the left.
    for (int i = int(r.path.size()); i >= 1; --i) {
        const EdgeRec& e = edges_[r.path[size_t(i) - 1]];
        auto [a, rep] = e.phi.factor(r.coeffs[size_t(i)]);
        if (r.coeffs[size_t(i)] == rep) continue;
        r.coeffs[size_t(i)] = rep;
        VE moved = edges_[e.reverse].phi.apply(a);
        r.coeffs[size_t(i) - 1] = vgroups_[e.from].mul(r.coeffs[size_t(i) - 1], moved);
    }
    return r;
}

GWord GraphOfGroups::norm_minimized(const GWord& w) const {
    // Every reduced spelling of the same element differs by moving edge-group
    // images across edges (one parameter a_j per edge), so the minimal
    // coefficient-norm sum is a joint minimization along the path.
    GWord r = reduce(w);
    int n = r.length();
    if (n == 0) return r;

    // Uniform Z chain (every edge Z with the same multiplier both ways):
    // coefficients become c_j + m(a_{j+1} - a_j) telescoping, so the targets
    // t_j range over t_j == c_j (mod m) with a fixed total, a separable
    // convex allocation solved greedily on marginal costs.
    bool fast = true;
    i64 m = 0;
    for (int j = 0; j < n && fast; ++j) {
        const EdgeRec& e = edges_[r.path[j]];
        if (egroups_[e.pair].kind() != VGroup::Kind::Z ||
            vgroups_[e.from].kind() != VGroup::Kind::Z ||
            vgroups_[e.to].kind() != VGroup::Kind::Z) {
            fast = false;
            break;
        }
        i64 k_fwd = e.phi.apply({1})[0];
        i64 k_rev = edges_[e.reverse].phi.apply({1})[0];
        if (k_fwd != k_rev || k_fwd == 0 || (m != 0 && k_fwd != m)) fast = false;
        m = k_fwd;
    }
    if (fast) {
        i64 am = m < 0 ? -m : m;
        std::vector<i64> c(n + 1), rmod(n + 1), t(n + 1);
        i64 sum_c = 0, sum_r = 0;
        for (int j = 0; j <= n; ++j) {
            c[j] = r.coeffs[j][0];
            rmod[j] = ((c[j] % am) + am) % am;
            t[j] = rmod[j];
            sum_c += c[j];
            sum_r += rmod[j];
        }
        i64 X = (sum_r - sum_c) / am; // downward m-steps still owed
        if (X >= 0) {
            // cheapest first steps are m - 2*rmod (negative when rmod > m/2),
            // every later step on the same term costs +m
            std::priority_queue<std::pair<i64, int>, std::vector<std::pair<i64, int>>,
                                std::greater<>> heap;
            for (int j = 0; j <= n; ++j) heap.push({am - 2 * rmod[j], j});
            for (i64 step = 0; step < X; ++step) {
                auto [delta, j] = heap.top();
                heap.pop();
                t[j] -= am;
                heap.push({am, j});
            }
            // No zero-sum pair of extra moves can help: every up-step costs
            // +m while a down-step gains at most m-2.
        } else {
            t[0] += am * (-X); // every upward step costs exactly +m
        }
        // rebuild the shuttle parameters and coefficients
        std::vector<i64> a(n + 1, 0);
        a[1] = (t[0] - c[0]) / m;
        for (int j = 1; j < n; ++j) a[j + 1] = a[j] + (t[j] - c[j]) / m;
        if (c[n] - m * a[n] != t[n])
            throw std::logic_error("norm minimization: chain reconstruction failed");
        for (int j = 0; j <= n; ++j) r.coeffs[j] = {t[j]};
        return r;
    }

    // General exact chain DP over per-edge shuttle parameters.
    i64 total = coeff_norm_sum(r);
    std::vector<std::vector<VE>> domain(n + 1);
    for (int j = 1; j <= n; ++j) {
        const VGroup& eg = egroups_[edges_[r.path[j - 1]].pair];
        if (eg.kind() == VGroup::Kind::Trivial) domain[j] = {VE{}};
        else if (eg.kind() == VGroup::Kind::Finite) domain[j] = eg.ball(1'000'000);
        else domain[j] = eg.ball(std::min<i64>(total + 1, 48));
    }
    std::vector<std::vector<i64>> cost(n + 1);
    std::vector<std::vector<int>> back(n + 1);
    cost[1].assign(domain[1].size(), 0);
    back[1].assign(domain[1].size(), -1);
    const EdgeRec& e1 = edges_[r.path[0]];
    for (size_t ai = 0; ai < domain[1].size(); ++ai) {
        VE c0 = vgroups_[e1.from].mul(r.coeffs[0],
                                      edges_[e1.reverse].phi.apply(domain[1][ai]));
        cost[1][ai] = vgroups_[e1.from].norm(c0);
    }
    for (int j = 1; j < n; ++j) {
        const EdgeRec& ej = edges_[r.path[j - 1]];
        const EdgeRec& ej1 = edges_[r.path[j]];
        const VGroup& mid = vgroups_[ej.to];
        const VGroup& eg_j = egroups_[ej.pair];
        cost[j + 1].assign(domain[j + 1].size(), -1);
        back[j + 1].assign(domain[j + 1].size(), -1);
        for (size_t bi = 0; bi < domain[j + 1].size(); ++bi) {
            for (size_t ai = 0; ai < domain[j].size(); ++ai) {
                VE cj = mid.mul(ej.phi.apply(eg_j.inv(domain[j][ai])),
                                mid.mul(r.coeffs[j],
                                        edges_[ej1.reverse].phi.apply(domain[j + 1][bi])));
                i64 cand = cost[j][ai] + mid.norm(cj);
                if (cost[j + 1][bi] < 0 || cand < cost[j + 1][bi]) {
                    cost[j + 1][bi] = cand;
                    back[j + 1][bi] = int(ai);
                }
            }
        }
    }
    const EdgeRec& en = edges_[r.path[n - 1]];
    const VGroup& last = vgroups_[en.to];
    const VGroup& eg_n = egroups_[en.pair];
    i64 best = -1;
    int best_ai = -1;
    for (size_t ai = 0; ai < domain[n].size(); ++ai) {
        VE cn = last.mul(en.phi.apply(eg_n.inv(domain[n][ai])), r.coeffs[n]);
        i64 cand = cost[n][ai] + last.norm(cn);
        if (best < 0 || cand < best) {
            best = cand;
            best_ai = int(ai);
        }
    }
    std::vector<VE> chosen(n + 1);
    int cur = best_ai;
    for (int j = n; j >= 1; --j) {
        chosen[j] = domain[j][size_t(cur)];
        cur = back[j][size_t(cur)];
    }
    GWord out = r;
    for (int j = 0; j <= n; ++j) {
        const VGroup& vg = vgroups_[j == 0 ? r.start : edges_[r.path[j - 1]].to];
        VE v = r.coeffs[j];
        if (j >= 1) {
            const EdgeRec& ej = edges_[r.path[j - 1]];
            v = vg.mul(ej.phi.apply(egroups_[ej.pair].inv(chosen[j])), v);
        }
        if (j < n) {
            const EdgeRec& ej1 = edges_[r.path[j]];
            v = vg.mul(v, edges_[ej1.reverse].phi.apply(chosen[j + 1]));
        }
        out.coeffs[j] = v;
    }
    return out;
}

GWord GraphOfGroups::mul(const GWord& a, const GWord& b) const {
    if (endpoint(a) != b.start)
        throw PreconditionError("word multiplication: path endpoints mismatch");
    GWord r;
    r.start = a.start;
    r.path = a.path;
    r.path.insert(r.path.end(), b.path.begin(), b.path.end());
    r.coeffs = a.coeffs;
    int join = endpoint(a);
    r.coeffs.back() = vgroups_[join].mul(r.coeffs.back(), b.coeffs.front());
    r.coeffs.insert(r.coeffs.end(), b.coeffs.begin() + 1, b.coeffs.end());
    return reduce(r);
}

GWord GraphOfGroups::inv(const GWord& w) const {
    GWord r;
    r.start = endpoint(w);
    int at = w.start;
    std::vector<int> vertices{at};
    for (int e : w.path) {
        at = edges_[e].to;
        vertices.push_back(at);
    }
    for (int i = int(w.path.size()) - 1; i >= 0; --i)
        r.path.push_back(edges_[w.path[size_t(i)]].reverse);
    for (int i = int(w.coeffs.size()) - 1; i >= 0; --i)
        r.coeffs.push_back(vgroups_[vertices[size_t(i)]].inv(w.coeffs[size_t(i)]));
    return r;
}

bool GraphOfGroups::equal(const GWord& a, const GWord& b) const {
    if (a.start != b.start) return false;
    GWord ca = canonical(a), cb = canonical(b);
    return ca.path == cb.path && ca.coeffs == cb.coeffs;
}

i64 GraphOfGroups::reduced_form_norm(const GWord& w) const {
    GWord r = norm_minimized(w);
    return coeff_norm_sum(r) + i64(r.path.size());
}

bool GraphOfGroups::pi1_membership(const GWord& w) const {
    return w.start == base_ && endpoint(w) == base_;
}

std::string GraphOfGroups::format(const GWord& w) const {
    std::ostringstream out;
    int at = w.start;
    out << "(" << vgroups_[at].format(w.coeffs[0]) << ")";
    for (size_t i = 0; i < w.path.size(); ++i) {
        const EdgeRec& e = edges_[w.path[i]];
        at = e.to;
        out << e.name << "(" << vgroups_[at].format(w.coeffs[i + 1]) << ")";
    }
    return out.str();
}

// ---------------------------------------------------- quotient / lifting

GraphOfGroups::QuotientWord GraphOfGroups::project_to_pi1_tree(const GWord& w) const {
    QuotientWord q;
    int at = w.start;
    for (size_t i = 0; i < w.coeffs.size(); ++i) {
        if (!vgroups_[at].is_identity(w.coeffs[i])) {
            QuotientItem it;
            it.vertex = at;
            it.coeff = w.coeffs[i];
            q.items.push_back(it);
        }
        if (i < w.path.size()) {
            const EdgeRec& e = edges_[w.path[i]];
            if (!e.in_tree) {
                QuotientItem it;
                it.is_edge = true;
                it.edge = w.path[i];
                q.items.push_back(it);
            }
            at = e.to;
        }
    }
    return q;
}

GWord GraphOfGroups::lift_from_pi1_tree(const QuotientWord& q) const {
    // tree paths between vertices
    int n = vertex_count();
    auto tree_path = [&](int from, int to) {
        std::vector<int> prev_edge(n, -1), prev(n, -1);
        std::deque<int> queue{from};
        std::vector<char> seen(n, 0);
        seen[from] = 1;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int e = 0; e < int(edges_.size()); ++e)
                if (edges_[e].in_tree && edges_[e].from == v && !seen[edges_[e].to]) {
                    seen[edges_[e].to] = 1;
                    prev[edges_[e].to] = v;
                    prev_edge[edges_[e].to] = e;
                    queue.push_back(edges_[e].to);
                }
        }
        std::vector<int> path;
        for (int v = to; v != from; v = prev[v]) path.push_back(prev_edge[v]);
        std::reverse(path.begin(), path.end());
        return path;
    };
    GWord w = identity_word(base_);
    auto append_edge = [&](int e) {
        w.path.push_back(e);
        w.coeffs.push_back(vgroups_[edges_[e].to].identity());
    };
    auto goto_vertex = [&](int v) {
        for (int e : tree_path(endpoint(w), v)) append_edge(e);
    };
    for (const auto& it : q.items) {
        if (it.is_edge) {
            goto_vertex(edges_[it.edge].from);
            append_edge(it.edge);
        } else {
            goto_vertex(it.vertex);
            w.coeffs.back() = vgroups_[it.vertex].mul(w.coeffs.back(), it.coeff);
        }
    }
    goto_vertex(base_);
    return w;
}

std::string GraphOfGroups::format_quotient(const QuotientWord& q) const {
    std::ostringstream out;
    bool first = true;
    for (const auto& it : q.items) {
        if (!first) out << "*";
        first = false;
        if (it.is_edge) out << "g[" << edges_[it.edge].name << "]";
        else
            out << vertex_names_[it.vertex] << ":"
                << vgroups_[it.vertex].format(it.coeff);
    }
    if (first) out << "1";
    return out.str();
}

// ------------------------------------------------------------ enumeration

GraphOfGroups::KBall GraphOfGroups::k_ball(i64 budget, i64 cap, bool pi1_only,
                                           bool build_space) const {
    std::map<std::string, int> seen;
    std::vector<GWord> words;
    std::vector<i64> norms;
    std::vector<std::string> labels;

    GWord id = canonical(identity_word(base_));
    words.push_back(id);
    labels.push_back(format(id));
    norms.push_back(0);
    seen[labels[0]] = 0;

    size_t layer_begin = 0, layer_end = 1;
    for (i64 layer = 1; layer <= budget && layer_begin < layer_end; ++layer) {
        for (size_t i = layer_begin; i < layer_end; ++i) {
            const GWord w = words[i];
            int at = endpoint(w);
            std::vector<GWord> nexts;
            for (const VE& g : vgroups_[at].generators()) {
                GWord w2 = w;
                w2.coeffs.back() = vgroups_[at].mul(w2.coeffs.back(), g);
                nexts.push_back(std::move(w2));
            }
            for (int e = 0; e < int(edges_.size()); ++e) {
                if (edges_[e].from != at) continue;
                GWord w2 = w;
                w2.path.push_back(e);
                w2.coeffs.push_back(vgroups_[edges_[e].to].identity());
                nexts.push_back(std::move(w2));
            }
            for (auto& w2 : nexts) {
                GWord c = canonical(w2);
                std::string lbl = format(c);
                if (seen.count(lbl)) continue;
                if (i64(words.size()) >= cap) throw BudgetExceeded("K-ball enumeration");
                seen[lbl] = int(words.size());
                words.push_back(std::move(c));
                labels.push_back(lbl);
                norms.push_back(layer);
            }
        }
        layer_begin = layer_end;
        layer_end = words.size();
    }

    // canonical (norm, label) order
    std::vector<int> order(words.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::make_pair(norms[a], labels[a]) < std::make_pair(norms[b], labels[b]);
    });

    KBall ball;
    for (int idx : order) {
        if (pi1_only && !pi1_membership(words[idx])) continue;
        ball.index[labels[idx]] = int(ball.words.size());
        ball.words.push_back(words[idx]);
        ball.labels.push_back(labels[idx]);
        ball.norms.push_back(norms[idx]);
    }

    if (build_space) {
        if (norm_formula_exact()) {
            // distances by the reduced-form norm of a^-1 b
            auto self = this;
            auto wptr = std::make_shared<std::vector<GWord>>(ball.words);
            auto dist = [self, wptr](int i, int j) {
                return self->reduced_form_norm(
                    self->mul(self->inv((*wptr)[i]), (*wptr)[j]));
            };
            ball.space = std::make_shared<BallSpace>(ball.labels, ball.norms, dist);
        } else {
            ensure_norm_map(2 * budget, cap);
            auto self = this;
            auto wptr = std::make_shared<std::vector<GWord>>(ball.words);
            auto dist = [self, wptr](int i, int j) {
                GWord d = self->canonical(self->mul(self->inv((*wptr)[i]), (*wptr)[j]));
                auto it = self->norm_map_.find(self->format(d));
                if (it == self->norm_map_.end())
                    throw BudgetExceeded("norm map lookup outside enumerated range");
                return it->second;
            };
            ball.space = std::make_shared<BallSpace>(ball.labels, ball.norms, dist);
        }
    }
    return ball;
}

bool GraphOfGroups::norm_formula_exact() const {
    // Injection pairs that rescale norms (e.g. an HNN doubling) admit
    // shorter unreduced spellings; the coefficient-sum formula is exact
    // only when both sides of every edge preserve generator norms.
    for (size_t p = 0; p < egroups_.size(); ++p) {
        const EdgeRec* fwd = nullptr;
        const EdgeRec* rev = nullptr;
        for (const auto& e : edges_)
            if (e.pair == int(p)) {
                if (!fwd) fwd = &e;
                else rev = &e;
            }
        if (!fwd || !rev) continue;
        if (egroups_[p].kind() == VGroup::Kind::Trivial) continue;
        if (egroups_[p].kind() == VGroup::Kind::Finite) continue;
        i64 nf = vgroups_[fwd->to].norm(fwd->phi.apply({1}));
        i64 nr = vgroups_[rev->to].norm(rev->phi.apply({1}));
        if (nf != nr) return false;
    }
    return true;
}

void GraphOfGroups::ensure_norm_map(i64 budget, i64 cap) const {
    if (norm_map_budget_ >= budget) return;
    KBall big = k_ball(budget, cap, false, false);
    norm_map_.clear();
    for (size_t i = 0; i < big.words.size(); ++i) norm_map_[big.labels[i]] = big.norms[i];
    norm_map_budget_ = budget;
}

// -------------------------------------------------------- Bass-Serre tree

GWord GraphOfGroups::strip_last(const GWord& w) const {
    GWord r = w;
    r.coeffs.back() = vgroups_[endpoint(w)].identity();
    return r;
}

GWord GraphOfGroups::class_rep(const GWord& w) const {
    // The class w * G_t(w) forgets the last coefficient entirely, and each
    // earlier coefficient modulo the image of the *next* edge (a type-1
    // move pushes those factors into the discarded tail).  Normalizing
    // rightward with left-coset representatives is the unique normal form.
    GWord r = strip_last(reduce(w));
    for (size_t i = 0; i + 1 < r.coeffs.size(); ++i) {
        const EdgeRec& e = edges_[r.path[i]];
        const Injection& phi_rev = edges_[e.reverse].phi; // image inside G_i(y)
        auto [rep, a] = phi_rev.right_factor(r.coeffs[i]);
        if (r.coeffs[i] == rep) continue;
        r.coeffs[i] = rep;
        VE moved = e.phi.apply(a); // phi_ybar(a) y = y phi_y(a)
        r.coeffs[i + 1] = vgroups_[e.to].mul(moved, r.coeffs[i + 1]);
    }
    r.coeffs.back() = vgroups_[endpoint(r)].identity();
    return r;
}

std::string GraphOfGroups::class_label(const GWord& w) const {
    return format(class_rep(w));
}

GraphOfGroups::TreeBall GraphOfGroups::tree_ball(i64 radius, i64 coeff_budget,
                                                 i64 cap) const {
    TreeBall tb;
    GWord root = class_rep(identity_word(base_));
    tb.reps.push_back(root);
    tb.labels.push_back(format(root));
    tb.vertex_type.push_back(base_);
    tb.edge_stabilizers.push_back("");
    tb.index[tb.labels[0]] = 0;
    tb.tree.root = 0;
    tb.tree.parent.push_back(-1);
    tb.tree.depth.push_back(0);

    size_t layer_begin = 0, layer_end = 1;
    for (i64 depth = 1; depth <= radius && layer_begin < layer_end; ++depth) {
        for (size_t vi = layer_begin; vi < layer_end; ++vi) {
            const GWord u = tb.reps[vi];
            int at = endpoint(u);
            for (int e = 0; e < int(edges_.size()); ++e) {
                if (edges_[e].from != at) continue;
                const Injection& phi_rev = edges_[edges_[e].reverse].phi;
                for (const VE& s : phi_rev.transversal(coeff_budget, cap)) {
                    GWord w = u;
                    w.coeffs.back() = vgroups_[at].mul(w.coeffs.back(), s);
                    w.path.push_back(e);
                    w.coeffs.push_back(vgroups_[edges_[e].to].identity());
                    GWord rep = class_rep(w);
                    std::string lbl = format(rep);
                    auto it = tb.index.find(lbl);
                    if (it != tb.index.end()) {
                        // stepping back to the parent is the only legal
                        // revisit in a tree
                        if (it->second != tb.tree.parent[vi])
                            throw VerificationError(
                                "non-tree-detected: revisit of " + lbl);
                        continue;
                    }
                    if (i64(tb.reps.size()) >= cap)
                        throw BudgetExceeded("tree ball enumeration");
                    int idx = int(tb.reps.size());
                    tb.index[lbl] = idx;
                    tb.reps.push_back(rep);
                    tb.labels.push_back(lbl);
                    tb.vertex_type.push_back(edges_[e].to);
                    tb.tree.parent.push_back(int(vi));
                    tb.tree.depth.push_back(int(depth));
                    tb.edge_stabilizers.push_back(
                        "(" + tb.labels[vi] + ")·" + edges_[e].name + "·pi_[" +
                        edges_[e].name + "]·" + edges_[e].name + "^-1·(" +
                        tb.labels[vi] + ")^-1");
                }
            }
        }
        layer_begin = layer_end;
        layer_end = tb.reps.size();
    }

    auto tree_copy = tb.tree;
    tb.space = std::make_shared<BallSpace>(
        tb.labels, std::vector<i64>(tb.tree.depth.begin(), tb.tree.depth.end()),
        [tree_copy](int i, int j) { return tree_copy.tree_dist(i, j); });
    return tb;
}

int GraphOfGroups::TreeBall::locate(const GraphOfGroups& g, const GWord& w) const {
    auto it = index.find(g.class_label(w));
    if (it == index.end())
        throw BudgetExceeded("word moves the base point outside the tree ball");
    return it->second;
}

// ------------------------------------------------------------ stabilizers

std::vector<GWord> GraphOfGroups::r_stabilizer(i64 R, i64 budget, i64 cap) const {
    KBall ball = k_ball(budget, cap, false, false);
    std::vector<GWord> out;
    for (const auto& w : ball.words)
        if (i64(w.length()) <= R) out.push_back(w);
    return out;
}

std::vector<GWord> GraphOfGroups::h_stratum(i64 k, i64 budget, i64 cap) const {
    KBall ball = k_ball(budget, cap, false, false);
    std::vector<GWord> out;
    for (const auto& w : ball.words)
        if (i64(w.length()) == k) out.push_back(w);
    return out;
}

GraphOfGroups::StratumPieces GraphOfGroups::stratum_pieces(i64 k, int edge, i64 r,
                                                           i64 budget, i64 cap) const {
    if (k < 1) throw PreconditionError("stratum pieces need k >= 1");
    StratumPieces out;
    KBall ball = k_ball(budget, cap, false, true);
    const EdgeRec& y = edges_[edge];
    const VGroup& tail_group = vgroups_[y.to];

    std::map<std::string, int> piece_of;
    std::vector<int> slice;
    for (int i = 0; i < int(ball.words.size()); ++i) {
        const GWord& w = ball.words[i];
        if (i64(w.length()) != k) continue;
        if (w.path.back() != edge) continue;
        slice.push_back(i);
        std::string key = class_label(w);
        auto it = piece_of.find(key);
        int p;
        if (it == piece_of.end()) {
            p = int(out.pieces.size());
            piece_of[key] = p;
            out.piece_keys.push_back(key);
            out.pieces.push_back({});
            out.truncated.push_back({});
        } else {
            p = it->second;
        }
        out.pieces[p].push_back(i);
        // Y_r: last coefficient within r of the edge-group image.
        VE z = w.coeffs.back();
        i64 dist_to_image;
        {
            i64 best = tail_group.norm(z);
            // distance to phi_y(a) over candidate a
            if (egroups_[y.pair].kind() == VGroup::Kind::Trivial) {
                dist_to_image = best;
            } else if (egroups_[y.pair].kind() == VGroup::Kind::Finite) {
                for (const VE& a : egroups_[y.pair].ball(1'000'000)) {
                    VE img = y.phi.apply(a);
                    best = std::min(best, tail_group.norm(tail_group.mul(tail_group.inv(img), z)));
                }
                dist_to_image = best;
            } else {
                auto [a, rep] = y.phi.factor(z);
                dist_to_image = tail_group.norm(rep);
            }
        }
        if (dist_to_image <= r) out.y_r.push_back(i);
        else out.truncated[p].push_back(i);
    }

    out.covers_stratum_slice = true;
    std::set<int> in_pieces;
    for (const auto& p : out.pieces) in_pieces.insert(p.begin(), p.end());
    for (int i : slice)
        if (!in_pieces.count(i)) out.covers_stratum_slice = false;

    // r-disjointness of the truncated pieces in the enumerated metric
    out.min_cross_distance = ExtRat::infinity();
    out.r_disjoint = true;
    for (size_t a = 0; a < out.truncated.size(); ++a)
        for (size_t b = a + 1; b < out.truncated.size(); ++b)
            for (int i : out.truncated[a])
                for (int j : out.truncated[b]) {
                    ExtRat d{ball.space->dist(i, j)};
                    if (d < out.min_cross_distance) out.min_cross_distance = d;
                    if (d < ExtRat(Rat(r))) out.r_disjoint = false;
                }
    std::ostringstream diag;
    diag << "pieces=" << out.pieces.size() << " slice=" << slice.size()
         << " y_r=" << out.y_r.size() << " min_cross="
         << out.min_cross_distance.str();
    out.diagnostic = diag.str();
    return out;
}

} // namespace gog
} // namespace asdim
