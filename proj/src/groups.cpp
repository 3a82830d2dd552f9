#include "asdim/groups.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

#include "asdim/error.hpp"
#include "asdim/util.hpp"

namespace asdim {
namespace groups {

// ---------------------------------------------------------------- ZmModel

ZmModel::ZmModel(int rank) : rank_(rank), standard_(true) {
    for (int i = 0; i < rank; ++i) {
        Elem e(rank, 0);
        e[i] = 1;
        gens_.push_back(e);
        e[i] = -1;
        gens_.push_back(e);
    }
}

ZmModel::ZmModel(int rank, std::vector<Elem> generators)
    : rank_(rank), standard_(false), gens_(std::move(generators)) {
    // Require S = S^-1.
    std::set<Elem> s(gens_.begin(), gens_.end());
    for (const auto& g : gens_) {
        if (!s.count(invert(g)))
            throw PreconditionError("generating set not symmetric");
        if (g == identity())
            throw PreconditionError("identity listed as generator");
    }
}

ZmModel::Elem ZmModel::multiply(const Elem& a, const Elem& b) const {
    Elem r(rank_);
    for (int i = 0; i < rank_; ++i) r[i] = checked_cast(i128(a[i]) + b[i]);
    return r;
}

ZmModel::Elem ZmModel::invert(const Elem& a) const {
    Elem r(rank_);
    for (int i = 0; i < rank_; ++i) r[i] = -a[i];
    return r;
}

std::string ZmModel::format(const Elem& e) const {
    std::string out;
    for (int i = 0; i < rank_; ++i) {
        if (i) out += ",";
        out += std::to_string(e[i]);
    }
    return out;
}

ZmModel::Elem ZmModel::parse(const std::string& s) const {
    Elem e;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, ',')) e.push_back(std::stoll(trim(cur)));
    if (int(e.size()) != rank_) throw ParseError("bad Z^m element: " + s);
    return e;
}

void ZmModel::extend_memo(i64 radius, i64 cap) const {
    if (memo_radius_ >= radius) return;
    if (memo_radius_ < 0) {
        norm_memo_.clear();
        norm_memo_[identity()] = 0;
        memo_radius_ = 0;
    }
    std::deque<Elem> frontier;
    for (const auto& [e, n] : norm_memo_)
        if (n == memo_radius_) frontier.push_back(e);
    for (i64 layer = memo_radius_ + 1; layer <= radius; ++layer) {
        std::deque<Elem> next;
        for (const auto& e : frontier) {
            for (const auto& g : gens_) {
                Elem f = multiply(e, g);
                if (norm_memo_.emplace(f, layer).second) {
                    next.push_back(f);
                    if (i64(norm_memo_.size()) > cap)
                        throw BudgetExceeded("Z^m ball enumeration");
                }
            }
        }
        frontier = std::move(next);
        memo_radius_ = layer;
        if (frontier.empty()) break;
    }
    memo_radius_ = std::max(memo_radius_, radius);
}

i64 ZmModel::norm(const Elem& e, i64 cap) const {
    if (standard_) {
        i64 n = 0;
        for (i64 c : e) n = checked_cast(i128(n) + (c < 0 ? -c : c));
        return n;
    }
    // BFS layers until found.
    for (i64 r = memo_radius_ < 0 ? 0 : memo_radius_;; ++r) {
        extend_memo(r, cap);
        auto it = norm_memo_.find(e);
        if (it != norm_memo_.end() && it->second <= r) return it->second;
        if (i64(norm_memo_.size()) > cap) throw BudgetExceeded("Z^m norm BFS");
    }
}

i64 ZmModel::metric(const Elem& a, const Elem& b, i64 cap) const {
    return norm(multiply(invert(a), b), cap);
}

CayleyBall ZmModel::ball(i64 radius, i64 cap) const {
    std::vector<Elem> elems;
    if (standard_) {
        // Enumerate the l1 ball directly.
        Elem cur(rank_, 0);
        std::function<void(int, i64)> rec = [&](int coord, i64 left) {
            if (coord == rank_) {
                elems.push_back(cur);
                return;
            }
            for (i64 v = -left; v <= left; ++v) {
                cur[coord] = v;
                rec(coord + 1, left - (v < 0 ? -v : v));
            }
            cur[coord] = 0;
        };
        rec(0, radius);
        if (i64(elems.size()) > cap) throw BudgetExceeded("Z^m ball");
    } else {
        extend_memo(radius, cap);
        for (const auto& [e, n] : norm_memo_)
            if (n <= radius) elems.push_back(e);
    }
    std::vector<std::pair<std::pair<i64, std::string>, Elem>> keyed;
    keyed.reserve(elems.size());
    for (auto& e : elems)
        keyed.push_back({{norm(e, cap), format(e)}, e});
    std::sort(keyed.begin(), keyed.end());

    auto elems_ptr = std::make_shared<std::vector<Elem>>();
    std::vector<std::string> labels;
    std::vector<i64> norms;
    for (auto& [k, e] : keyed) {
        elems_ptr->push_back(e);
        labels.push_back(k.second);
        norms.push_back(k.first);
    }
    ZmModel copy = *this;
    auto model = std::make_shared<ZmModel>(std::move(copy));
    auto dist = [model, elems_ptr, cap](int i, int j) {
        return model->metric((*elems_ptr)[i], (*elems_ptr)[j], cap);
    };
    CayleyBall ball;
    ball.radius = radius;
    ball.space = std::make_shared<BallSpace>(std::move(labels), std::move(norms), dist);
    if (rank_ == 1 && standard_) {
        // Z is a line, hence a tree rooted at 0.
        TreeGraph t;
        int n = ball.space->size();
        t.parent.assign(n, -1);
        t.depth.assign(n, 0);
        std::map<i64, int> index;
        for (int i = 0; i < n; ++i) index[(*elems_ptr)[i][0]] = i;
        t.root = index.at(0);
        for (int i = 0; i < n; ++i) {
            i64 v = (*elems_ptr)[i][0];
            if (v == 0) continue;
            t.parent[i] = index.at(v > 0 ? v - 1 : v + 1);
            t.depth[i] = int(v > 0 ? v : -v);
        }
        ball.tree = t;
    }
    return ball;
}

// -------------------------------------------------------------- FreeModel

static void free_append(std::vector<int>& w, int letter) {
    if (!w.empty() && w.back() == -letter) w.pop_back();
    else w.push_back(letter);
}

FreeModel::Elem FreeModel::multiply(const Elem& a, const Elem& b) const {
    Elem r = a;
    for (int l : b) free_append(r, l);
    return r;
}

FreeModel::Elem FreeModel::invert(const Elem& a) const {
    Elem r;
    for (auto it = a.rbegin(); it != a.rend(); ++it) r.push_back(-*it);
    return r;
}

std::string FreeModel::format(const Elem& e) const {
    if (e.empty()) return "1";
    std::string out;
    for (int l : e) {
        char c = char('a' + (l > 0 ? l : -l) - 1);
        out += l > 0 ? c : char(c - 'a' + 'A'); // capital = inverse
    }
    return out;
}

FreeModel::Elem FreeModel::parse(const std::string& s) const {
    Elem e;
    if (s == "1") return e;
    for (char c : s) {
        int l;
        if (c >= 'a' && c < 'a' + rank_) l = c - 'a' + 1;
        else if (c >= 'A' && c < 'A' + rank_) l = -(c - 'A' + 1);
        else throw ParseError(std::string("bad free-group letter: ") + c);
        free_append(e, l);
    }
    return e;
}

i64 FreeModel::metric(const Elem& a, const Elem& b) const {
    size_t common = 0;
    while (common < a.size() && common < b.size() && a[common] == b[common])
        ++common;
    return i64(a.size() + b.size() - 2 * common);
}

CayleyBall FreeModel::ball(i64 radius, i64 cap) const {
    auto elems_ptr = std::make_shared<std::vector<Elem>>();
    std::vector<std::string> labels;
    std::vector<i64> norms;
    std::vector<int> parent;

    // BFS by layers; children of w are w*l for l != -last(w).  Lexicographic
    // order of labels within a layer coincides with generation order when
    // letters are tried in label order (a < b < ... < A < ...).
    std::vector<int> letter_order;
    for (int k = 1; k <= rank_; ++k) letter_order.push_back(k);
    for (int k = 1; k <= rank_; ++k) letter_order.push_back(-k);
    std::sort(letter_order.begin(), letter_order.end(), [&](int x, int y) {
        Elem ex{x}, ey{y};
        return format(ex) < format(ey);
    });

    elems_ptr->push_back({});
    labels.push_back(format({}));
    norms.push_back(0);
    parent.push_back(-1);
    size_t layer_begin = 0, layer_end = 1;
    for (i64 r = 1; r <= radius; ++r) {
        for (size_t i = layer_begin; i < layer_end; ++i) {
            Elem w = (*elems_ptr)[i];
            for (int l : letter_order) {
                if (!w.empty() && w.back() == -l) continue;
                Elem c = w;
                c.push_back(l);
                if (i64(elems_ptr->size()) >= cap)
                    throw BudgetExceeded("free-group ball");
                elems_ptr->push_back(c);
                labels.push_back(format(c));
                norms.push_back(r);
                parent.push_back(int(i));
            }
        }
        layer_begin = layer_end;
        layer_end = elems_ptr->size();
    }

    FreeModel copy = *this;
    auto model = std::make_shared<FreeModel>(copy);
    auto dist = [model, elems_ptr](int i, int j) {
        return model->metric((*elems_ptr)[i], (*elems_ptr)[j]);
    };
    CayleyBall ball;
    ball.radius = radius;
    ball.space = std::make_shared<BallSpace>(std::move(labels), std::move(norms),
                                             dist, elems_ptr->size() <= 6000);
    TreeGraph t;
    t.root = 0;
    t.parent = std::move(parent);
    t.depth.resize(elems_ptr->size());
    for (size_t i = 0; i < elems_ptr->size(); ++i)
        t.depth[i] = int((*elems_ptr)[i].size());
    ball.tree = t;
    return ball;
}

// ------------------------------------------------------- FiniteTableModel

FiniteTableModel::FiniteTableModel(std::vector<std::string> names,
                                   std::vector<int> table, int identity,
                                   std::vector<int> generators)
    : n_(int(names.size())), names_(std::move(names)), table_(std::move(table)),
      id_(identity), gens_(std::move(generators)) {
    if (table_.size() != size_t(n_) * n_)
        throw ParseError("multiplication table size mismatch");
    inverse_.assign(n_, -1);
    for (int a = 0; a < n_; ++a)
        for (int b = 0; b < n_; ++b)
            if (multiply(a, b) == id_ && multiply(b, a) == id_) inverse_[a] = b;
    for (int a = 0; a < n_; ++a)
        if (inverse_[a] < 0) throw ParseError("element without inverse: " + names_[a]);
    // Closed generating set.
    std::set<int> s(gens_.begin(), gens_.end());
    for (int g : gens_)
        if (!s.count(inverse_[g]))
            throw PreconditionError("generating set not symmetric");
    // Norms by BFS over the whole table.
    norms_.assign(n_, -1);
    norms_[id_] = 0;
    std::deque<int> q{id_};
    while (!q.empty()) {
        int e = q.front();
        q.pop_front();
        for (int g : gens_) {
            int f = multiply(e, g);
            if (norms_[f] < 0) {
                norms_[f] = norms_[e] + 1;
                q.push_back(f);
            }
        }
    }
    for (int a = 0; a < n_; ++a)
        if (norms_[a] < 0)
            throw PreconditionError("generators do not generate: " + names_[a]);
}

FiniteTableModel::Elem FiniteTableModel::parse(const std::string& s) const {
    for (int i = 0; i < n_; ++i)
        if (names_[i] == s) return i;
    throw ParseError("unknown element: " + s);
}

CayleyBall FiniteTableModel::ball(i64 radius, i64 cap) const {
    std::vector<std::pair<std::pair<i64, std::string>, int>> keyed;
    for (int e = 0; e < n_; ++e)
        if (norms_[e] <= radius) keyed.push_back({{norms_[e], names_[e]}, e});
    if (i64(keyed.size()) > cap) throw BudgetExceeded("finite ball");
    std::sort(keyed.begin(), keyed.end());
    auto elems = std::make_shared<std::vector<int>>();
    std::vector<std::string> labels;
    std::vector<i64> norms;
    for (auto& [k, e] : keyed) {
        elems->push_back(e);
        labels.push_back(k.second);
        norms.push_back(k.first);
    }
    FiniteTableModel copy = *this;
    auto model = std::make_shared<FiniteTableModel>(copy);
    auto dist = [model, elems](int i, int j) {
        return model->metric((*elems)[i], (*elems)[j]);
    };
    CayleyBall ball;
    ball.radius = radius;
    ball.space = std::make_shared<BallSpace>(std::move(labels), std::move(norms), dist);
    return ball;
}

bool FiniteTableModel::check_axioms(std::string* why) const {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    for (int a = 0; a < n_; ++a) {
        if (multiply(a, id_) != a || multiply(id_, a) != a)
            return fail("identity not neutral at " + names_[a]);
    }
    // All triples for small tables, sampled otherwise.
    i64 budget = 200000;
    for (int a = 0; a < n_ && budget > 0; ++a)
        for (int b = 0; b < n_ && budget > 0; ++b)
            for (int c = 0; c < n_ && budget > 0; ++c, --budget)
                if (multiply(multiply(a, b), c) != multiply(a, multiply(b, c)))
                    return fail("associativity fails");
    return true;
}

} // namespace groups
} // namespace asdim
