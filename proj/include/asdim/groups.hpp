#ifndef ASDIM_GROUPS_HPP
#define ASDIM_GROUPS_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asdim/error.hpp"
#include "asdim/metric.hpp"
#include "asdim/rational.hpp"

namespace asdim {
namespace groups {

constexpr i64 kDefaultElementCap = 2'000'000;

// A Cayley ball: elements in canonical order (norm, then label), together
// with the ambient-group word metric restricted to them.  Distances are
// ambient distances, not the path metric induced inside the ball.
struct CayleyBall {
    std::shared_ptr<BallSpace> space;
    i64 radius = 0;
    // For models whose Cayley graph is a tree (free groups, Z), the tree
    // structure on ball points.
    std::optional<TreeGraph> tree;
};

// Free abelian group of rank m.  With the standard generators the norm is
// the l1 norm; arbitrary finite symmetric generating sets fall back to BFS.
class ZmModel {
  public:
    using Elem = std::vector<i64>;

    explicit ZmModel(int rank);
    ZmModel(int rank, std::vector<Elem> generators);

    int rank() const { return rank_; }
    bool standard_gens() const { return standard_; }
    const std::vector<Elem>& generators() const { return gens_; }

    Elem identity() const { return Elem(rank_, 0); }
    Elem multiply(const Elem& a, const Elem& b) const;
    Elem invert(const Elem& a) const;
    std::string format(const Elem& e) const;
    Elem parse(const std::string& s) const;

    i64 norm(const Elem& e, i64 cap = kDefaultElementCap) const;
    i64 metric(const Elem& a, const Elem& b, i64 cap = kDefaultElementCap) const;

    CayleyBall ball(i64 radius, i64 cap = kDefaultElementCap) const;

  private:
    int rank_;
    bool standard_;
    std::vector<Elem> gens_;
    mutable std::map<Elem, i64> norm_memo_;
    mutable i64 memo_radius_ = -1;
    void extend_memo(i64 radius, i64 cap) const;
};

// Free group of rank m over letters a..; elements are reduced words,
// letters encoded as +k / -k for generator k and its inverse (1-based).
class FreeModel {
  public:
    using Elem = std::vector<int>;

    explicit FreeModel(int rank) : rank_(rank) {}

    int rank() const { return rank_; }

    Elem identity() const { return {}; }
    Elem multiply(const Elem& a, const Elem& b) const;
    Elem invert(const Elem& a) const;
    std::string format(const Elem& e) const;
    Elem parse(const std::string& s) const;

    i64 norm(const Elem& e) const { return i64(e.size()); }
    i64 metric(const Elem& a, const Elem& b) const;

    CayleyBall ball(i64 radius, i64 cap = kDefaultElementCap) const;

  private:
    int rank_;
};

// Finite group given by a full multiplication table.
class FiniteTableModel {
  public:
    using Elem = int;

    FiniteTableModel(std::vector<std::string> names, std::vector<int> table,
                     int identity, std::vector<int> generators);

    int order() const { return n_; }
    const std::vector<int>& generators() const { return gens_; }

    Elem identity() const { return id_; }
    Elem multiply(Elem a, Elem b) const { return table_[size_t(a) * n_ + b]; }
    Elem invert(Elem a) const { return inverse_[a]; }
    std::string format(Elem e) const { return names_[e]; }
    Elem parse(const std::string& s) const;

    i64 norm(Elem e) const { return norms_[e]; }
    i64 metric(Elem a, Elem b) const { return norms_[multiply(invert(a), b)]; }

    CayleyBall ball(i64 radius, i64 cap = kDefaultElementCap) const;

    // Checks associativity on sampled triples, two-sided identity/inverses.
    bool check_axioms(std::string* why = nullptr) const;

  private:
    int n_;
    std::vector<std::string> names_;
    std::vector<int> table_;
    int id_;
    std::vector<int> inverse_;
    std::vector<int> gens_;
    std::vector<i64> norms_;
};

// Generic BFS word norm over an abstract multiplication, used as the
// independent oracle in tests and for custom generating sets.
template <class Mul, class Elem>
i64 bfs_norm(const Elem& identity, const std::vector<Elem>& gens, Mul&& mul,
             const Elem& target, i64 cap) {
    if (target == identity) return 0;
    std::map<Elem, i64> seen{{identity, 0}};
    std::vector<Elem> frontier{identity};
    for (i64 layer = 1; !frontier.empty(); ++layer) {
        std::vector<Elem> next;
        for (const auto& e : frontier) {
            for (const auto& g : gens) {
                Elem f = mul(e, g);
                if (seen.emplace(f, layer).second) {
                    if (f == target) return layer;
                    next.push_back(f);
                }
            }
        }
        if (i64(seen.size()) > cap) throw BudgetExceeded("BFS norm oracle");
        frontier = std::move(next);
    }
    throw BudgetExceeded("BFS norm oracle: unreachable target");
}

} // namespace groups
} // namespace asdim

#endif
