#ifndef ASDIM_METRIC_HPP
#define ASDIM_METRIC_HPP

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "asdim/exec.hpp"
#include "asdim/rational.hpp"

namespace asdim {

// A finite metric space with indexed points.  Distances are exact rationals;
// spaces coming from groups and trees are integer-valued.
class MetricSpace {
  public:
    virtual ~MetricSpace() = default;

    virtual int size() const = 0;
    virtual Rat dist(int i, int j) const = 0;
    virtual std::string label(int i) const { return std::to_string(i); }

    Rat diameter(Exec mode = Exec::Parallel) const;

    // Symmetric, zero diagonal, positive off-diagonal, triangle inequality.
    // Exhaustive on all triples up to `exhaustive_cap` points, sampled above.
    bool check_metric_axioms(int exhaustive_cap = 2000,
                             std::uint64_t seed = 1,
                             std::string* why = nullptr) const;

    // Hash of the point labels and (for small spaces) the full matrix; large
    // spaces hash a deterministic sample of distances.
    std::uint64_t content_hash() const;
};

// Explicit matrix storage (lower triangle).
class DenseSpace final : public MetricSpace {
  public:
    DenseSpace(std::vector<std::string> labels, std::vector<Rat> lower_triangle);

    int size() const override { return int(labels_.size()); }
    Rat dist(int i, int j) const override {
        if (i == j) return Rat(0);
        if (i < j) std::swap(i, j);
        return m_[size_t(i) * (i - 1) / 2 + j];
    }
    std::string label(int i) const override { return labels_[i]; }

  private:
    std::vector<std::string> labels_;
    std::vector<Rat> m_;
};

// Points with a pairwise integer distance callback; caches the matrix for
// small spaces so repeated scans stay cheap.
class BallSpace final : public MetricSpace {
  public:
    static constexpr int kCacheLimit = 6000;

    BallSpace(std::vector<std::string> labels, std::vector<i64> norms,
              std::function<i64(int, int)> pair_dist, bool want_cache = true);

    int size() const override { return int(labels_.size()); }
    Rat dist(int i, int j) const override { return Rat(dist_int(i, j)); }
    std::string label(int i) const override { return labels_[i]; }

    i64 dist_int(int i, int j) const {
        if (i == j) return 0;
        if (!cache_.empty()) {
            if (i < j) std::swap(i, j);
            return i64(cache_[size_t(i) * (i - 1) / 2 + j]);
        }
        return pair_dist_(i, j);
    }
    i64 norm(int i) const { return norms_[i]; }

  private:
    std::vector<std::string> labels_;
    std::vector<i64> norms_;
    std::function<i64(int, int)> pair_dist_;
    std::vector<std::uint16_t> cache_;
};

// A subset of another space with the inherited metric.
class SubSpace final : public MetricSpace {
  public:
    SubSpace(std::shared_ptr<const MetricSpace> parent, std::vector<int> points)
        : parent_(std::move(parent)), points_(std::move(points)) {}

    int size() const override { return int(points_.size()); }
    Rat dist(int i, int j) const override {
        return parent_->dist(points_[i], points_[j]);
    }
    std::string label(int i) const override { return parent_->label(points_[i]); }

    int parent_index(int i) const { return points_[i]; }
    const std::vector<int>& points() const { return points_; }

  private:
    std::shared_ptr<const MetricSpace> parent_;
    std::vector<int> points_;
};

// Rooted tree on the points of a space (indices shared with the space).
struct TreeGraph {
    int root = 0;
    std::vector<int> parent; // -1 at root
    std::vector<int> depth;

    int size() const { return int(parent.size()); }
    int ancestor_at(int v, int target_depth) const {
        while (depth[v] > target_depth) v = parent[v];
        return v;
    }
    i64 tree_dist(int u, int v) const {
        i64 d = 0;
        while (depth[u] > depth[v]) { u = parent[u]; ++d; }
        while (depth[v] > depth[u]) { v = parent[v]; ++d; }
        while (u != v) { u = parent[u]; v = parent[v]; d += 2; }
        return d;
    }
    // Sanity: |E| = |V|-1 with every non-root having a parent at depth-1.
    bool well_formed() const;
};

std::shared_ptr<DenseSpace> materialize(const MetricSpace& s);

} // namespace asdim

#endif
