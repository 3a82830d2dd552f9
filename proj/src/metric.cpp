#include "asdim/metric.hpp"

#include <random>
#include <sstream>

#include "asdim/kernels.hpp"
#include "asdim/util.hpp"

namespace asdim {

Rat MetricSpace::diameter(Exec mode) const {
    int n = size();
    if (n <= 1) return Rat(0);
    return kern::fold_pairs<Rat>(
        n, Rat(0), [&](int i, int j) { return dist(i, j); },
        [](const Rat& a, const Rat& b) { return max(a, b); }, mode);
}

bool MetricSpace::check_metric_axioms(int exhaustive_cap, std::uint64_t seed,
                                      std::string* why) const {
    int n = size();
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    for (int i = 0; i < n; ++i)
        if (!dist(i, i).is_zero()) return fail("nonzero self-distance at " + label(i));
    auto check_triple = [&](int i, int j, int k) {
        return dist(i, k) <= dist(i, j) + dist(j, k);
    };
    if (n <= exhaustive_cap) {
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                Rat d = dist(i, j);
                if (d != dist(j, i)) return fail("asymmetric pair");
                if (!(d > Rat(0))) return fail("zero distance for distinct points");
            }
        bool ok = !kern::any_index(
            n,
            [&](long long i) {
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k)
                        if (!check_triple(int(i), j, k)) return true;
                return false;
            },
            Exec::Parallel);
        if (!ok) return fail("triangle inequality violated");
        return true;
    }
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, n - 1);
    for (int t = 0; t < 20000; ++t) {
        int i = pick(rng), j = pick(rng), k = pick(rng);
        if (dist(i, j) != dist(j, i)) return fail("asymmetric pair (sampled)");
        if (i != j && !(dist(i, j) > Rat(0))) return fail("zero distance (sampled)");
        if (!check_triple(i, j, k)) return fail("triangle inequality violated (sampled)");
    }
    return true;
}

std::uint64_t MetricSpace::content_hash() const {
    int n = size();
    std::ostringstream out;
    out << "space " << n << "\n";
    for (int i = 0; i < n; ++i) out << label(i) << "\n";
    if (n <= 2048) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < i; ++j) out << dist(i, j).str() << " ";
    } else {
        // Deterministic sparse sample keeps hashing linear for big spaces.
        std::mt19937_64 rng(0x5eed5eed);
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (int t = 0; t < 4 * n; ++t) {
            int i = pick(rng), j = pick(rng);
            out << i << ":" << j << ":" << dist(i, j).str() << " ";
        }
    }
    return fnv64(out.str());
}

DenseSpace::DenseSpace(std::vector<std::string> labels, std::vector<Rat> lower)
    : labels_(std::move(labels)), m_(std::move(lower)) {
    size_t n = labels_.size();
    if (m_.size() != n * (n - 1) / 2)
        throw std::invalid_argument("lower-triangle size mismatch");
}

BallSpace::BallSpace(std::vector<std::string> labels, std::vector<i64> norms,
                     std::function<i64(int, int)> pair_dist, bool want_cache)
    : labels_(std::move(labels)), norms_(std::move(norms)),
      pair_dist_(std::move(pair_dist)) {
    int n = int(labels_.size());
    if (want_cache && n <= kCacheLimit && n > 1) {
        cache_.assign(size_t(n) * (n - 1) / 2, 0);
        kern::for_index(
            n,
            [&](long long i) {
                for (int j = 0; j < int(i); ++j) {
                    i64 d = pair_dist_(int(i), j);
                    if (d < 0 || d > 65535) throw OverflowError();
                    cache_[size_t(i) * (i - 1) / 2 + j] = std::uint16_t(d);
                }
            },
            Exec::Parallel);
    }
}

bool TreeGraph::well_formed() const {
    int n = size();
    if (n == 0 || root < 0 || root >= n) return false;
    if (parent[root] != -1 || depth[root] != 0) return false;
    for (int v = 0; v < n; ++v) {
        if (v == root) continue;
        if (parent[v] < 0 || parent[v] >= n) return false;
        if (depth[v] != depth[parent[v]] + 1) return false;
    }
    return true;
}

std::shared_ptr<DenseSpace> materialize(const MetricSpace& s) {
    int n = s.size();
    std::vector<std::string> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = s.label(i);
    std::vector<Rat> m(size_t(n) * (n - 1) / 2);
    kern::for_index(
        n,
        [&](long long i) {
            for (int j = 0; j < int(i); ++j)
                m[size_t(i) * (i - 1) / 2 + j] = s.dist(int(i), j);
        },
        Exec::Parallel);
    return std::make_shared<DenseSpace>(std::move(labels), std::move(m));
}

} // namespace asdim
