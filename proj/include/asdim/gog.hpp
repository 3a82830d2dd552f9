#ifndef ASDIM_GOG_HPP
#define ASDIM_GOG_HPP

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "asdim/groups.hpp"
#include "asdim/metric.hpp"

namespace asdim {
namespace gog {

// Vertex- and edge-group elements: coordinates for Z / Z^m, a single table
// index for finite groups, empty for the trivial group.
using VE = std::vector<i64>;

class VGroup {
  public:
    enum class Kind { Trivial, Z, Zm, Finite };

    static VGroup trivial();
    static VGroup z();
    static VGroup zm(int rank);
    static VGroup finite(std::shared_ptr<groups::FiniteTableModel> table);

    Kind kind() const { return kind_; }
    int rank() const { return rank_; }
    const groups::FiniteTableModel& table() const { return *table_; }

    VE identity() const;
    bool is_identity(const VE& a) const { return a == identity(); }
    VE mul(const VE& a, const VE& b) const;
    VE inv(const VE& a) const;
    i64 norm(const VE& a) const;
    std::string format(const VE& a) const;
    VE parse(const std::string& s) const;
    std::vector<VE> generators() const;
    std::vector<VE> ball(i64 norm_budget, i64 cap = 1'000'000) const;

  private:
    Kind kind_ = Kind::Trivial;
    int rank_ = 0;
    std::shared_ptr<groups::FiniteTableModel> table_;
};

// Injective homomorphism from an edge group into a vertex group, with image
// membership, preimage, coset factorization and transversal oracles.
class Injection {
  public:
    static Injection trivial_into(const VGroup& target);
    // Z edge group: generator c maps to `image_of_gen` in the target.
    static Injection z_into(const VGroup& target, VE image_of_gen);
    static Injection finite_into(const VGroup& source, const VGroup& target,
                                 std::vector<int> element_images);

    const VGroup& source() const { return source_; }
    const VGroup& target() const { return target_; }

    VE apply(const VE& a) const;
    bool in_image(const VE& g) const;
    std::optional<VE> preimage(const VE& g) const;

    // g = phi(a) * rep with rep the canonical representative of its right
    // coset im*g (minimal norm, format tie-break).
    std::pair<VE, VE> factor(const VE& g) const;

    // g = rep * phi(a) with rep the canonical representative of the left
    // coset g*im; for abelian targets this coincides with factor().
    std::pair<VE, VE> right_factor(const VE& g) const;

    // Canonical left-coset representatives (rep * im partition), norm <=
    // budget; these index the children of a Bass-Serre tree vertex.
    std::vector<VE> transversal(i64 norm_budget, i64 cap = 1'000'000) const;

    // Injectivity spot-check on generators and sampled products.
    bool check_injective(std::string* why = nullptr) const;

  private:
    VGroup source_;
    VGroup target_;
    VE z_image_;                  // Z source
    std::vector<int> elem_images_; // finite source
};

struct EdgeRec {
    std::string name;  // e.g. "y" / "y-"
    int from = 0;      // i(y)
    int to = 0;        // t(y)
    int reverse = 0;   // index of the opposite edge
    int pair = 0;      // edge-pair id (shared group)
    bool in_tree = false;
    Injection phi;     // G_pair -> G_to
};

// A word of type c: path of directed edges with interleaved vertex-group
// coefficients (one more coefficient than edges).
struct GWord {
    std::vector<int> path;
    std::vector<VE> coeffs;
    int start = 0; // i(c)

    int length() const { return int(path.size()); }
};

class GraphOfGroups {
  public:
    GraphOfGroups(std::vector<std::string> vertex_names,
                  std::vector<VGroup> vertex_groups, int base_vertex);

    // Adds a y / y-bar pair; phi_fwd : G_e -> G_to, phi_rev : G_e -> G_from.
    int add_edge_pair(const std::string& name, int from, int to,
                      const VGroup& edge_group, Injection phi_fwd,
                      Injection phi_rev, bool in_tree);

    int vertex_count() const { return int(vertex_names_.size()); }
    const std::string& vertex_name(int v) const { return vertex_names_[v]; }
    const VGroup& vertex_group(int v) const { return vgroups_[v]; }
    int base_vertex() const { return base_; }
    const std::vector<EdgeRec>& edges() const { return edges_; }
    const EdgeRec& edge(int e) const { return edges_[e]; }
    int edge_by_name(const std::string& n) const;

    bool validate(std::string* why = nullptr) const;

    // ---------------------------------------------------------- words
    GWord identity_word(int at) const;
    GWord vertex_word(int at, const VE& g) const;
    bool well_typed(const GWord& w, std::string* why = nullptr) const;
    int endpoint(const GWord& w) const;

    // Applies pinch moves y a y^-1 -> image(a) until none applies.
    GWord reduce(const GWord& w) const;
    bool is_reduced(const GWord& w) const;

    // Reduce, then shuttle coefficient image-parts leftward into coeffs[0],
    // leaving transversal representatives: the unique normal form used for
    // equality testing and enumeration dedup.
    GWord canonical(const GWord& w) const;

    // Reduce, then move image factors across edges wherever that shrinks
    // the coefficient-norm sum (exact for norm-preserving injections).
    GWord norm_minimized(const GWord& w) const;

    GWord mul(const GWord& a, const GWord& b) const;
    GWord inv(const GWord& w) const;
    bool equal(const GWord& a, const GWord& b) const;

    // Coefficient-norm sum plus path length of the norm-minimized reduced
    // form.  For injections that rescale norms this may exceed the true
    // extended-alphabet norm; ball enumeration always uses BFS layers.
    i64 reduced_form_norm(const GWord& w) const;

    bool pi1_membership(const GWord& w) const;

    std::string format(const GWord& w) const;

    // ------------------------------------------- quotient by tree edges
    struct QuotientItem {
        bool is_edge = false;
        int edge = -1;   // non-tree edge letter
        int vertex = -1; // coefficient location
        VE coeff;
    };
    struct QuotientWord {
        std::vector<QuotientItem> items;
    };
    QuotientWord project_to_pi1_tree(const GWord& w) const;
    // Lift of a quotient word back to a based word (tree paths inserted);
    // lift(project(w)) equals w for every closed word w.
    GWord lift_from_pi1_tree(const QuotientWord& q) const;
    std::string format_quotient(const QuotientWord& q) const;

    // ------------------------------------------------------ enumeration
    struct KBall {
        std::vector<GWord> words; // canonical forms, index order = (norm, label)
        std::vector<std::string> labels;
        std::vector<i64> norms; // BFS layers over the adjoined alphabet
        std::map<std::string, int> index;
        std::shared_ptr<BallSpace> space; // only when built with a metric
    };

    // All words with i(c) = base and extended norm <= budget, by BFS over
    // the adjoined alphabet (vertex generators and edge letters).
    KBall k_ball(i64 budget, i64 cap = groups::kDefaultElementCap,
                 bool pi1_only = false, bool build_space = false) const;

    // True norm via the BFS map when available (extends to 2*budget).
    bool norm_formula_exact() const;

    // ------------------------------------------------- Bass-Serre tree
    struct TreeBall {
        std::vector<GWord> reps; // stripped canonical class representatives
        std::vector<std::string> labels;
        std::vector<int> vertex_type; // graph vertex of each tree vertex
        TreeGraph tree;
        std::vector<std::string> edge_stabilizers; // symbolic, per non-root vertex
        std::map<std::string, int> index;
        std::shared_ptr<BallSpace> space; // tree metric

        int locate(const GraphOfGroups& g, const GWord& w) const;
    };

    TreeBall tree_ball(i64 radius, i64 coeff_budget,
                       i64 cap = groups::kDefaultElementCap) const;

    // Class representative of w * G_t(w): canonical form of the word with
    // its last coefficient stripped.
    GWord class_rep(const GWord& w) const;
    std::string class_label(const GWord& w) const;

    // ------------------------------------------------------- stabilizers
    // Reduced words with i(c) = base and path length <= R within the norm
    // budget; Prop-5 style cross-validation is done by callers against an
    // independently built tree ball.
    std::vector<GWord> r_stabilizer(i64 R, i64 budget,
                                    i64 cap = groups::kDefaultElementCap) const;
    std::vector<GWord> h_stratum(i64 k, i64 budget,
                                 i64 cap = groups::kDefaultElementCap) const;

    struct StratumPieces {
        std::vector<std::string> piece_keys;       // class label of x*y*G
        std::vector<std::vector<int>> pieces;      // indices into `ball.words`
        std::vector<std::vector<int>> truncated;   // pieces minus Y_r
        std::vector<int> y_r;                      // indices in Y_r
        bool covers_stratum_slice = false;
        bool r_disjoint = false;
        ExtRat min_cross_distance; // over truncated pieces
        std::string diagnostic;
    };

    // The coset pieces x*y*G_t(y) of the k-stratum along edge y, the strip
    // Y_r around the edge-group image, coverage and r-disjointness checks.
    StratumPieces stratum_pieces(i64 k, int edge, i64 r, i64 budget,
                                 i64 cap = groups::kDefaultElementCap) const;

  private:
    std::vector<std::string> vertex_names_;
    std::vector<VGroup> vgroups_;
    std::vector<VGroup> egroups_; // per pair
    std::vector<EdgeRec> edges_;
    int base_ = 0;

    GWord strip_last(const GWord& w) const;
    i64 coeff_norm_sum(const GWord& w) const;
    mutable std::map<std::string, i64> norm_map_; // canonical label -> true norm
    mutable i64 norm_map_budget_ = -1;
    void ensure_norm_map(i64 budget, i64 cap) const;
};

} // namespace gog
} // namespace asdim

#endif
