#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fraccrit {

using Mask = std::uint64_t;
inline constexpr int kMaxVertices = 64;

// Graph with an external degree d(v) >= deg(v) on every vertex.
// Vertices are dense indices 0..n-1 in insertion order; each carries an opaque name.
class EGraph {
public:
    int add_vertex(std::string name, int ext = 0);
    // Raises ext of the endpoints when it would fall below the new degree.
    void add_edge(int u, int v);
    void remove_edge(int u, int v);
    void set_ext(int v, int ext);

    int size() const { return static_cast<int>(names_.size()); }
    int num_edges() const;
    const std::string& name(int v) const { return names_[v]; }
    int find(std::string_view name) const;  // -1 if absent
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }
    int ext(int v) const { return ext_[v]; }
    bool nailed(int v) const { return ext_[v] > degree(v); }
    int num_nails() const;
    bool has_edge(int u, int v) const { return (masks_[u] >> v) & 1u; }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }
    Mask neighbor_mask(int v) const { return masks_[v]; }
    std::vector<std::pair<int, int>> edges() const;

    bool subcubic() const;
    bool cubic() const;
    bool three_regular() const;
    bool triangle_free() const;
    bool valid() const;
    // First violated validity condition, or nullopt.
    std::optional<std::string> validity_problem() const;

private:
    std::vector<std::string> names_;
    std::vector<int> ext_;
    std::vector<std::vector<int>> adj_;
    std::vector<Mask> masks_;
    std::unordered_map<std::string, int> index_;
};

// Appendix grammar. Names are single characters from [A-Za-z0-9_]; a record is a run of
// statements "h:xyz;" followed by an optional nail clause of pairs "v1". Listing a vertex
// twice in the nail clause raises its ext_degree by two. Records are separated by blank
// lines and lines starting with '#' are comments.
std::vector<EGraph> parse_egraphs(std::string_view text);
EGraph parse_egraph(std::string_view text);  // exactly one record

// Renames vertices in canonical order and emits one record (no trailing newline).
// Throws std::invalid_argument for isolated vertices, which the grammar cannot express.
std::string serialize(const EGraph& g);

EGraph induced_sub(const EGraph& g, const std::vector<int>& vertices);
EGraph induced_sub(const EGraph& g, Mask vertices);
EGraph delete_vertex(const EGraph& g, int v);

struct CanonicalForm {
    std::string label;       // byte string; equal iff isomorphic preserving ext_degree
    std::vector<int> order;  // order[i] = vertex placed at canonical position i
};
CanonicalForm canonical_form(const EGraph& g);
inline std::string canonical_label(const EGraph& g) { return canonical_form(g).label; }
bool isomorphic(const EGraph& a, const EGraph& b);

// Copy of g with vertex i renamed/reindexed to position perm[i].
EGraph relabel(const EGraph& g, const std::vector<int>& perm);

struct ReplacementRule {
    EGraph pattern;      // F
    EGraph replacement;  // R
    // Boundary vertex names, shared by F and R (B = V(F) ∩ V(R) by name).
    std::vector<std::string> boundary;
};

ReplacementRule make_rule(EGraph pattern, EGraph replacement);

// Embedding: emb[p] = host vertex for pattern vertex p.
using Embedding = std::vector<int>;

std::vector<Embedding> find_boundary_embeddings(const EGraph& host, const EGraph& pattern,
                                                const std::vector<std::string>& boundary);

EGraph apply_replacement(const EGraph& host, const ReplacementRule& rule, const Embedding& emb);

}  // namespace fraccrit
