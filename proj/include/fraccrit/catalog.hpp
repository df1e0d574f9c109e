#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fraccrit/egraph.hpp"

namespace fraccrit {

// Not 11/4-colorable while every single-vertex deletion is.
bool is_critical(const EGraph& g);

class Catalog {
public:
    Catalog() = default;
    explicit Catalog(std::vector<EGraph> members);
    static Catalog parse(std::string_view text);

    const std::vector<EGraph>& members() const { return members_; }
    size_t size() const { return members_.size(); }
    const EGraph& operator[](size_t i) const { return members_[i]; }
    // Index of the member isomorphic to g.
    std::optional<size_t> find(const EGraph& g) const;
    bool contains(const EGraph& g) const { return find(g).has_value(); }
    // Pairs (earlier, later) of isomorphic members; the index keeps the earlier one.
    const std::vector<std::pair<size_t, size_t>>& duplicates() const { return duplicates_; }

private:
    std::vector<EGraph> members_;
    std::unordered_map<std::string, size_t> index_;
    std::vector<std::pair<size_t, size_t>> duplicates_;
};

// One line of a report; member is -1 for catalog-wide checks.
struct CheckEntry {
    std::string check;
    long member = -1;
    std::string site;
    bool verdict = true;
    std::string witness;
};

struct CatalogReport {
    std::vector<CheckEntry> entries;  // one summary entry per check, then failures
    bool all_pass() const;
};

CatalogReport verify_catalog(const Catalog& cat, size_t expected_count = 176, int jobs = 1);

// Underlying graph is a 5-cycle, or K4 with two matching edges each subdivided twice.
bool is_c5_graph(const EGraph& g);
bool is_k4plus_graph(const EGraph& g);

enum class ClosureRule {
    NailVertex,
    SubdivideEdgeTwice,
    AddPathBetweenNails,
    UncontractEdgeToC4,
    AddCommonNeighbor,
    AddTwoJoinedApexes,
    AttachC4,
    AttachK13,
};

inline constexpr ClosureRule kAllClosureRules[] = {
    ClosureRule::NailVertex,        ClosureRule::SubdivideEdgeTwice, ClosureRule::AddPathBetweenNails,
    ClosureRule::UncontractEdgeToC4, ClosureRule::AddCommonNeighbor, ClosureRule::AddTwoJoinedApexes,
    ClosureRule::AttachC4,          ClosureRule::AttachK13,
};

std::string_view rule_name(ClosureRule r);  // "nail", "subdivide", ...
std::optional<ClosureRule> parse_rule(std::string_view s);

// vertices: the vertex, edge ends, pair or tuple the rule acts on; empty for whole-graph rules.
// param: interior length for AddPathBetweenNails.
struct Site {
    std::vector<int> vertices;
    int param = 0;
    bool operator==(const Site&) const = default;
};
std::string describe(const EGraph& g, const Site& s);

// Admissible sites of the rule on g. For AddTwoJoinedApexes, `coincident` (if given) receives
// the number of tuples with repeated vertices, which are skipped.
std::vector<Site> closure_sites(ClosureRule rule, const EGraph& g, size_t* coincident = nullptr);

// Valid results of the rule at the site, pairwise non-isomorphic, in canonical-label order.
// Throws std::invalid_argument when the site is not admissible.
std::vector<EGraph> apply_closure(ClosureRule rule, const EGraph& g, const Site& site);

struct ClosureViolation {
    size_t member = 0;
    Site site;
    EGraph result;
};

struct ClosureReport {
    ClosureRule rule = ClosureRule::NailVertex;
    size_t members = 0;
    size_t sites = 0;
    size_t results = 0;
    size_t coincident = 0;
    std::vector<ClosureViolation> violations;  // ordered by member, then site
};

// Every result must be non-critical or isomorphic to a member. on_violation is called as
// violations are found (serialized, in completion order).
ClosureReport verify_closure(const Catalog& cat, ClosureRule rule, int jobs = 1,
                             const std::function<void(const ClosureViolation&)>& on_violation = {});

// Enumeration bound: 12 unless FRACCRIT_MAX_N is set.
int enumeration_bound();

// All valid critical e-graphs with at most max_n vertices, up to isomorphism, ordered by
// size and then canonical label. Throws std::invalid_argument above enumeration_bound().
std::vector<EGraph> enumerate_critical(int max_n, int jobs = 1);

}  // namespace fraccrit
