#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fraccrit/coloring.hpp"
#include "fraccrit/egraph.hpp"
#include "fraccrit/polytope.hpp"

namespace fraccrit {

enum class ConstraintKind { CapLE, CupLE };

// CapLE: |phi(first) ∩ phi(second)| <= bound, CupLE: |phi(first)| <= bound, where phi(X) is
// the union of the color sets of X. Vertices are referenced by name.
struct BoundaryConstraint {
    ConstraintKind kind = ConstraintKind::CupLE;
    std::vector<std::string> first;
    std::vector<std::string> second;  // CapLE only
    Rational bound;
    bool operator==(const BoundaryConstraint&) const = default;
};

std::string describe(const BoundaryConstraint& c);

struct Configuration {
    EGraph g1;
    std::vector<std::string> boundary;
    std::vector<BoundaryConstraint> constraints;
};

struct StandardArgument {
    Configuration config;
    EGraph h;
};

Mask names_to_mask(const EGraph& g, const std::vector<std::string>& names);

// Subset-maximal union bounds and pairwise-maximal intersection bounds forced by H - S.
std::vector<BoundaryConstraint> trivial_constraints(const EGraph& h, const std::vector<std::string>& s);
bool participates_in_trivial_constraints(const EGraph& h, const std::vector<std::string>& s, int z);

// The profile (over independent subsets J of S) satisfies the constraint's condition on J.
bool constraint_counts(const EGraph& g, const BoundaryConstraint& c, Mask j);

struct CompiledConfiguration {
    Mask boundary = 0;
    IndSetFamily family;  // independent subsets of S in g1, variable order
    LinearSystem system;
};
CompiledConfiguration compile_constraints(const Configuration& cfg);

struct FailedVertex {
    BoundaryProfile profile;
    Certificate certificate;
};

struct ReducibilityReport {
    bool reducible = false;
    size_t vertices = 0;
    std::vector<FailedVertex> failures;
};

ReducibilityReport is_reducible(const Configuration& cfg, int jobs = 1);

// Reducibility under trivial_constraints(g1, S). Throws std::invalid_argument when every
// vertex outside S participates in trivial constraints.
ReducibilityReport check_excludable(const EGraph& g1, const std::vector<std::string>& s, int jobs = 1);

// Boundary variants: S vertices raised to ext_degree 3, and pairs of S vertices identified.
std::vector<Configuration> boundary_variants(const Configuration& cfg);

struct ConditionResult {
    bool pass = false;
    std::vector<std::string> notes;  // witnesses for failures, assumptions for passes
};

struct StandardArgumentReport {
    ConditionResult substitute;   // (i)
    ConditionResult reducible;    // (ii)
    ConditionResult enforced;     // (iii)
    ConditionResult catalog;      // (iv)
    bool all_pass() const { return substitute.pass && reducible.pass && enforced.pass && catalog.pass; }
};

struct StandardArgumentOptions {
    int jobs = 1;
    bool exhaustive_variants = false;
    bool check_catalog = true;
};

StandardArgumentReport check_standard_argument(const StandardArgument& arg,
                                               const std::vector<EGraph>& catalog,
                                               const StandardArgumentOptions& options = {});

// Max of the constraint's left-hand side over all 11/4-colorings of h (LP over P(h)).
// nullopt when h is not colorable.
std::optional<Rational> max_over_colorings(const EGraph& h, const BoundaryConstraint& c);

// Sections [g1], [boundary], [constraints], [h]; '#' starts a comment.
StandardArgument parse_config(std::string_view text);

}  // namespace fraccrit
