#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fraccrit/egraph.hpp"
#include "fraccrit/ratlp.hpp"

namespace fraccrit {

// All independent sets (including the empty set) as vertex masks, sorted ascending.
struct IndSetFamily {
    std::vector<Mask> sets;
    int index_of(Mask s) const;  // -1 if absent
    size_t size() const { return sets.size(); }
};

IndSetFamily independent_sets(const EGraph& g);
// Independent sets inside `within` only.
IndSetFamily independent_sets(const EGraph& g, Mask within);
std::vector<Mask> maximal_independent_sets(const EGraph& g);
Mask all_vertices(const EGraph& g);

// Sparse LP representation of an 11/4-coloring: weight(sets[i]) = weights[i], zero elsewhere.
// Sets are distinct, independent, sorted ascending.
struct ColoringWitness {
    std::vector<Mask> sets;
    std::vector<Rational> weights;
    Rational weight_of(Mask s) const;
};

// Exact check of: independence, nonnegativity, total 11, vertex sums 7 - d(v).
bool check_witness(const EGraph& g, const ColoringWitness& w);
// Sums weights of equal sets, drops zeros, sorts.
ColoringWitness normalize(std::vector<std::pair<Mask, Rational>> pieces);
std::string dump_witness(const EGraph& g, const ColoringWitness& w);
std::string set_name(const EGraph& g, Mask s);  // "{a,c}"

// x_I >= 0, sum x = 11, sum_{I containing v} x = 7 - d(v); variables in family order.
struct PolytopeSystem {
    IndSetFamily family;
    LinearSystem system;
};
PolytopeSystem build_polytope(const EGraph& g);

// Multipliers (total row first, then one per vertex) for the system of build_polytope.
// Verified by walking every independent set; never materializes the system.
bool verify_polytope_certificate(const EGraph& g, const Certificate& cert);

struct Colorability {
    std::optional<ColoringWitness> witness;
    Certificate certificate;  // set when witness is absent
    int rounds = 0;           // column generation rounds
};

Colorability colorability(const EGraph& g);
bool is_colorable(const EGraph& g);

// Exact fractional chromatic number of the underlying graph (ext_degree ignored).
struct FractionalChromatic {
    Rational value;
    ColoringWitness cover;          // weights on independent sets covering each vertex >= 1
    std::vector<Rational> weights;  // vertex weights, max independent weight <= 1, sum = value
};
FractionalChromatic fractional_chromatic_certified(const EGraph& g);
Rational fractional_chromatic(const EGraph& g);

// Maximum total weight of an independent set (weights >= 0), with one maximizer.
std::pair<Rational, Mask> max_weight_independent_set(const EGraph& g, const std::vector<Rational>& w);

// y(J) for every independent J of G[S], J in ascending order.
struct BoundaryProfile {
    Mask boundary = 0;
    std::vector<Mask> sets;
    std::vector<Rational> y;
    Rational value_of(Mask j) const;
};

BoundaryProfile restrict_witness(const EGraph& g, const ColoringWitness& x, Mask s);
// The profile read as a witness of induced_sub(g, s) (vertices renumbered in ascending order).
ColoringWitness profile_as_witness(const BoundaryProfile& y);

struct Extension {
    bool extends = false;
    std::optional<ColoringWitness> witness;
    Certificate certificate;
};
Extension extends(const BoundaryProfile& y, const EGraph& g);

// Glues witnesses of two e-graphs sharing the vertex names S. The union is returned with
// g1's vertices first, then g2's vertices outside S.
struct Glued {
    EGraph graph;
    ColoringWitness witness;
};
Glued glue(const EGraph& g1, const ColoringWitness& x1, const EGraph& g2, const ColoringWitness& x2);

struct PathBound {
    bool bounds_union = false;  // even k: |phi(v0) ∪ phi(vk)|; odd k: |phi(v0) ∩ phi(vk)|
    Rational bound;
};
PathBound path_extension_bound(int k, const std::vector<int>& inner_ext);

ColoringWitness convex_combine(const std::vector<ColoringWitness>& witnesses,
                               const std::vector<Rational>& lambdas);

// Finite union of half-open rational intervals, kept sorted, disjoint and non-touching.
class IntervalSet {
public:
    IntervalSet() = default;
    static IntervalSet interval(Rational a, Rational b);
    static IntervalSet full() { return interval(0, 11); }
    static IntervalSet parse(std::string_view text);  // "[0,3) [5,11)" or "" for empty

    const std::vector<std::pair<Rational, Rational>>& parts() const { return parts_; }
    Rational measure() const;
    bool empty() const { return parts_.empty(); }
    IntervalSet unite(const IntervalSet& o) const;
    IntervalSet intersect(const IntervalSet& o) const;
    IntervalSet minus(const IntervalSet& o) const;
    bool subset_of(const IntervalSet& o) const { return minus(o).empty(); }
    // Leftmost subset of the given measure; throws if too small.
    IntervalSet earliest(const Rational& m) const;
    std::string str() const;
    bool operator==(const IntervalSet& o) const { return parts_ == o.parts_; }

private:
    void add(Rational a, Rational b);
    std::vector<std::pair<Rational, Rational>> parts_;
};

using Triple = std::array<IntervalSet, 3>;

// phi(v1) ⊆ S1, phi(v2) ⊆ S2, phi(v3) ⊆ S3 of measure 4 each on the 5-cycle v1..v5 with
// v1, v2, v3 nailed; nullopt when the sets admit none.
std::optional<Triple> hall_five_cycle(const IntervalSet& s1, const IntervalSet& s2, const IntervalSet& s3);

// Measures m taken from the parts A1..A4 of [0,11) minus S2 when f(2) = 1.
std::array<Rational, 4> slack_allowance(const std::array<Rational, 4>& a);

// As above with |phi(vi) \ Si| <= f(i), f a 0/1 vector with exactly one 1.
std::optional<Triple> hall_five_cycle_slack(const IntervalSet& s1, const IntervalSet& s2,
                                            const IntervalSet& s3, const std::array<int, 3>& f);

// X of measure 2 avoiding B ∪ C with |A1 ∩ X|, |A2 ∩ X| <= 1.
IntervalSet sset_select(const IntervalSet& a1, const IntervalSet& a2, const IntervalSet& b,
                        const IntervalSet& c);

// Averaging of the colorings of G_v over all v (3-regular G of girth >= 5).
// nail_plan[v] lists distance-2 vertices of v that keep ext_degree 3 in G_v.
struct CombineResult {
    std::optional<ColoringWitness> witness;
    std::vector<int> failed;  // vertices v whose G_v is not colorable
};
EGraph vertex_deleted_egraph(const EGraph& g, int v, const std::vector<int>& keep_nailed);
CombineResult combine_vertex_deleted(const EGraph& g, const std::vector<std::vector<int>>& nail_plan,
                                     int jobs = 1);

int girth(const EGraph& g);  // 0 for forests

}  // namespace fraccrit
