#pragma once

#include <stdexcept>
#include <vector>

#include "fraccrit/ratlp.hpp"

namespace fraccrit {

using Point = std::vector<Rational>;

class UnboundedPolyhedron : public std::runtime_error {
public:
    explicit UnboundedPolyhedron(Point ray)
        : std::runtime_error("polyhedron is unbounded"), ray_(std::move(ray)) {}
    const Point& ray() const { return ray_; }

private:
    Point ray_;
};

// All extreme points of {x : sys}, sorted lexicographically. Empty when infeasible.
// Throws UnboundedPolyhedron (with a recession direction) for nonempty unbounded input.
std::vector<Point> enumerate_vertices(const LinearSystem& sys);

// Point is feasible and the constraints tight at it have full rank.
bool is_vertex(const LinearSystem& sys, const Point& x);

// Rank of a rational matrix (rows of equal length).
int matrix_rank(std::vector<std::vector<Rational>> rows);

}  // namespace fraccrit
