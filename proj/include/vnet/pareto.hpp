#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace vnet {

// A 2-D return point (R_tran, R_tele) with a label naming its origin.
struct ReturnPoint {
  std::array<double, 2> v{0.0, 0.0};
  std::string label;
};

enum class Dominance { kStrict, kWeak, kNone };

// Componentwise dominance of a over b (maximization, tolerance for float sums).
Dominance dominates(const ReturnPoint& a, const ReturnPoint& b, double tol = 1e-9);

// Points not weakly dominated by any distinct point; duplicates collapse to one.
std::vector<ReturnPoint> pareto_front(std::span<const ReturnPoint> points, double tol = 1e-9);

// Convex coverage set: points achieving max linear utility for some preference
// on the simplex. Exact for H = 2 via the upper-right convex hull; points on
// hull segments (equality-achievers) are kept.
std::vector<ReturnPoint> ccs(std::span<const ReturnPoint> points, double tol = 1e-9);

// Area of the union of rectangles dominated by `points` above `reference`.
// Every point must dominate the reference.
double hypervolume(std::span<const ReturnPoint> points, const ReturnPoint& reference);

}  // namespace vnet
