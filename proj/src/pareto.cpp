#include "vnet/pareto.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace vnet {

namespace {

bool weak_dominates(const ReturnPoint& a, const ReturnPoint& b, double tol) {
  return a.v[0] >= b.v[0] - tol && a.v[1] >= b.v[1] - tol;
}

bool equal_within(const ReturnPoint& a, const ReturnPoint& b, double tol) {
  return std::fabs(a.v[0] - b.v[0]) <= tol && std::fabs(a.v[1] - b.v[1]) <= tol;
}

}  // namespace

Dominance dominates(const ReturnPoint& a, const ReturnPoint& b, double tol) {
  if (!std::isfinite(a.v[0]) || !std::isfinite(a.v[1]) || !std::isfinite(b.v[0]) ||
      !std::isfinite(b.v[1]))
    throw std::domain_error("dominates: non-finite return point");
  if (!weak_dominates(a, b, tol)) return Dominance::kNone;
  const bool strictly_better = a.v[0] > b.v[0] + tol || a.v[1] > b.v[1] + tol;
  return strictly_better ? Dominance::kStrict : Dominance::kWeak;
}

std::vector<ReturnPoint> pareto_front(std::span<const ReturnPoint> points, double tol) {
  std::vector<ReturnPoint> unique;
  for (const auto& p : points) {
    bool dup = false;
    for (const auto& q : unique)
      if (equal_within(p, q, tol)) {
        dup = true;
        break;
      }
    if (!dup) unique.push_back(p);
  }

  std::vector<ReturnPoint> front;
  for (const auto& p : unique) {
    bool dominated = false;
    for (const auto& q : unique) {
      if (&q == &p) continue;
      if (weak_dominates(q, p, tol)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) front.push_back(p);
  }
  return front;
}

std::vector<ReturnPoint> ccs(std::span<const ReturnPoint> points, double tol) {
  const std::vector<ReturnPoint> front = pareto_front(points, tol);

  // A Pareto point sits on the upper-right hull iff some omega = [u, 1-u]
  // supports it against every other front point. For H = 2 each rival
  // constrains u to a half-line, so the support set is an exact interval.
  std::vector<ReturnPoint> out;
  for (const auto& p : front) {
    double lo = 0.0, hi = 1.0;
    bool feasible = true;
    for (const auto& q : front) {
      if (&q == &p) continue;
      const double a = p.v[0] - q.v[0];
      const double b = p.v[1] - q.v[1];
      // require b + u * (a - b) >= -tol
      const double slope = a - b;
      if (slope > 0.0) {
        lo = std::max(lo, (-tol - b) / slope);
      } else if (slope < 0.0) {
        hi = std::min(hi, (-tol - b) / slope);
      } else if (b < -tol) {
        feasible = false;
        break;
      }
    }
    if (feasible && lo <= hi) out.push_back(p);
  }
  return out;
}

double hypervolume(std::span<const ReturnPoint> points, const ReturnPoint& reference) {
  std::vector<ReturnPoint> pts(points.begin(), points.end());
  for (const auto& p : pts)
    if (p.v[0] < reference.v[0] || p.v[1] < reference.v[1])
      throw std::domain_error("hypervolume: point below the reference");

  std::sort(pts.begin(), pts.end(), [](const ReturnPoint& a, const ReturnPoint& b) {
    if (a.v[0] != b.v[0]) return a.v[0] > b.v[0];
    return a.v[1] > b.v[1];
  });

  double area = 0.0;
  double covered_y = reference.v[1];
  for (const auto& p : pts) {
    if (p.v[1] > covered_y) {
      area += (p.v[0] - reference.v[0]) * (p.v[1] - covered_y);
      covered_y = p.v[1];
    }
  }
  return area;
}

}  // namespace vnet
