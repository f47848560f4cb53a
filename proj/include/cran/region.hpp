#pragma once

// Generic machinery for polyhedra of the form
//   { (R, C) : C(T) - R(S) >= g(S, T) for all S ⊆ [K], T ⊆ [L] },
// which is the shape of both the joint-decoding (uplink) and joint-encoding
// (downlink) rate-fronthaul regions and of every sub-face used below.

#include <algorithm>
#include <functional>
#include <limits>
#include <utility>
#include <vector>

#include "cran/point.hpp"

namespace cran {

inline constexpr double kActiveTol = 1e-8;
inline constexpr double kDedupTol = 1e-8;
inline constexpr std::size_t kMaxEnumerationDim = 8;

struct ConstraintFamily {
  std::size_t users = 0;
  std::size_t relays = 0;
  std::function<double(IndexSet, IndexSet)> bound;  // g(S, T)

  double slack(const RateFronthaulPoint& p, IndexSet s, IndexSet t) const {
    return p.fronthaul_sum(t) - p.rate_sum(s) - bound(s, t);
  }

  double min_slack(const RateFronthaulPoint& p) const {
    double m = std::numeric_limits<double>::infinity();
    for (auto s : subsets_of(IndexSet::full(users))) {
      for (auto t : subsets_of(IndexSet::full(relays))) m = std::min(m, slack(p, s, t));
    }
    return m;
  }

  bool contains(const RateFronthaulPoint& p, double tol) const { return min_slack(p) >= -tol; }
};

struct ActiveConstraint {
  IndexSet users;
  IndexSet relays;
  double slack = 0.0;
};

struct CornerReport {
  bool in_region = false;
  double min_slack = 0.0;
  std::vector<ActiveConstraint> active;
  std::size_t rank = 0;
  std::size_t required_rank = 0;
  bool pass = false;
};

inline CornerReport check_vertex(const ConstraintFamily& family, const RateFronthaulPoint& p,
                                 double membership_tol = kMembershipTol, double active_tol = kActiveTol,
                                 double pivot_tol = kPivotTol) {
  CornerReport r;
  r.required_rank = family.users + family.relays;
  r.min_slack = family.min_slack(p);
  r.in_region = all_finite(p) && r.min_slack >= -membership_tol;
  std::vector<std::vector<double>> normals;
  for (auto s : subsets_of(IndexSet::full(family.users))) {
    for (auto t : subsets_of(IndexSet::full(family.relays))) {
      const double sl = family.slack(p, s, t);
      if (std::abs(sl) <= active_tol) {
        r.active.push_back({s, t, sl});
        normals.push_back(constraint_normal(family.users, family.relays, s, t));
      }
    }
  }
  r.rank = rank_of(normals, pivot_tol);
  r.pass = r.in_region && r.rank >= r.required_rank;
  return r;
}

/// Vertex obtained by fixing coordinates in `order`, each pushed as far as the
/// constraints among already-fixed coordinates allow: rates as large as
/// possible, fronthaul loads as small as possible.
inline RateFronthaulPoint greedy_vertex(const ConstraintFamily& family, const SolveOrder& order) {
  RateFronthaulPoint p{std::vector<double>(family.users, 0.0), std::vector<double>(family.relays, 0.0)};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Element e = order[k];
    const auto prior_users = subsets_of(order.users_before(k));
    const auto prior_relays = subsets_of(order.relays_before(k));
    if (e.side == Side::User) {
      double best = std::numeric_limits<double>::infinity();
      for (auto a : prior_users) {
        for (auto b : prior_relays) {
          best = std::min(best, p.fronthaul_sum(b) - p.rate_sum(a) - family.bound(a.with(e.index), b));
        }
      }
      p.R[e.index] = best;
    } else {
      double best = -std::numeric_limits<double>::infinity();
      for (auto a : prior_users) {
        for (auto b : prior_relays) {
          best = std::max(best, family.bound(a, b.with(e.index)) + p.rate_sum(a) - p.fronthaul_sum(b));
        }
      }
      p.C[e.index] = best;
    }
  }
  return p;
}

inline void check_enumeration_size(std::size_t users, std::size_t relays) {
  if (users + relays > kMaxEnumerationDim) {
    throw SpecError("corner enumeration needs K+L <= " + std::to_string(kMaxEnumerationDim) + ", got " +
                    std::to_string(users + relays));
  }
}

/// Greedy vertices for every solve order, deduplicated.
inline std::vector<RateFronthaulPoint> greedy_vertices(const ConstraintFamily& family, double tol = kDedupTol) {
  check_enumeration_size(family.users, family.relays);
  std::vector<RateFronthaulPoint> pts;
  for (const auto& order : SolveOrder::all(family.users, family.relays)) pts.push_back(greedy_vertex(family, order));
  return dedup(pts, tol);
}

struct CornerEnumeration {
  std::vector<std::pair<SolveOrder, RateFronthaulPoint>> corners;  // one per permutation
  std::vector<RateFronthaulPoint> vertices;                        // deduplicated

  std::vector<RateFronthaulPoint> points() const {
    std::vector<RateFronthaulPoint> v;
    for (const auto& c : corners) v.push_back(c.second);
    return v;
  }
};

}  // namespace cran
