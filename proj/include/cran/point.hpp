#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cran/orders.hpp"

namespace cran {

/// (R_1..R_K, C_1..C_L) in bits per channel use.
struct RateFronthaulPoint {
  std::vector<double> R;
  std::vector<double> C;

  double rate_sum(IndexSet s) const {
    double v = 0.0;
    for (auto i : s.members()) v += R.at(i);
    return v;
  }
  double fronthaul_sum(IndexSet t) const {
    double v = 0.0;
    for (auto j : t.members()) v += C.at(j);
    return v;
  }

  double& at(Element e) { return e.side == Side::User ? R.at(e.index) : C.at(e.index); }
  double at(Element e) const { return e.side == Side::User ? R.at(e.index) : C.at(e.index); }

  std::vector<double> flat() const {
    std::vector<double> v(R);
    v.insert(v.end(), C.begin(), C.end());
    return v;
  }

  static RateFronthaulPoint from_flat(std::size_t users, std::span<const double> v) {
    RateFronthaulPoint p;
    p.R.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(users));
    p.C.assign(v.begin() + static_cast<std::ptrdiff_t>(users), v.end());
    return p;
  }

  bool operator==(const RateFronthaulPoint&) const = default;
};

inline double max_abs_diff(const RateFronthaulPoint& a, const RateFronthaulPoint& b) {
  const auto x = a.flat();
  const auto y = b.flat();
  if (x.size() != y.size()) throw SpecError("points have different dimensions");
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) d = std::max(d, std::abs(x[i] - y[i]));
  return d;
}

inline bool all_finite(const RateFronthaulPoint& p) {
  auto f = p.flat();
  return std::all_of(f.begin(), f.end(), [](double v) { return std::isfinite(v); });
}

/// Keeps the first representative of every cluster within `tol` in the inf-norm.
inline std::vector<RateFronthaulPoint> dedup(std::span<const RateFronthaulPoint> points, double tol) {
  std::vector<RateFronthaulPoint> out;
  for (const auto& p : points) {
    bool dup = std::any_of(out.begin(), out.end(), [&](const auto& q) { return max_abs_diff(p, q) <= tol; });
    if (!dup) out.push_back(p);
  }
  return out;
}

/// True when every point of `a` is within `tol` of some point of `b` and vice versa.
inline bool same_point_set(std::span<const RateFronthaulPoint> a, std::span<const RateFronthaulPoint> b, double tol) {
  auto covered = [tol](std::span<const RateFronthaulPoint> from, std::span<const RateFronthaulPoint> to) {
    return std::all_of(from.begin(), from.end(), [&](const auto& p) {
      return std::any_of(to.begin(), to.end(), [&](const auto& q) { return max_abs_diff(p, q) <= tol; });
    });
  };
  return covered(a, b) && covered(b, a);
}

/// Normal of the hyperplane C(T) - R(S) = const in (R, C) coordinates.
inline std::vector<double> constraint_normal(std::size_t users, std::size_t relays, IndexSet s, IndexSet t) {
  std::vector<double> n(users + relays, 0.0);
  for (auto i : s.members()) n[i] = -1.0;
  for (auto j : t.members()) n[users + j] = 1.0;
  return n;
}

inline constexpr double kPivotTol = 1e-7;

/// Rank of a set of equal-length row vectors (full-pivot LU, pivot threshold `pivot_tol`).
inline std::size_t rank_of(const std::vector<std::vector<double>>& rows, double pivot_tol = kPivotTol) {
  if (rows.empty() || rows.front().empty()) return 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  lu.setThreshold(pivot_tol);
  return static_cast<std::size_t>(lu.rank());
}

/// Dimension of the affine hull of `points`.
inline std::size_t affine_rank(std::span<const RateFronthaulPoint> points, double pivot_tol = kPivotTol) {
  if (points.size() < 2) return 0;
  const auto base = points.front().flat();
  std::vector<std::vector<double>> diffs;
  for (std::size_t i = 1; i < points.size(); ++i) {
    auto v = points[i].flat();
    for (std::size_t c = 0; c < v.size(); ++c) v[c] -= base[c];
    diffs.push_back(std::move(v));
  }
  return rank_of(diffs, pivot_tol);
}

inline std::string to_string(const RateFronthaulPoint& p) {
  std::string out = "(";
  auto f = p.flat();
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(f[i]);
  }
  return out + ")";
}

}  // namespace cran
