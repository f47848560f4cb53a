#pragma once

// Downlink C-RAN: joint-encoding region, successive-encoding corners and the
// corner procedures relating them.

#include <string>
#include <vector>

#include "cran/prob.hpp"
#include "cran/region.hpp"

namespace cran {

/// Auxiliary law p(u_1..u_K, x_1..x_L), row-major with users outermost, and a
/// channel p(y_1..y_K | x_1..x_L), row-major over (x_1..x_L, y_1..y_K).
struct DownlinkSpec {
  std::vector<std::size_t> aux_sizes;     // |U_k|
  std::vector<std::size_t> input_sizes;   // |X_l|
  std::vector<std::size_t> output_sizes;  // |Y_k|
  std::vector<double> aux_joint;
  std::vector<double> channel;

  std::size_t users() const { return aux_sizes.size(); }
  std::size_t relays() const { return input_sizes.size(); }

  bool operator==(const DownlinkSpec&) const = default;
};

inline std::string aux_name(std::size_t k) { return "U" + std::to_string(k + 1); }

/// Joint law over (U_1..U_K, X_1..X_L, Y_1..Y_K) = p(u, x) p(y | x).
inline JointLaw build_downlink_joint(const DownlinkSpec& spec) {
  const std::size_t K = spec.users();
  const std::size_t L = spec.relays();
  if (K == 0 || L == 0) throw SpecError("downlink spec needs K >= 1 and L >= 1");
  if (spec.output_sizes.size() != K) throw SpecError("output_sizes: expected " + std::to_string(K) + " entries");
  for (auto sizes : {&spec.aux_sizes, &spec.input_sizes, &spec.output_sizes}) {
    for (auto s : *sizes) {
      if (s < 1) throw SpecError("alphabet sizes must be positive");
    }
  }
  const std::size_t u_total = detail::product(spec.aux_sizes);
  const std::size_t x_total = detail::product(spec.input_sizes);
  const std::size_t y_total = detail::product(spec.output_sizes);
  if (spec.aux_joint.size() != u_total * x_total) {
    throw SpecError("aux_joint: expected " + std::to_string(u_total * x_total) + " entries, got " +
                    std::to_string(spec.aux_joint.size()));
  }
  if (spec.channel.size() != x_total * y_total) {
    throw SpecError("channel: expected " + std::to_string(x_total * y_total) + " entries, got " +
                    std::to_string(spec.channel.size()));
  }
  const auto aux = detail::normalized_row(spec.aux_joint, "aux_joint");
  const auto channel = detail::normalized_rows(spec.channel, y_total, "channel");

  std::vector<Variable> vars;
  for (std::size_t k = 0; k < K; ++k) vars.push_back({aux_name(k), spec.aux_sizes[k]});
  for (std::size_t l = 0; l < L; ++l) vars.push_back({"X" + std::to_string(l + 1), spec.input_sizes[l]});
  for (std::size_t k = 0; k < K; ++k) vars.push_back({"Y" + std::to_string(k + 1), spec.output_sizes[k]});

  std::vector<double> probs;
  probs.reserve(u_total * x_total * y_total);
  for (std::size_t ux = 0; ux < u_total * x_total; ++ux) {
    const std::size_t x_flat = ux % x_total;
    for (std::size_t y = 0; y < y_total; ++y) probs.push_back(aux[ux] * channel[x_flat * y_total + y]);
  }
  return JointLaw(std::move(vars), std::move(probs));
}

class DownlinkModel {
 public:
  explicit DownlinkModel(const DownlinkSpec& spec)
      : law_(build_downlink_joint(spec)), users_(spec.users()), relays_(spec.relays()) {}

  const JointLaw& law() const { return law_; }
  std::size_t users() const { return users_; }
  std::size_t relays() const { return relays_; }

  VarSet u(IndexSet s) const { return VarSet{s.bits()}; }
  VarSet x(IndexSet t) const { return VarSet{std::uint64_t{t.bits()} << users_}; }
  VarSet y(IndexSet s) const { return VarSet{std::uint64_t{s.bits()} << (users_ + relays_)}; }

  double mi(VarSet a, VarSet b, VarSet c = {}) const { return mutual_info(law_, a, b, c); }

  /// Sum over k in S of I(U_k; Y_k).
  double direct_info(IndexSet s) const {
    double v = 0.0;
    for (auto k : s.members()) v += mi(u(IndexSet{k}), y(IndexSet{k}));
    return v;
  }

  /// I(U_S; X_T) - sum_{k in S} I(U_k; Y_k) + I*(U_S) + I*(X_T).
  double je_bound(IndexSet s, IndexSet t) const {
    return mi(u(s), x(t)) - direct_info(s) + total_correlation(law_, u(s)) + total_correlation(law_, x(t));
  }

  ConstraintFamily je_constraints() const {
    return {users_, relays_, [this](IndexSet s, IndexSet t) { return je_bound(s, t); }};
  }

 private:
  JointLaw law_;
  std::size_t users_;
  std::size_t relays_;
};

/// Multivariate correlation of A; A must lie entirely on the U side or the X side.
inline double istar(const DownlinkModel& m, VarSet a) {
  const VarSet us = m.u(IndexSet::full(m.users()));
  const VarSet xs = m.x(IndexSet::full(m.relays()));
  if (!(a - us).empty() && !(a - xs).empty()) throw SpecError("istar: set " + m.law().describe(a) + " mixes U and X variables");
  return total_correlation(m.law(), a);
}

inline void check_point_shape(const DownlinkModel& m, const RateFronthaulPoint& p) {
  if (p.R.size() != m.users() || p.C.size() != m.relays()) throw SpecError("point dimension does not match downlink model");
}

inline double je_slack(const DownlinkModel& m, const RateFronthaulPoint& p, IndexSet s, IndexSet t) {
  check_point_shape(m, p);
  return p.fronthaul_sum(t) - p.rate_sum(s) - m.je_bound(s, t);
}

inline bool in_je_region(const DownlinkModel& m, const RateFronthaulPoint& p, double tol = kMembershipTol) {
  check_point_shape(m, p);
  return m.je_constraints().min_slack(p) >= -tol;
}

/// Coordinates below -tol; the joint-encoding region lives in the nonnegative orthant.
inline std::vector<Element> negative_coordinates(const RateFronthaulPoint& p, double tol = kMembershipTol) {
  std::vector<Element> out;
  for (std::size_t k = 0; k < p.R.size(); ++k) {
    if (p.R[k] < -tol) out.push_back({Side::User, k});
  }
  for (std::size_t l = 0; l < p.C.size(); ++l) {
    if (p.C[l] < -tol) out.push_back({Side::Relay, l});
  }
  return out;
}

/// R_k = I(U_k;Y_k) - I(U_k; U_{I_{U_k}}, X_{J_{U_k}}),  C_l = I(X_l; U_{I_{X_l}}, X_{J_{X_l}}).
inline RateFronthaulPoint se_corner(const DownlinkModel& m, const EncodeOrder& order) {
  if (order.users() != m.users() || order.relays() != m.relays()) throw SpecError("encode order does not match model");
  RateFronthaulPoint p{std::vector<double>(m.users()), std::vector<double>(m.relays())};
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const Element e = order[pos];
    const VarSet prior = m.u(order.users_before(pos)) | m.x(order.relays_before(pos));
    const IndexSet b{e.index};
    if (e.side == Side::User) {
      p.R[e.index] = m.mi(m.u(b), m.y(b)) - m.mi(m.u(b), prior);
    } else {
      p.C[e.index] = m.mi(m.x(b), prior);
    }
  }
  return p;
}

inline RateFronthaulPoint downlink_corner_iterative(const DownlinkModel& m, const SolveOrder& order) {
  if (order.users() != m.users() || order.relays() != m.relays()) throw SpecError("solve order does not match model");
  const auto& law = m.law();
  RateFronthaulPoint p{std::vector<double>(m.users()), std::vector<double>(m.relays())};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Element e = order[k];
    const IndexSet I = order.users_before(k);
    const IndexSet J = order.relays_before(k);
    if (e.side == Side::User) {
      const IndexSet Ib = I.with(e.index);
      p.R[e.index] = p.fronthaul_sum(J) - p.rate_sum(I) + m.direct_info(Ib) - total_correlation(law, m.u(Ib)) -
                     total_correlation(law, m.x(J)) - m.mi(m.u(Ib), m.x(J));
    } else {
      const IndexSet Jb = J.with(e.index);
      p.C[e.index] = p.rate_sum(I) - p.fronthaul_sum(J) - m.direct_info(I) + total_correlation(law, m.u(I)) +
                     total_correlation(law, m.x(Jb)) + m.mi(m.u(I), m.x(Jb));
    }
  }
  return p;
}

/// Closed form: rate I(U_b;Y_b) - I(U_b; U_I, X_J), fronthaul I(X_b; U_I, X_J).
inline RateFronthaulPoint downlink_corner_closed(const DownlinkModel& m, const SolveOrder& order) {
  if (order.users() != m.users() || order.relays() != m.relays()) throw SpecError("solve order does not match model");
  RateFronthaulPoint p{std::vector<double>(m.users()), std::vector<double>(m.relays())};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Element e = order[k];
    const VarSet prior = m.u(order.users_before(k)) | m.x(order.relays_before(k));
    const IndexSet b{e.index};
    if (e.side == Side::User) {
      p.R[e.index] = m.mi(m.u(b), m.y(b)) - m.mi(m.u(b), prior);
    } else {
      p.C[e.index] = m.mi(m.x(b), prior);
    }
  }
  return p;
}

/// The encode order reaching the same corner: the solve order itself (no reversal).
inline EncodeOrder solve_order_to_encode_order(const SolveOrder& order) {
  return EncodeOrder(order.elements(), order.users(), order.relays());
}

inline CornerReport verify_downlink_corner(const DownlinkModel& m, const RateFronthaulPoint& p) {
  check_point_shape(m, p);
  return check_vertex(m.je_constraints(), p);
}

inline CornerEnumeration downlink_enumerate_corners(const DownlinkModel& m, double dedup_tol = kDedupTol) {
  check_enumeration_size(m.users(), m.relays());
  CornerEnumeration out;
  for (auto& order : SolveOrder::all(m.users(), m.relays())) {
    auto p = downlink_corner_closed(m, order);
    out.corners.emplace_back(std::move(order), std::move(p));
  }
  const auto pts = out.points();
  out.vertices = dedup(pts, dedup_tol);
  return out;
}

}  // namespace cran
