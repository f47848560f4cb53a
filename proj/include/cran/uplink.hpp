#pragma once

// Uplink C-RAN: joint-decoding region, successive-decoding corners, and the
// corner-point procedures that connect them.

#include <string>
#include <vector>

#include "cran/prob.hpp"
#include "cran/region.hpp"

namespace cran {

/// K users with inputs X_k ~ input_pmfs[k], a channel p(y_1..y_L | x_1..x_K)
/// and L test channels p(yhat_l | y_l).
///
/// `channel` is row-major over (x_1, .., x_K, y_1, .., y_L): users outermost,
/// relay outputs innermost. `test_channels[l]` is row-major over (y_l, yhat_l).
struct UplinkSpec {
  std::vector<std::vector<double>> input_pmfs;
  std::vector<std::size_t> output_sizes;
  std::vector<double> channel;
  std::vector<std::size_t> quant_sizes;
  std::vector<std::vector<double>> test_channels;

  std::size_t users() const { return input_pmfs.size(); }
  std::size_t relays() const { return output_sizes.size(); }
  std::vector<std::size_t> input_sizes() const {
    std::vector<std::size_t> s;
    for (const auto& p : input_pmfs) s.push_back(p.size());
    return s;
  }

  bool operator==(const UplinkSpec&) const = default;
};

inline std::string input_name(std::size_t k) { return "X" + std::to_string(k + 1); }
inline std::string output_name(std::size_t l) { return "Y" + std::to_string(l + 1); }
inline std::string quant_name(std::size_t l) { return "Yhat" + std::to_string(l + 1); }

/// Joint law over (X_1..X_K, Y_1..Y_L, Yhat_1..Yhat_L) = prod p(x_k) p(y|x) prod p(yhat_l|y_l).
inline JointLaw build_uplink_joint(const UplinkSpec& spec) {
  const std::size_t K = spec.users();
  const std::size_t L = spec.relays();
  if (K == 0 && L == 0) throw SpecError("uplink spec needs at least one user or relay");
  if (spec.quant_sizes.size() != L) throw SpecError("quant_sizes: expected " + std::to_string(L) + " entries");
  if (spec.test_channels.size() != L) throw SpecError("test_channels: expected " + std::to_string(L) + " tensors");

  const auto xs = spec.input_sizes();
  std::vector<std::vector<double>> pmfs;
  for (std::size_t k = 0; k < K; ++k) {
    if (xs[k] < 1) throw SpecError("input_pmfs[" + std::to_string(k) + "]: empty alphabet");
    pmfs.push_back(detail::normalized_row(spec.input_pmfs[k], "input_pmfs[" + std::to_string(k) + "]"));
  }
  const std::size_t x_total = detail::product(xs);
  const std::size_t y_total = detail::product(spec.output_sizes);
  if (spec.channel.size() != x_total * y_total) {
    throw SpecError("channel: expected " + std::to_string(x_total * y_total) + " entries (inputs x outputs), got " +
                    std::to_string(spec.channel.size()));
  }
  const auto channel = detail::normalized_rows(spec.channel, y_total, "channel");
  std::vector<std::vector<double>> tests;
  for (std::size_t l = 0; l < L; ++l) {
    const std::size_t expect = spec.output_sizes[l] * spec.quant_sizes[l];
    if (spec.output_sizes[l] < 1 || spec.quant_sizes[l] < 1 || spec.test_channels[l].size() != expect) {
      throw SpecError("test_channels[" + std::to_string(l) + "]: expected " + std::to_string(expect) + " entries");
    }
    tests.push_back(detail::normalized_rows(spec.test_channels[l], spec.quant_sizes[l],
                                            "test_channels[" + std::to_string(l) + "]"));
  }

  std::vector<Variable> vars;
  for (std::size_t k = 0; k < K; ++k) vars.push_back({input_name(k), xs[k]});
  for (std::size_t l = 0; l < L; ++l) vars.push_back({output_name(l), spec.output_sizes[l]});
  for (std::size_t l = 0; l < L; ++l) vars.push_back({quant_name(l), spec.quant_sizes[l]});

  const std::size_t n = vars.size();
  std::size_t total = 1;
  for (const auto& v : vars) total *= v.size;
  std::vector<double> probs(total);
  std::vector<std::size_t> digit(n, 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::size_t rem = flat;
    for (std::size_t v = n; v-- > 0;) {
      digit[v] = rem % vars[v].size;
      rem /= vars[v].size;
    }
    double p = 1.0;
    std::size_t x_flat = 0;
    for (std::size_t k = 0; k < K; ++k) {
      p *= pmfs[k][digit[k]];
      x_flat = x_flat * xs[k] + digit[k];
    }
    std::size_t y_flat = 0;
    for (std::size_t l = 0; l < L; ++l) y_flat = y_flat * spec.output_sizes[l] + digit[K + l];
    p *= channel[x_flat * y_total + y_flat];
    for (std::size_t l = 0; l < L; ++l) {
      p *= tests[l][digit[K + l] * spec.quant_sizes[l] + digit[K + L + l]];
    }
    probs[flat] = p;
  }
  return JointLaw(std::move(vars), std::move(probs));
}

/// An uplink joint law together with its (K, L) layout.
class UplinkModel {
 public:
  explicit UplinkModel(const UplinkSpec& spec)
      : law_(build_uplink_joint(spec)), users_(spec.users()), relays_(spec.relays()) {}

  /// Wraps a law already laid out as (X_1..X_K, Y_1..Y_L, Yhat_1..Yhat_L).
  UplinkModel(JointLaw law, std::size_t users, std::size_t relays)
      : law_(std::move(law)), users_(users), relays_(relays) {
    if (law_.num_variables() != users + 2 * relays) throw SpecError("uplink law has the wrong number of variables");
  }

  const JointLaw& law() const { return law_; }
  std::size_t users() const { return users_; }
  std::size_t relays() const { return relays_; }

  VarSet x(IndexSet s) const { return VarSet{s.bits()}; }
  VarSet y(IndexSet t) const { return VarSet{std::uint64_t{t.bits()} << users_}; }
  VarSet yhat(IndexSet t) const { return VarSet{std::uint64_t{t.bits()} << (users_ + relays_)}; }
  VarSet x_all() const { return x(IndexSet::full(users_)); }
  IndexSet all_users() const { return IndexSet::full(users_); }
  IndexSet all_relays() const { return IndexSet::full(relays_); }

  double mi(VarSet a, VarSet b, VarSet c = {}) const { return mutual_info(law_, a, b, c); }

  /// Right-hand side of the joint-decoding constraint for (S, T):
  /// I(Y_T; Yhat_T | X_[K]) - I(X_S; Yhat_{T^c} | X_{S^c}).
  double jd_bound(IndexSet s, IndexSet t) const {
    return mi(y(t), yhat(t), x_all()) - mi(x(s), yhat(t.complement(relays_)), x(s.complement(users_)));
  }

  /// I(Y_[L]; Yhat_[L] | X_[K]), the sum-constraint value defining the dominant face.
  double sum_bound() const { return mi(y(all_relays()), yhat(all_relays()), x_all()); }

  ConstraintFamily jd_constraints() const {
    return {users_, relays_, [this](IndexSet s, IndexSet t) { return jd_bound(s, t); }};
  }

 private:
  JointLaw law_;
  std::size_t users_;
  std::size_t relays_;
};

inline void check_point_shape(const UplinkModel& m, const RateFronthaulPoint& p) {
  if (p.R.size() != m.users() || p.C.size() != m.relays()) {
    throw SpecError("point has " + std::to_string(p.R.size()) + "+" + std::to_string(p.C.size()) +
                    " coordinates, expected K=" + std::to_string(m.users()) + ", L=" + std::to_string(m.relays()));
  }
}

/// C(T) - R(S) - [I(Y_T;Yhat_T|X) - I(X_S;Yhat_{T^c}|X_{S^c})].
inline double jd_slack(const UplinkModel& m, const RateFronthaulPoint& p, IndexSet s, IndexSet t) {
  check_point_shape(m, p);
  if (!s.subset_of(m.all_users()) || !t.subset_of(m.all_relays())) throw SpecError("jd_slack: index set out of range");
  return p.fronthaul_sum(t) - p.rate_sum(s) - m.jd_bound(s, t);
}

inline double jd_min_slack(const UplinkModel& m, const RateFronthaulPoint& p) {
  check_point_shape(m, p);
  return m.jd_constraints().min_slack(p);
}

inline bool in_jd_region(const UplinkModel& m, const RateFronthaulPoint& p, double tol = kMembershipTol) {
  return jd_min_slack(m, p) >= -tol;
}

/// Extreme point of the successive-decoding region for decode order pi:
/// R_k = I(X_k; Yhat_{J_{X_k}}, X_{I_{X_k}}),
/// C_l = I(Y_l; Yhat_l) - I(Yhat_l; Yhat_{J_{Yhat_l}}, X_{I_{Yhat_l}}).
inline RateFronthaulPoint sd_corner(const UplinkModel& m, const DecodeOrder& order) {
  if (order.users() != m.users() || order.relays() != m.relays()) throw SpecError("decode order does not match model");
  RateFronthaulPoint p{std::vector<double>(m.users()), std::vector<double>(m.relays())};
  for (std::size_t pos = 0; pos < order.size(); ++pos) {
    const Element e = order[pos];
    const VarSet side_info = m.yhat(order.relays_before(pos)) | m.x(order.users_before(pos));
    if (e.side == Side::User) {
      p.R[e.index] = m.mi(m.x(IndexSet{e.index}), side_info);
    } else {
      const IndexSet l{e.index};
      p.C[e.index] = m.mi(m.y(l), m.yhat(l)) - m.mi(m.yhat(l), side_info);
    }
  }
  return p;
}

/// Solves the coordinates in `order`, each step turning the joint-decoding
/// inequality for (S, T) = (I_k + b_k, J_k) or (I_k, J_k + b_k) into an equality.
inline RateFronthaulPoint corner_iterative(const UplinkModel& m, const SolveOrder& order) {
  if (order.users() != m.users() || order.relays() != m.relays()) throw SpecError("solve order does not match model");
  const std::size_t K = m.users();
  const std::size_t L = m.relays();
  RateFronthaulPoint p{std::vector<double>(K), std::vector<double>(L)};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Element e = order[k];
    const IndexSet I = order.users_before(k);
    const IndexSet J = order.relays_before(k);
    const IndexSet b{e.index};
    if (e.side == Side::User) {
      p.R[e.index] = p.fronthaul_sum(J) - p.rate_sum(I) - m.mi(m.y(J), m.yhat(J), m.x_all()) +
                     m.mi(m.x(I | b), m.yhat(J.complement(L)), m.x(I.complement(K) - b));
    } else {
      const IndexSet Jb = J | b;
      p.C[e.index] = p.rate_sum(I) - p.fronthaul_sum(J) + m.mi(m.y(Jb), m.yhat(Jb), m.x_all()) -
                     m.mi(m.x(I), m.yhat(J.complement(L) - b), m.x(I.complement(K)));
    }
  }
  return p;
}

/// Closed form of the iterative procedure:
/// rate:      I(X_b; Yhat_{J^c} | X_{I^c \ b})
/// fronthaul: I(Y_b; Yhat_b) - I(Yhat_b; X_{I^c}, Yhat_{J^c \ b}).
inline RateFronthaulPoint corner_closed(const UplinkModel& m, const SolveOrder& order) {
  if (order.users() != m.users() || order.relays() != m.relays()) throw SpecError("solve order does not match model");
  const std::size_t K = m.users();
  const std::size_t L = m.relays();
  RateFronthaulPoint p{std::vector<double>(K), std::vector<double>(L)};
  for (std::size_t k = 0; k < order.size(); ++k) {
    const Element e = order[k];
    const IndexSet Ic = order.users_before(k).complement(K);
    const IndexSet Jc = order.relays_before(k).complement(L);
    const IndexSet b{e.index};
    if (e.side == Side::User) {
      p.R[e.index] = m.mi(m.x(b), m.yhat(Jc), m.x(Ic - b));
    } else {
      p.C[e.index] = m.mi(m.y(b), m.yhat(b)) - m.mi(m.yhat(b), m.x(Ic) | m.yhat(Jc - b));
    }
  }
  return p;
}

/// Membership plus at least K+L linearly independent active constraints.
inline CornerReport verify_corner(const UplinkModel& m, const RateFronthaulPoint& p) {
  check_point_shape(m, p);
  return check_vertex(m.jd_constraints(), p);
}

/// The decode order that reaches the same corner: the solve order read backwards.
inline DecodeOrder solve_order_to_decode_order(const SolveOrder& order) {
  std::vector<Element> seq(order.elements().rbegin(), order.elements().rend());
  return DecodeOrder(std::move(seq), order.users(), order.relays());
}

inline CornerEnumeration enumerate_corners(const UplinkModel& m, double dedup_tol = kDedupTol) {
  check_enumeration_size(m.users(), m.relays());
  CornerEnumeration out;
  for (auto& order : SolveOrder::all(m.users(), m.relays())) {
    auto p = corner_closed(m, order);
    out.corners.emplace_back(std::move(order), std::move(p));
  }
  const auto pts = out.points();
  out.vertices = dedup(pts, dedup_tol);
  return out;
}

}  // namespace cran
