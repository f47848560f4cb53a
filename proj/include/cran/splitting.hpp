#pragma once

// Binary rate and quantization splits, the generalized order that places the
// split parts in a decoding order, the virtual C-RAN they define, and the map
// from split parameters to points of the dominant face (with its inverse).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cran/dominant_face.hpp"
#include "cran/uplink.hpp"

namespace cran {

inline constexpr std::size_t kMaxOrderRows = 8;
inline constexpr double kSplitTol = 1e-12;

/// X ~ Bern(alpha) written as max(U, V) with U ~ Bern(alpha*eps) and
/// V ~ Bern(alpha(1-eps)/(1-alpha*eps)) independent.
struct RateSplit {
  double alpha = 0.0;
  double epsilon = 0.0;
  std::array<double, 2> p_u{};
  std::array<double, 2> p_v{};

  static std::size_t f(std::size_t u, std::size_t v) { return std::max(u, v); }

  /// Law of f(U, V) under p_U x p_V.
  std::array<double, 2> pushforward() const {
    std::array<double, 2> out{};
    for (std::size_t u = 0; u < 2; ++u) {
      for (std::size_t v = 0; v < 2; ++v) out[f(u, v)] += p_u[u] * p_v[v];
    }
    return out;
  }
};

inline RateSplit make_rate_split(double alpha_x, double epsilon) {
  if (!(alpha_x >= 0.0 && alpha_x < 1.0)) {
    throw SpecError("rate split: P(X=1) must lie in [0,1), got " + std::to_string(alpha_x));
  }
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw SpecError("rate split: epsilon must lie in [0,1]");
  RateSplit s{alpha_x, epsilon, {}, {}};
  const double u1 = alpha_x * epsilon;
  const double v1 = alpha_x * (1.0 - epsilon) / (1.0 - alpha_x * epsilon);
  s.p_u = {1.0 - u1, u1};
  s.p_v = {1.0 - v1, v1};
  return s;
}

/// p(u, v | yhat) for binary Yhat: with an independent T ~ Bern(eps),
/// (U, V) = (0, Yhat) if T = 0 and (Yhat, 0) if T = 1. Indexed [yhat][u][v].
inline std::array<std::array<std::array<double, 2>, 2>, 2> quant_split_kernel(double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw SpecError("quantization split: epsilon must lie in [0,1]");
  std::array<std::array<std::array<double, 2>, 2>, 2> k{};
  for (std::size_t yh = 0; yh < 2; ++yh) {
    k[yh][0][yh] += 1.0 - epsilon;
    k[yh][yh][0] += epsilon;
  }
  return k;
}

struct QuantSplit {
  double epsilon = 0.0;
  std::array<double, 2> p_y{};
  std::array<double, 4> test_channel{};  // [y][yhat]
  std::array<std::array<std::array<double, 2>, 2>, 2> kernel{};

  static std::size_t g(std::size_t u, std::size_t v) { return std::max(u, v); }

  /// Joint law over (Y, Yhat, U, V).
  JointLaw joint() const {
    std::vector<double> probs;
    for (std::size_t y = 0; y < 2; ++y) {
      for (std::size_t yh = 0; yh < 2; ++yh) {
        for (std::size_t u = 0; u < 2; ++u) {
          for (std::size_t v = 0; v < 2; ++v) probs.push_back(p_y[y] * test_channel[y * 2 + yh] * kernel[yh][u][v]);
        }
      }
    }
    return JointLaw({{"Y", 2}, {"Yhat", 2}, {"U", 2}, {"V", 2}}, std::move(probs));
  }

  /// Law of (Y, g(U, V)), indexed [y][g].
  std::array<double, 4> merged() const {
    std::array<double, 4> out{};
    for (std::size_t y = 0; y < 2; ++y) {
      for (std::size_t yh = 0; yh < 2; ++yh) {
        for (std::size_t u = 0; u < 2; ++u) {
          for (std::size_t v = 0; v < 2; ++v) out[y * 2 + g(u, v)] += p_y[y] * test_channel[y * 2 + yh] * kernel[yh][u][v];
        }
      }
    }
    return out;
  }
};

inline QuantSplit make_quant_split(std::span<const double> p_y, std::span<const double> test_channel, double epsilon) {
  if (p_y.size() != 2) throw SpecError("quantization split: p_Y must be binary");
  if (test_channel.size() != 4) throw SpecError("quantization split: test channel must be 2x2");
  QuantSplit s;
  s.epsilon = epsilon;
  s.kernel = quant_split_kernel(epsilon);
  const auto py = detail::normalized_row(p_y, "p_Y");
  const auto w = detail::normalized_rows(test_channel, 2, "test_channel");
  std::copy(py.begin(), py.end(), s.p_y.begin());
  std::copy(w.begin(), w.end(), s.test_channel.begin());
  return s;
}

/// Entry "ij" of a generalized order: row i, column j (both 1-based).
struct OrderLabel {
  std::size_t row = 1;
  std::size_t col = 1;
  bool operator==(const OrderLabel&) const = default;
  std::string str() const { return std::to_string(row) + std::to_string(col); }
};

/// A_[1] = (11); A_[i] places (i1, ..., i 2^{i-1}) at the odd positions and
/// A_[i-1] at the even positions.
inline std::vector<OrderLabel> generalized_order(std::size_t n) {
  if (n < 1 || n > kMaxOrderRows) throw SpecError("generalized order needs 1 <= n <= 8");
  std::vector<OrderLabel> a{{1, 1}};
  for (std::size_t i = 2; i <= n; ++i) {
    std::vector<OrderLabel> next;
    const std::size_t width = std::size_t{1} << (i - 1);
    for (std::size_t c = 1; c <= width; ++c) {
      next.push_back({i, c});
      if (c - 1 < a.size()) next.push_back(a[c - 1]);
    }
    a = std::move(next);
  }
  return a;
}

inline std::string to_string(const std::vector<OrderLabel>& order) {
  std::string out = "(";
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k) out += ",";
    out += order[k].str();
  }
  return out + ")";
}

struct ActiveIndex {
  std::size_t j = 1;
  double epsilon = 0.0;
};

/// Row i has 2^{i-1} entries and m_i = 2^{i-1} - 1 unit subintervals of
/// [0, m_i]; alpha * m_i falls in subinterval j at offset epsilon.
inline ActiveIndex alpha_to_indices(double alpha, std::size_t i) {
  if (i < 2) throw SpecError("alpha_to_indices: row index must be at least 2");
  if (i > kMaxOrderRows) throw SpecError("alpha_to_indices: row index must be at most 8");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw SpecError("alpha_to_indices: alpha must lie in [0,1]");
  const auto m = static_cast<double>((std::size_t{1} << (i - 1)) - 1);
  if (alpha >= 1.0) return {static_cast<std::size_t>(m), 1.0};
  const double scaled = alpha * m;
  const auto j = std::min(static_cast<std::size_t>(std::floor(scaled)) + 1, static_cast<std::size_t>(m));
  return {j, std::clamp(scaled - static_cast<double>(j) + 1.0, 0.0, 1.0)};
}

/// One index of the virtual C-RAN: user 1 (whole), a user part a/b, or a relay part c/d.
struct VirtualIndex {
  Side side = Side::User;
  std::size_t index = 0;  // 0-based user or relay
  int part = 0;           // 0 whole, 1 first part (a or c), 2 second part (b or d)

  bool operator==(const VirtualIndex&) const = default;

  std::string str() const {
    std::string out = std::to_string(index + 1);
    if (part == 0) return out;
    if (side == Side::User) return out + (part == 1 ? "a" : "b");
    return out + (part == 1 ? "c" : "d");
  }
};

struct SplitConfig {
  std::size_t users = 0;
  std::size_t relays = 0;
  std::vector<double> alpha;      // alpha_2 .. alpha_{K+L}
  std::vector<std::size_t> j;     // j_2 .. j_{K+L}
  std::vector<double> epsilon;    // eps_2 .. eps_{K+L}
  std::vector<VirtualIndex> order;

  /// Split parameter of user k >= 1 (0-based) or relay l.
  double user_epsilon(std::size_t k) const { return epsilon.at(k - 1); }
  double relay_epsilon(std::size_t l) const { return epsilon.at(users - 1 + l); }

  std::string order_str() const {
    std::string out = "(";
    for (std::size_t k = 0; k < order.size(); ++k) {
      if (k) out += ",";
      out += order[k].str();
    }
    return out + ")";
  }
};

/// First part of every split precedes its second part.
inline bool well_ordered(const std::vector<VirtualIndex>& order) {
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k].part != 2) continue;
    VirtualIndex first = order[k];
    first.part = 1;
    if (std::find(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), first) ==
        order.begin() + static_cast<std::ptrdiff_t>(k)) {
      return false;
    }
  }
  return true;
}

/// Reads the active entries (11, i j_i, i j_i+1) of A_[K+L] in order. Row 1 is
/// user 1, rows 2..K users 2..K, rows K+1..K+L relays 1..L; the earlier of a
/// row's two active entries is the first part.
inline std::vector<VirtualIndex> order_from_active(std::size_t users, std::size_t relays, std::span<const std::size_t> j) {
  if (users < 1 || relays < 1) throw SpecError("split order needs K >= 1 and L >= 1");
  const std::size_t n = users + relays;
  if (j.size() != n - 1) throw SpecError("split order needs K+L-1 active indices");
  for (std::size_t i = 2; i <= n; ++i) {
    const std::size_t m = (std::size_t{1} << (i - 1)) - 1;
    if (j[i - 2] < 1 || j[i - 2] > m) throw SpecError("active index j_" + std::to_string(i) + " out of range");
  }
  std::vector<VirtualIndex> out;
  std::vector<bool> seen(n + 1, false);
  for (const auto& e : generalized_order(n)) {
    if (e.row == 1) {
      out.push_back({Side::User, 0, 0});
      continue;
    }
    const std::size_t ji = j[e.row - 2];
    if (e.col != ji && e.col != ji + 1) continue;
    const int part = seen[e.row] ? 2 : 1;
    seen[e.row] = true;
    if (e.row <= users) {
      out.push_back({Side::User, e.row - 1, part});
    } else {
      out.push_back({Side::Relay, e.row - users - 1, part});
    }
  }
  return out;
}

inline SplitConfig decode_order_from_alpha(std::size_t users, std::size_t relays, std::span<const double> alpha) {
  if (users < 1 || relays < 1) throw SpecError("split order needs K >= 1 and L >= 1");
  if (alpha.size() != users + relays - 1) {
    throw SpecError("alpha must have K+L-1 = " + std::to_string(users + relays - 1) + " entries");
  }
  SplitConfig c;
  c.users = users;
  c.relays = relays;
  c.alpha.assign(alpha.begin(), alpha.end());
  for (std::size_t i = 2; i <= users + relays; ++i) {
    const auto a = alpha_to_indices(alpha[i - 2], i);
    c.j.push_back(a.j);
    c.epsilon.push_back(a.epsilon);
  }
  c.order = order_from_active(users, relays, c.j);
  return c;
}

/// Joint law of the split network: X1, X2a, X2b, ..., XKa, XKb, Y1..YL,
/// Yhat1c, Yhat1d, ..., YhatLc, YhatLd. The first part (a or c) is the split's
/// V, which carries everything at eps = 0; the second part (b or d) is U.
class VirtualCran {
 public:
  VirtualCran(JointLaw law, std::size_t users, std::size_t relays) : law_(std::move(law)), users_(users), relays_(relays) {}

  const JointLaw& law() const { return law_; }
  std::size_t users() const { return users_; }
  std::size_t relays() const { return relays_; }

  /// Position of the input or quantizer variable of a virtual index.
  std::size_t position(const VirtualIndex& v) const {
    if (v.side == Side::User) return v.index == 0 ? 0 : 1 + 2 * (v.index - 1) + static_cast<std::size_t>(v.part - 1);
    return (2 * users_ - 1) + relays_ + 2 * v.index + static_cast<std::size_t>(v.part - 1);
  }
  VarSet var(const VirtualIndex& v) const { return VarSet::single(position(v)); }
  VarSet y(std::size_t l) const { return VarSet::single(2 * users_ - 1 + l); }
  VarSet all_inputs() const { return VarSet{(std::uint64_t{1} << (2 * users_ - 1)) - 1}; }

  /// Pushes the split parts through max, giving the law over X1..XK, Y1..YL, Yhat1..YhatL.
  JointLaw merge() const {
    const auto& vars = law_.variables();
    std::vector<Variable> out_vars;
    out_vars.push_back({input_name(0), vars[0].size});
    for (std::size_t k = 1; k < users_; ++k) out_vars.push_back({input_name(k), 2});
    for (std::size_t l = 0; l < relays_; ++l) out_vars.push_back({output_name(l), vars[2 * users_ - 1 + l].size});
    for (std::size_t l = 0; l < relays_; ++l) out_vars.push_back({quant_name(l), 2});

    std::vector<std::size_t> out_strides(out_vars.size(), 1);
    for (std::size_t i = out_vars.size() - 1; i-- > 0;) out_strides[i] = out_strides[i + 1] * out_vars[i + 1].size;
    std::vector<double> out(out_strides[0] * out_vars[0].size, 0.0);

    std::vector<std::size_t> idx(vars.size(), 0);
    for (double p : law_.probs()) {
      std::size_t flat = idx[0] * out_strides[0];
      for (std::size_t k = 1; k < users_; ++k) flat += std::max(idx[2 * k - 1], idx[2 * k]) * out_strides[k];
      const std::size_t ybase = 2 * users_ - 1;
      for (std::size_t l = 0; l < relays_; ++l) flat += idx[ybase + l] * out_strides[users_ + l];
      const std::size_t qbase = ybase + relays_;
      for (std::size_t l = 0; l < relays_; ++l) {
        flat += std::max(idx[qbase + 2 * l], idx[qbase + 2 * l + 1]) * out_strides[users_ + relays_ + l];
      }
      out[flat] += p;
      for (std::size_t i = vars.size(); i-- > 0;) {
        if (++idx[i] < vars[i].size) break;
        idx[i] = 0;
      }
    }
    return JointLaw(std::move(out_vars), std::move(out));
  }

 private:
  JointLaw law_;
  std::size_t users_;
  std::size_t relays_;
};

inline VirtualCran build_virtual_cran(const UplinkSpec& spec, const SplitConfig& config) {
  const std::size_t K = spec.users();
  const std::size_t L = spec.relays();
  if (config.users != K || config.relays != L) throw SpecError("split configuration does not match the spec's K and L");
  build_uplink_joint(spec);  // validates the spec

  const auto sizes = spec.input_sizes();
  for (std::size_t k = 1; k < K; ++k) {
    if (sizes[k] != 2) throw SpecError("splitting needs a binary input alphabet for " + input_name(k));
  }
  for (std::size_t l = 0; l < L; ++l) {
    if (spec.quant_sizes[l] != 2) throw SpecError("splitting needs a binary quantizer alphabet for " + quant_name(l));
  }

  const auto p_x1 = detail::normalized_row(spec.input_pmfs[0], "input_pmfs[0]");
  std::vector<RateSplit> rate;
  for (std::size_t k = 1; k < K; ++k) {
    const auto p = detail::normalized_row(spec.input_pmfs[k], "input_pmfs[" + std::to_string(k) + "]");
    rate.push_back(make_rate_split(p[1], config.user_epsilon(k)));
  }
  const std::size_t y_total = detail::product(spec.output_sizes);
  const auto channel = detail::normalized_rows(spec.channel, y_total, "channel");

  // p(yhat_c, yhat_d | y_l) per relay, indexed [y][c*2+d].
  std::vector<std::vector<std::array<double, 4>>> quant(L);
  for (std::size_t l = 0; l < L; ++l) {
    const auto w = detail::normalized_rows(spec.test_channels[l], 2, "test_channels[" + std::to_string(l) + "]");
    const auto ker = quant_split_kernel(config.relay_epsilon(l));
    for (std::size_t y = 0; y < spec.output_sizes[l]; ++y) {
      std::array<double, 4> row{};
      for (std::size_t yh = 0; yh < 2; ++yh) {
        for (std::size_t c = 0; c < 2; ++c) {
          for (std::size_t d = 0; d < 2; ++d) row[c * 2 + d] += w[y * 2 + yh] * ker[yh][d][c];
        }
      }
      quant[l].push_back(row);
    }
  }

  std::vector<Variable> vars;
  vars.push_back({input_name(0), sizes[0]});
  for (std::size_t k = 1; k < K; ++k) {
    vars.push_back({input_name(k) + "a", 2});
    vars.push_back({input_name(k) + "b", 2});
  }
  for (std::size_t l = 0; l < L; ++l) vars.push_back({output_name(l), spec.output_sizes[l]});
  for (std::size_t l = 0; l < L; ++l) {
    vars.push_back({quant_name(l) + "c", 2});
    vars.push_back({quant_name(l) + "d", 2});
  }

  std::size_t total = 1;
  for (const auto& v : vars) total *= v.size;
  std::vector<double> probs;
  probs.reserve(total);
  std::vector<std::size_t> idx(vars.size(), 0);
  const std::size_t ybase = 2 * K - 1;
  const std::size_t qbase = ybase + L;
  for (std::size_t n = 0; n < total; ++n) {
    double p = p_x1[idx[0]];
    std::size_t x_flat = idx[0];
    for (std::size_t k = 1; k < K; ++k) {
      const std::size_t a = idx[2 * k - 1], b = idx[2 * k];
      p *= rate[k - 1].p_v[a] * rate[k - 1].p_u[b];
      x_flat = x_flat * 2 + RateSplit::f(a, b);
    }
    std::size_t y_flat = 0;
    for (std::size_t l = 0; l < L; ++l) y_flat = y_flat * spec.output_sizes[l] + idx[ybase + l];
    p *= channel[x_flat * y_total + y_flat];
    for (std::size_t l = 0; l < L; ++l) p *= quant[l][idx[ybase + l]][idx[qbase + 2 * l] * 2 + idx[qbase + 2 * l + 1]];
    probs.push_back(p);
    for (std::size_t i = vars.size(); i-- > 0;) {
      if (++idx[i] < vars[i].size) break;
      idx[i] = 0;
    }
  }
  return VirtualCran(JointLaw(std::move(vars), std::move(probs)), K, L);
}

struct BetaRates {
  std::vector<std::pair<VirtualIndex, double>> beta;  // in decoding order
  RateFronthaulPoint point;
};

/// beta = I(X_s; Yhat_J, X_I) for inputs and I(Y_l; Yhat_s | Yhat_J, X_I) for
/// quantizer parts, then R_1 = beta_1, R_k = beta_ka + beta_kb, C_l = beta_lc + beta_ld.
inline BetaRates beta_rates(const VirtualCran& vc, const SplitConfig& config) {
  if (config.users != vc.users() || config.relays != vc.relays()) throw SpecError("split configuration does not match virtual C-RAN");
  BetaRates out;
  out.point = RateFronthaulPoint{std::vector<double>(vc.users(), 0.0), std::vector<double>(vc.relays(), 0.0)};
  VarSet prior;
  for (const auto& v : config.order) {
    double b = 0.0;
    if (v.side == Side::User) {
      b = mutual_info(vc.law(), vc.var(v), prior);
      out.point.R[v.index] += b;
    } else {
      b = mutual_info(vc.law(), vc.y(v.index), vc.var(v), prior);
      out.point.C[v.index] += b;
    }
    out.beta.emplace_back(v, b);
    prior |= vc.var(v);
  }
  return out;
}

struct PsiEvaluation {
  SplitConfig config;
  BetaRates rates;
};

inline PsiEvaluation psi_details(const UplinkSpec& spec, std::span<const double> alpha) {
  auto config = decode_order_from_alpha(spec.users(), spec.relays(), alpha);
  const auto vc = build_virtual_cran(spec, config);
  auto rates = beta_rates(vc, config);
  return {std::move(config), std::move(rates)};
}

inline RateFronthaulPoint psi(const UplinkSpec& spec, std::span<const double> alpha) {
  return psi_details(spec, alpha).rates.point;
}

class OffFaceError : public SpecError {
 public:
  using SpecError::SpecError;
};

inline constexpr double kMinInversionTol = 1e-5;
inline constexpr std::size_t kInversionRestarts = 20;
inline constexpr std::size_t kMaxGridStarts = 1024;

struct InversionResult {
  bool converged = false;
  std::vector<double> alpha;
  double residual = std::numeric_limits<double>::infinity();
  std::size_t evaluations = 0;
  RateFronthaulPoint achieved;
};

namespace detail {

inline double radical_inverse(std::size_t index, std::size_t base) {
  double out = 0.0, f = 1.0 / static_cast<double>(base);
  for (; index > 0; index /= base, f /= static_cast<double>(base)) out += f * static_cast<double>(index % base);
  return out;
}

inline std::vector<double> halton(std::size_t index, std::size_t dims) {
  static constexpr std::size_t primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  std::vector<double> p(dims);
  for (std::size_t d = 0; d < dims; ++d) p[d] = radical_inverse(index, primes[d]);
  return p;
}

struct BudgetExhausted {};
struct TargetReached {};

/// Evaluation counter and incumbent for the inverse search.
class PsiObjective {
 public:
  PsiObjective(const UplinkSpec& spec, const RateFronthaulPoint& target, double tol, std::size_t budget)
      : spec_(spec), target_(target.flat()), tol_(tol), budget_(budget) {}

  /// psi(alpha) - target, flattened.
  Eigen::VectorXd residual(const std::vector<double>& alpha) {
    if (evaluations_ >= budget_) throw BudgetExhausted{};
    ++evaluations_;
    const auto p = psi(spec_, alpha).flat();
    Eigen::VectorXd r(static_cast<Eigen::Index>(p.size()));
    for (std::size_t i = 0; i < p.size(); ++i) r[static_cast<Eigen::Index>(i)] = p[i] - target_[i];
    const double inf = r.lpNorm<Eigen::Infinity>();
    if (inf < best_residual_) {
      best_residual_ = inf;
      best_alpha_ = alpha;
    }
    if (inf <= tol_) throw TargetReached{};
    return r;
  }

  std::size_t evaluations() const { return evaluations_; }
  double best_residual() const { return best_residual_; }
  const std::vector<double>& best_alpha() const { return best_alpha_; }

 private:
  const UplinkSpec& spec_;
  std::vector<double> target_;
  double tol_;
  std::size_t budget_;
  std::size_t evaluations_ = 0;
  double best_residual_ = std::numeric_limits<double>::infinity();
  std::vector<double> best_alpha_;
};

/// Box of alpha values sharing the active indices of `alpha`; psi is smooth inside it.
inline std::pair<std::vector<double>, std::vector<double>> cell_of(std::span<const double> alpha) {
  std::vector<double> lo, hi;
  for (std::size_t d = 0; d < alpha.size(); ++d) {
    const auto m = static_cast<double>((std::size_t{1} << (d + 1)) - 1);
    const auto j = static_cast<double>(alpha_to_indices(alpha[d], d + 2).j);
    lo.push_back((j - 1.0) / m);
    hi.push_back(j / m);
  }
  return {lo, hi};
}

/// Levenberg-Marquardt on |psi(alpha) - target|^2 over [0,1]^n. Steps may
/// cross cells; forward differences stay inside the current cell.
inline void refine(PsiObjective& f, std::vector<double> x, std::size_t max_steps) {
  const std::size_t n = x.size();
  auto clamp = [&](std::vector<double> v) {
    for (auto& a : v) a = std::clamp(a, 0.0, 1.0);
    return v;
  };
  x = clamp(x);
  Eigen::VectorXd r = f.residual(x);
  double lambda = 1e-3;
  double previous = r.squaredNorm();
  int stalled = 0;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const auto [lo, hi] = cell_of(x);
    Eigen::MatrixXd J(r.size(), static_cast<Eigen::Index>(n));
    for (std::size_t d = 0; d < n; ++d) {
      const double h = 1e-7;
      auto y = x;
      const double sign = y[d] + h <= hi[d] ? 1.0 : -1.0;
      y[d] += sign * h;
      J.col(static_cast<Eigen::Index>(d)) = sign * (f.residual(y) - r) / h;
    }
    const Eigen::MatrixXd JtJ = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    bool improved = false;
    while (lambda < 1e12) {
      Eigen::MatrixXd A = JtJ;
      A.diagonal().array() += lambda * (JtJ.diagonal().array() + 1e-12);
      const Eigen::VectorXd delta = A.ldlt().solve(-g);
      auto y = x;
      for (std::size_t d = 0; d < n; ++d) y[d] += delta[static_cast<Eigen::Index>(d)];
      y = clamp(y);
      if (y == x) {
        lambda *= 4.0;
        continue;
      }
      const Eigen::VectorXd ry = f.residual(y);
      if (ry.squaredNorm() < r.squaredNorm()) {
        x = std::move(y);
        r = ry;
        lambda = std::max(lambda / 3.0, 1e-9);
        improved = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!improved) return;
    stalled = previous - r.squaredNorm() < 1e-3 * previous ? stalled + 1 : 0;
    if (stalled >= 3) return;
    previous = r.squaredNorm();
  }
}

}  // namespace detail

/// Finds alpha with |psi(alpha) - target|_inf <= tol. Starts are the cell
/// corners (or just the cube vertices when there are too many), a Halton grid
/// and, when there are few enough, the centre of every cell of constant
/// active indices; starts are refined best first.
inline InversionResult invert_psi(const UplinkSpec& spec, const RateFronthaulPoint& target, double tol = 1e-4,
                                  std::size_t max_iters = 5000) {
  if (!(tol >= kMinInversionTol)) throw SpecError("invert_psi: tolerance must be at least 1e-5");
  const UplinkModel model(spec);
  check_point_shape(model, target);
  if (!on_dominant_face(model, target, kFaceTol)) throw OffFaceError("target not on dominant face: " + to_string(target));

  const std::size_t dims = spec.users() + spec.relays() - 1;
  detail::PsiObjective f(spec, target, tol, max_iters);
  try {
    // Cell corners map to corners of the dominant face; use the whole grid
    // when it is small, otherwise only the cube vertices.
    std::size_t grid = 1;
    for (std::size_t d = 0; d < dims && grid <= kMaxGridStarts; ++d) grid *= std::size_t{1} << (d + 1);
    const bool full_grid = grid <= kMaxGridStarts;
    std::vector<std::size_t> steps(dims), at(dims, 0);
    for (std::size_t d = 0; d < dims; ++d) steps[d] = full_grid ? (std::size_t{1} << (d + 1)) - 1 : 1;
    for (bool more = true; more;) {
      std::vector<double> v(dims);
      for (std::size_t e = 0; e < dims; ++e) v[e] = static_cast<double>(at[e]) / static_cast<double>(steps[e]);
      f.residual(v);
      more = false;
      for (std::size_t d = 0; d < dims && !more; ++d) {
        more = ++at[d] <= steps[d];
        if (!more) at[d] = 0;
      }
    }
    std::vector<std::pair<double, std::vector<double>>> starts;
    for (std::size_t i = 1; i <= kInversionRestarts; ++i) {
      auto v = detail::halton(i, dims);
      starts.emplace_back(f.residual(v).squaredNorm(), v);
    }
    std::size_t cells = 1;
    for (std::size_t d = 0; d < dims && cells <= kMaxGridStarts; ++d) cells *= (std::size_t{1} << (d + 1)) - 1;
    std::vector<std::size_t> cell(dims, 1);
    for (bool more = cells <= kMaxGridStarts; more;) {
      std::vector<double> centre(dims);
      for (std::size_t e = 0; e < dims; ++e) {
        const auto m = static_cast<double>((std::size_t{1} << (e + 1)) - 1);
        centre[e] = (static_cast<double>(cell[e]) - 0.5) / m;
      }
      starts.emplace_back(f.residual(centre).squaredNorm(), centre);
      more = false;
      for (std::size_t d = 0; d < dims && !more; ++d) {
        more = ++cell[d] <= (std::size_t{1} << (d + 1)) - 1;
        if (!more) cell[d] = 1;
      }
    }
    std::stable_sort(starts.begin(), starts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& s : starts) detail::refine(f, s.second, 30);
  } catch (const detail::BudgetExhausted&) {
  } catch (const detail::TargetReached&) {
  }
  InversionResult out;
  out.alpha = f.best_alpha();
  out.residual = f.best_residual();
  out.evaluations = f.evaluations();
  out.converged = out.residual <= tol;
  if (!out.alpha.empty()) out.achieved = psi(spec, out.alpha);
  return out;
}

}  // namespace cran
