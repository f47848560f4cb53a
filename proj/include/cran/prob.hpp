#pragma once

// Finite-alphabet probability engine: dense joint laws, marginals,
// entropy and conditional mutual information (all in bits).

#include <bit>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <mutex>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cran {

// Tolerance ladder shared by every module.
inline constexpr double kNormalizationTol = 1e-12;
inline constexpr double kInputNormalizationTol = 1e-9;
inline constexpr double kIdentityTol = 1e-10;
inline constexpr double kMembershipTol = 1e-9;

/// Raised for malformed specs, laws and arguments.
class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Variable {
  std::string name;
  std::size_t size = 1;  // symbols are 0..size-1
};

/// Set of variables of one JointLaw, stored as a bitmask over variable positions.
class VarSet {
 public:
  constexpr VarSet() = default;
  constexpr explicit VarSet(std::uint64_t bits) : bits_(bits) {}

  static constexpr VarSet single(std::size_t position) { return VarSet{std::uint64_t{1} << position}; }

  constexpr std::uint64_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(std::size_t position) const { return (bits_ >> position) & 1U; }
  constexpr std::size_t count() const { return static_cast<std::size_t>(std::popcount(bits_)); }

  constexpr VarSet operator|(VarSet o) const { return VarSet{bits_ | o.bits_}; }
  constexpr VarSet operator&(VarSet o) const { return VarSet{bits_ & o.bits_}; }
  constexpr VarSet operator-(VarSet o) const { return VarSet{bits_ & ~o.bits_}; }
  constexpr VarSet& operator|=(VarSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  constexpr bool operator==(const VarSet&) const = default;

 private:
  std::uint64_t bits_ = 0;
};

/// Dense joint pmf over an ordered tuple of named finite-alphabet variables.
/// The tensor is row-major: the last variable varies fastest.
///
/// Immutable after construction. Entropies of marginals are memoized in a
/// mutex-guarded cache shared between copies, so concurrent queries are safe.
class JointLaw {
 public:
  JointLaw(std::vector<Variable> variables, std::vector<double> probs)
      : vars_(std::move(variables)), probs_(std::move(probs)), cache_(std::make_shared<Cache>()) {
    if (vars_.size() > 63) throw SpecError("JointLaw: at most 63 variables are supported");
    std::size_t total = 1;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i].size < 1) throw SpecError("JointLaw: variable '" + vars_[i].name + "' has an empty alphabet");
      for (std::size_t j = 0; j < i; ++j) {
        if (vars_[j].name == vars_[i].name) throw SpecError("JointLaw: duplicate variable name '" + vars_[i].name + "'");
      }
      total *= vars_[i].size;
    }
    if (probs_.size() != total) {
      throw SpecError("JointLaw: tensor has " + std::to_string(probs_.size()) + " entries, expected " +
                      std::to_string(total));
    }
    double sum = 0.0;
    for (double p : probs_) {
      if (!std::isfinite(p) || p < 0.0) throw SpecError("JointLaw: entries must be finite and nonnegative");
      sum += p;
    }
    if (std::abs(sum - 1.0) > kNormalizationTol) {
      throw SpecError("JointLaw: entries sum to " + std::to_string(sum) + ", not 1");
    }
  }

  const std::vector<Variable>& variables() const { return vars_; }
  std::size_t num_variables() const { return vars_.size(); }
  std::span<const double> probs() const { return probs_; }
  VarSet all() const { return VarSet{(std::uint64_t{1} << vars_.size()) - 1}; }

  std::size_t position(std::string_view name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (vars_[i].name == name) return i;
    }
    throw SpecError("unknown variable '" + std::string(name) + "'");
  }

  VarSet vars(std::initializer_list<std::string_view> names) const {
    VarSet s;
    for (auto n : names) s |= VarSet::single(position(n));
    return s;
  }

  VarSet vars(std::span<const std::string> names) const {
    VarSet s;
    for (const auto& n : names) s |= VarSet::single(position(n));
    return s;
  }

  std::string describe(VarSet s) const {
    std::string out = "{";
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      if (!s.contains(i)) continue;
      if (out.size() > 1) out += ",";
      out += vars_[i].name;
    }
    return out + "}";
  }

  /// Marginal pmf over `keep`, row-major in the law's variable order.
  std::vector<double> marginal(VarSet keep) const {
    check_in_range(keep);
    const std::size_t n = vars_.size();
    std::vector<std::size_t> stride(n, 0);
    std::size_t msize = 1;
    for (std::size_t v = n; v-- > 0;) {
      if (keep.contains(v)) {
        stride[v] = msize;
        msize *= vars_[v].size;
      }
    }
    std::vector<double> out(msize, 0.0);
    std::vector<std::size_t> digit(n, 0);
    std::size_t midx = 0;
    for (double p : probs_) {
      out[midx] += p;
      for (std::size_t v = n; v-- > 0;) {
        if (++digit[v] < vars_[v].size) {
          midx += stride[v];
          break;
        }
        midx -= stride[v] * (digit[v] - 1);
        digit[v] = 0;
      }
    }
    return out;
  }

  /// Shannon entropy of the marginal over `s`, in bits. H(empty) = 0.
  double entropy(VarSet s) const {
    check_in_range(s);
    if (s.empty()) return 0.0;
    {
      std::lock_guard lock(cache_->mutex);
      if (auto it = cache_->entropy.find(s.bits()); it != cache_->entropy.end()) return it->second;
    }
    double h = 0.0;
    for (double p : marginal(s)) {
      if (p > 0.0) h -= p * std::log2(p);
    }
    std::lock_guard lock(cache_->mutex);
    cache_->entropy.emplace(s.bits(), h);
    return h;
  }

 private:
  struct Cache {
    std::mutex mutex;
    std::unordered_map<std::uint64_t, double> entropy;
  };

  void check_in_range(VarSet s) const {
    if ((s - all()).bits() != 0) throw SpecError("variable set refers to positions outside the law");
  }

  std::vector<Variable> vars_;
  std::vector<double> probs_;
  std::shared_ptr<Cache> cache_;
};

inline double entropy(const JointLaw& law, VarSet a) { return law.entropy(a); }

/// I(A;B|C) = H(A,C) + H(B,C) - H(A,B,C) - H(C). Values within 1e-12 of zero
/// are returned as exactly zero.
inline double mutual_info(const JointLaw& law, VarSet a, VarSet b, VarSet c = {}) {
  auto reject = [&](VarSet overlap, const char* what) {
    throw SpecError(std::string("mutual_info: overlapping ") + what + " " + law.describe(overlap));
  };
  if (!(a & b).empty()) reject(a & b, "A/B");
  if (!(a & c).empty()) reject(a & c, "A/C");
  if (!(b & c).empty()) reject(b & c, "B/C");
  if (a.empty() || b.empty()) return 0.0;
  const double v = law.entropy(a | c) + law.entropy(b | c) - law.entropy(a | b | c) - law.entropy(c);
  return std::abs(v) <= kNormalizationTol ? 0.0 : v;
}

/// Multivariate correlation: sum of the single-variable entropies in `a` minus H(a).
inline double total_correlation(const JointLaw& law, VarSet a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < law.num_variables(); ++i) {
    if (a.contains(i)) sum += law.entropy(VarSet::single(i));
  }
  const double v = sum - law.entropy(a);
  return std::abs(v) <= kNormalizationTol ? 0.0 : v;
}

namespace detail {

// Rejects vectors off the simplex by more than kInputNormalizationTol and
// returns an exactly renormalized copy.
inline std::vector<double> normalized_row(std::span<const double> row, const std::string& what) {
  double sum = 0.0;
  for (double p : row) {
    if (!std::isfinite(p) || p < 0.0) throw SpecError(what + ": negative or non-finite probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kInputNormalizationTol) {
    throw SpecError(what + ": non-normalized (sums to " + std::to_string(sum) + ")");
  }
  std::vector<double> out(row.begin(), row.end());
  for (double& p : out) p /= sum;
  return out;
}

// Row-normalizes a conditional table laid out as rows of length `width`.
inline std::vector<double> normalized_rows(std::span<const double> table, std::size_t width, const std::string& what) {
  std::vector<double> out;
  out.reserve(table.size());
  for (std::size_t r = 0; r * width < table.size(); ++r) {
    auto row = normalized_row(table.subspan(r * width, width), what + " row " + std::to_string(r));
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

inline std::size_t product(std::span<const std::size_t> sizes) {
  return std::accumulate(sizes.begin(), sizes.end(), std::size_t{1}, std::multiplies<>());
}

}  // namespace detail

}  // namespace cran
