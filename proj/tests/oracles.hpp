#pragma once

// Brute-force reference computations built without the library's tensor
// code: joints are assembled tuple by tuple into a map and information
// measures are summed directly from their log-ratio definitions.

#include <cmath>
#include <map>
#include <vector>

#include "cran/downlink.hpp"
#include "cran/uplink.hpp"

namespace oracle {

using Tuple = std::vector<std::size_t>;

struct Table {
  std::vector<std::size_t> sizes;
  std::map<Tuple, double> p;
};

inline double h2(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

// Calls f(t) for every tuple t of the mixed-radix space `sizes`.
template <class F>
void for_each_tuple(const std::vector<std::size_t>& sizes, F&& f) {
  Tuple t(sizes.size(), 0);
  while (true) {
    f(t);
    std::size_t i = sizes.size();
    while (i > 0) {
      --i;
      if (++t[i] < sizes[i]) break;
      t[i] = 0;
      if (i == 0) return;
    }
    if (sizes.empty()) return;
  }
}

inline std::size_t flat(const Tuple& t, std::size_t from, std::size_t count, const std::vector<std::size_t>& sizes) {
  std::size_t idx = 0;
  for (std::size_t i = from; i < from + count; ++i) idx = idx * sizes[i] + t[i];
  return idx;
}

inline Table uplink_table(const cran::UplinkSpec& s) {
  const std::size_t K = s.users(), L = s.relays();
  Table tab;
  for (std::size_t k = 0; k < K; ++k) tab.sizes.push_back(s.input_pmfs[k].size());
  for (std::size_t l = 0; l < L; ++l) tab.sizes.push_back(s.output_sizes[l]);
  for (std::size_t l = 0; l < L; ++l) tab.sizes.push_back(s.quant_sizes[l]);
  std::size_t y_total = 1;
  for (auto n : s.output_sizes) y_total *= n;
  for_each_tuple(tab.sizes, [&](const Tuple& t) {
    double p = 1.0;
    for (std::size_t k = 0; k < K; ++k) p *= s.input_pmfs[k][t[k]];
    p *= s.channel[flat(t, 0, K, tab.sizes) * y_total + flat(t, K, L, tab.sizes)];
    for (std::size_t l = 0; l < L; ++l) p *= s.test_channels[l][t[K + l] * s.quant_sizes[l] + t[K + L + l]];
    if (p > 0.0) tab.p[t] = p;
  });
  return tab;
}

inline Table downlink_table(const cran::DownlinkSpec& s) {
  const std::size_t K = s.users(), L = s.relays();
  Table tab;
  for (auto n : s.aux_sizes) tab.sizes.push_back(n);
  for (auto n : s.input_sizes) tab.sizes.push_back(n);
  for (auto n : s.output_sizes) tab.sizes.push_back(n);
  std::size_t x_total = 1, y_total = 1;
  for (auto n : s.input_sizes) x_total *= n;
  for (auto n : s.output_sizes) y_total *= n;
  for_each_tuple(tab.sizes, [&](const Tuple& t) {
    const std::size_t u = flat(t, 0, K, tab.sizes), x = flat(t, K, L, tab.sizes), y = flat(t, K + L, K, tab.sizes);
    const double p = s.aux_joint[u * x_total + x] * s.channel[x * y_total + y];
    if (p > 0.0) tab.p[t] = p;
  });
  return tab;
}

inline std::map<Tuple, double> marginal(const Table& tab, const std::vector<std::size_t>& keep) {
  std::map<Tuple, double> m;
  for (const auto& [t, p] : tab.p) {
    Tuple key;
    for (auto v : keep) key.push_back(t[v]);
    m[key] += p;
  }
  return m;
}

inline std::vector<std::size_t> join(std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

/// I(A;B|C) = sum p(a,b,c) log p(a,b,c) p(c) / (p(a,c) p(b,c)).
inline double cmi(const Table& tab, const std::vector<std::size_t>& a, const std::vector<std::size_t>& b,
                  const std::vector<std::size_t>& c = {}) {
  const auto abc = join(join(a, b), c);
  const auto pac = marginal(tab, join(a, c));
  const auto pbc = marginal(tab, join(b, c));
  const auto pc = marginal(tab, c);
  double v = 0.0;
  for (const auto& [t, p] : marginal(tab, abc)) {
    if (p <= 0.0) continue;
    Tuple ta(t.begin(), t.begin() + a.size());
    Tuple tb(t.begin() + a.size(), t.begin() + a.size() + b.size());
    Tuple tc(t.begin() + a.size() + b.size(), t.end());
    v += p * std::log2(p * pc.at(tc) / (pac.at(join(ta, tc)) * pbc.at(join(tb, tc))));
  }
  return v;
}

inline double entropy(const Table& tab, const std::vector<std::size_t>& a) {
  double h = 0.0;
  for (const auto& [t, p] : marginal(tab, a)) {
    if (p > 0.0) h -= p * std::log2(p);
  }
  return h;
}

/// sum_i H(A_i) - H(A).
inline double total_correlation(const Table& tab, const std::vector<std::size_t>& a) {
  double v = -entropy(tab, a);
  for (auto i : a) v += entropy(tab, {i});
  return v;
}

inline std::vector<std::size_t> positions(cran::IndexSet s, std::size_t offset) {
  std::vector<std::size_t> v;
  for (auto i : s.members()) v.push_back(offset + i);
  return v;
}

/// Right-hand side of the joint-decoding constraint for (S, T), from the table.
inline double jd_bound(const Table& tab, std::size_t K, std::size_t L, cran::IndexSet s, cran::IndexSet t) {
  const auto x_all = positions(cran::IndexSet::full(K), 0);
  const auto tc = t.complement(L);
  const double a = t.empty() ? 0.0 : cmi(tab, positions(t, K), positions(t, K + L), x_all);
  const double b = (s.empty() || tc.empty()) ? 0.0 : cmi(tab, positions(s, 0), positions(tc, K + L), positions(s.complement(K), 0));
  return a - b;
}

}  // namespace oracle
