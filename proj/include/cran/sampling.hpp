#pragma once

// Seeded generators for specs and points used by the verification suites.

#include <random>
#include <span>
#include <vector>

#include "cran/downlink.hpp"
#include "cran/uplink.hpp"

namespace cran::sampling {

using Rng = std::mt19937_64;

inline std::vector<double> dirichlet(Rng& rng, std::size_t n, double concentration = 1.0) {
  std::gamma_distribution<double> g(concentration, 1.0);
  std::vector<double> v(n);
  double sum = 0.0;
  for (auto& x : v) {
    x = g(rng);
    sum += x;
  }
  for (auto& x : v) x /= sum;
  return v;
}

inline std::vector<double> stochastic_rows(Rng& rng, std::size_t rows, std::size_t width) {
  std::vector<double> out;
  for (std::size_t r = 0; r < rows; ++r) {
    auto row = dirichlet(rng, width);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

inline std::vector<double> bsc(double crossover) { return {1.0 - crossover, crossover, crossover, 1.0 - crossover}; }

/// Channel p(y_1..y_L | x) assembled from per-relay conditionals p(y_l | x)
/// (relay outputs conditionally independent given all inputs).
inline std::vector<double> product_channel(const std::vector<std::vector<double>>& per_relay, std::size_t x_total,
                                           std::span<const std::size_t> output_sizes) {
  const std::size_t y_total = detail::product(output_sizes);
  std::vector<double> ch(x_total * y_total);
  for (std::size_t x = 0; x < x_total; ++x) {
    for (std::size_t y = 0; y < y_total; ++y) {
      double p = 1.0;
      std::size_t rem = y;
      for (std::size_t l = output_sizes.size(); l-- > 0;) {
        const std::size_t yl = rem % output_sizes[l];
        rem /= output_sizes[l];
        p *= per_relay[l][x * output_sizes[l] + yl];
      }
      ch[x * y_total + y] = p;
    }
  }
  return ch;
}

struct UplinkShape {
  std::size_t users = 2;
  std::size_t relays = 2;
  std::size_t input_size = 2;
  std::size_t output_size = 2;
  std::size_t quant_size = 2;
};

/// Random inputs, random per-relay channels p(y_l | x_1..x_K) (every relay
/// hears every user) and random test channels.
inline UplinkSpec random_uplink(Rng& rng, const UplinkShape& shape = {}) {
  UplinkSpec s;
  for (std::size_t k = 0; k < shape.users; ++k) s.input_pmfs.push_back(dirichlet(rng, shape.input_size));
  s.output_sizes.assign(shape.relays, shape.output_size);
  s.quant_sizes.assign(shape.relays, shape.quant_size);
  std::size_t x_total = 1;
  for (std::size_t k = 0; k < shape.users; ++k) x_total *= shape.input_size;
  std::vector<std::vector<double>> per_relay;
  for (std::size_t l = 0; l < shape.relays; ++l) per_relay.push_back(stochastic_rows(rng, x_total, shape.output_size));
  s.channel = product_channel(per_relay, x_total, s.output_sizes);
  for (std::size_t l = 0; l < shape.relays; ++l) {
    s.test_channels.push_back(stochastic_rows(rng, shape.output_size, shape.quant_size));
  }
  return s;
}

/// Random spec whose relay outputs are correlated given the inputs
/// (the whole p(y_1..y_L | x) row is drawn jointly).
inline UplinkSpec random_uplink_correlated(Rng& rng, const UplinkShape& shape = {}) {
  UplinkSpec s = random_uplink(rng, shape);
  std::size_t x_total = 1, y_total = 1;
  for (std::size_t k = 0; k < shape.users; ++k) x_total *= shape.input_size;
  for (std::size_t l = 0; l < shape.relays; ++l) y_total *= shape.output_size;
  s.channel = stochastic_rows(rng, x_total, y_total);
  return s;
}

/// Two users, two relays, user k heard only by relay k: two decoupled chains.
inline UplinkSpec random_parallel_uplink(Rng& rng) {
  UplinkSpec s;
  s.input_pmfs = {dirichlet(rng, 2), dirichlet(rng, 2)};
  s.output_sizes = {2, 2};
  s.quant_sizes = {2, 2};
  const auto h1 = stochastic_rows(rng, 2, 2);
  const auto h2 = stochastic_rows(rng, 2, 2);
  std::vector<std::vector<double>> per_relay(2, std::vector<double>(8));
  for (std::size_t x1 = 0; x1 < 2; ++x1) {
    for (std::size_t x2 = 0; x2 < 2; ++x2) {
      const std::size_t x = x1 * 2 + x2;
      for (std::size_t y = 0; y < 2; ++y) {
        per_relay[0][x * 2 + y] = h1[x1 * 2 + y];
        per_relay[1][x * 2 + y] = h2[x2 * 2 + y];
      }
    }
  }
  s.channel = product_channel(per_relay, 4, s.output_sizes);
  s.test_channels = {stochastic_rows(rng, 2, 2), stochastic_rows(rng, 2, 2)};
  return s;
}

/// K=1, L=1, X ~ Bern(0.5), Y = X, Yhat = Y.
inline UplinkSpec identity_chain() {
  UplinkSpec s;
  s.input_pmfs = {{0.5, 0.5}};
  s.output_sizes = {2};
  s.quant_sizes = {2};
  s.channel = {1.0, 0.0, 0.0, 1.0};
  s.test_channels = {{1.0, 0.0, 0.0, 1.0}};
  return s;
}

/// Uniform binary inputs, Y_l = X_l xor Bern(p) noise, Yhat_l = BSC(q)(Y_l); K = L.
inline UplinkSpec bsc_uplink(std::size_t n, double p, double q) {
  UplinkSpec s;
  s.input_pmfs.assign(n, {0.5, 0.5});
  s.output_sizes.assign(n, 2);
  s.quant_sizes.assign(n, 2);
  const std::size_t x_total = std::size_t{1} << n;
  std::vector<std::vector<double>> per_relay(n, std::vector<double>(x_total * 2));
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t x = 0; x < x_total; ++x) {
      const std::size_t xl = (x >> (n - 1 - l)) & 1U;
      per_relay[l][x * 2 + xl] = 1.0 - p;
      per_relay[l][x * 2 + (1 - xl)] = p;
    }
  }
  s.channel = product_channel(per_relay, x_total, s.output_sizes);
  s.test_channels.assign(n, bsc(q));
  return s;
}

struct DownlinkShape {
  std::size_t users = 2;
  std::size_t relays = 2;
  std::size_t aux_size = 2;
  std::size_t input_size = 2;
  std::size_t output_size = 2;
};

inline DownlinkSpec random_downlink(Rng& rng, const DownlinkShape& shape = {}) {
  DownlinkSpec s;
  s.aux_sizes.assign(shape.users, shape.aux_size);
  s.input_sizes.assign(shape.relays, shape.input_size);
  s.output_sizes.assign(shape.users, shape.output_size);
  s.aux_joint = dirichlet(rng, detail::product(s.aux_sizes) * detail::product(s.input_sizes));
  s.channel = stochastic_rows(rng, detail::product(s.input_sizes), detail::product(s.output_sizes));
  return s;
}

/// K=1, L=1, U = X ~ Bern(0.5), Y = X.
inline DownlinkSpec identity_downlink() {
  DownlinkSpec s;
  s.aux_sizes = {2};
  s.input_sizes = {2};
  s.output_sizes = {2};
  s.aux_joint = {0.5, 0.0, 0.0, 0.5};
  s.channel = {1.0, 0.0, 0.0, 1.0};
  return s;
}

inline RateFronthaulPoint convex_combination(std::span<const RateFronthaulPoint> points, std::span<const double> weights) {
  RateFronthaulPoint out{std::vector<double>(points.front().R.size(), 0.0),
                         std::vector<double>(points.front().C.size(), 0.0)};
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = 0; k < out.R.size(); ++k) out.R[k] += weights[i] * points[i].R[k];
    for (std::size_t l = 0; l < out.C.size(); ++l) out.C[l] += weights[i] * points[i].C[l];
  }
  return out;
}

/// Dirichlet-uniform convex combination of `points`.
inline RateFronthaulPoint random_combination(Rng& rng, std::span<const RateFronthaulPoint> points) {
  const auto w = dirichlet(rng, points.size());
  return convex_combination(points, w);
}

}  // namespace cran::sampling
