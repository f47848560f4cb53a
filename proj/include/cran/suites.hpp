#pragma once

// Numerical verification suites over a single spec. Each suite returns a
// summary with a pass flag, a check count and the worst deviation seen.

#include <string>
#include <vector>

#include "cran/dominant_face.hpp"
#include "cran/downlink.hpp"
#include "cran/sampling.hpp"
#include "cran/spec_io.hpp"
#include "cran/splitting.hpp"
#include "cran/uplink.hpp"

namespace cran {

inline constexpr double kCornerTol = 1e-9;

struct SuiteResult {
  std::string name;
  bool pass = true;
  std::size_t checks = 0;
  std::size_t failures = 0;
  double max_error = 0.0;
  Json details = Json::object();

  void record(bool ok, double error = 0.0) {
    ++checks;
    if (!ok) {
      ++failures;
      pass = false;
    }
    max_error = std::max(max_error, error);
  }

  Json to_json() const {
    Json j;
    j["suite"] = name;
    j["pass"] = pass;
    j["checks"] = checks;
    j["failures"] = failures;
    j["max_error"] = max_error;
    if (!details.empty()) j["details"] = details;
    return j;
  }
};

/// Iterative and closed-form corner procedures agree on every solve order.
inline SuiteResult suite_iterative_closed(const UplinkModel& m) {
  SuiteResult r{"iterative-closed"};
  for (const auto& order : SolveOrder::all(m.users(), m.relays())) {
    const double e = max_abs_diff(corner_iterative(m, order), corner_closed(m, order));
    r.record(e <= kCornerTol, e);
  }
  return r;
}

/// Every corner equals the successive-decoding corner of the reversed order,
/// and every successive-decoding corner lies in the joint-decoding region.
inline SuiteResult suite_successive_joint(const UplinkModel& m) {
  SuiteResult r{"successive-joint"};
  std::size_t outside = 0;
  for (const auto& order : SolveOrder::all(m.users(), m.relays())) {
    const double e = max_abs_diff(corner_closed(m, order), sd_corner(m, solve_order_to_decode_order(order)));
    r.record(e <= kCornerTol, e);
  }
  for (const auto& order : DecodeOrder::all(m.users(), m.relays())) {
    const bool in = in_jd_region(m, sd_corner(m, order), kMembershipTol);
    if (!in) ++outside;
    r.record(in);
  }
  r.details["sd_corners_outside_region"] = outside;
  return r;
}

/// Every corner is a member with K+L affinely independent active constraints.
inline SuiteResult suite_corner_vertex(const UplinkModel& m) {
  SuiteResult r{"corner-vertex"};
  for (const auto& [order, p] : enumerate_corners(m).corners) {
    const auto rep = verify_corner(m, p);
    r.record(rep.pass, std::max(0.0, -rep.min_slack));
  }
  return r;
}

/// Points for comparing the two face descriptions: corners, convex
/// combinations of corners, and combinations pushed off the face by at least 1e-3.
inline std::vector<RateFronthaulPoint> face_probe_points(const UplinkModel& m, std::size_t samples, std::uint64_t seed) {
  sampling::Rng rng(seed);
  auto verts = dominant_face_vertices(m);
  std::vector<RateFronthaulPoint> out = enumerate_corners(m).vertices;
  std::uniform_real_distribution<double> mag(1e-3, 0.05);
  std::uniform_int_distribution<std::size_t> coord(0, m.users() + m.relays() - 1);
  for (std::size_t i = 0; i < samples; ++i) {
    auto p = sampling::random_combination(rng, verts);
    if (i % 2 == 1) {
      const std::size_t c = coord(rng);
      const double delta = (i % 4 == 1 ? 1.0 : -1.0) * mag(rng);
      if (c < m.users()) {
        p.R[c] += delta;
      } else {
        p.C[c - m.users()] += delta;
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

/// The two descriptions of the dominant face agree point by point.
inline SuiteResult suite_face_description(const UplinkModel& m, std::size_t samples, std::uint64_t seed) {
  SuiteResult r{"face-description"};
  std::size_t on = 0;
  for (const auto& p : face_probe_points(m, samples, seed)) {
    const bool a = on_dominant_face(m, p);
    const bool b = on_dominant_face_alt(m, p);
    on += a ? 1 : 0;
    r.record(a == b);
  }
  r.details["on_face"] = on;
  return r;
}

/// Each face F_{S,T} equals the product of its two sub-faces on samples.
inline SuiteResult suite_face_product(const UplinkModel& m, std::size_t samples, std::uint64_t seed) {
  SuiteResult r{"face-product"};
  Json pairs = Json::array();
  for (const auto& q : admissible_queries(m)) {
    const auto rep = check_face_decomposition(m, q, samples, seed);
    r.record(rep.pass());
    pairs.push_back({{"S", q.users.str()},
                     {"T", q.relays.str()},
                     {"face_corners", rep.face_corners},
                     {"forward_violations", rep.forward_violations},
                     {"converse_violations", rep.converse_violations},
                     {"perturbed_missed", rep.perturbed_missed}});
  }
  r.details["pairs"] = pairs;
  return r;
}

/// The zero-information condition holds exactly when the face factorizes.
inline SuiteResult suite_degeneracy(const UplinkModel& m) {
  SuiteResult r{"degeneracy"};
  Json pairs = Json::array();
  for (const auto& q : admissible_queries(m)) {
    const bool cond = degeneracy_condition(m, q);
    const bool fac = face_factorizes(m, q);
    r.record(cond == fac);
    pairs.push_back({{"S", q.users.str()}, {"T", q.relays.str()}, {"condition", cond}, {"factorizes", fac}});
  }
  r.details["pairs"] = pairs;
  return r;
}

/// Some (S,T) factorizes the face exactly when its dimension is below K+L-1.
inline SuiteResult suite_face_dimension(const UplinkModel& m) {
  SuiteResult r{"face-dimension"};
  bool any = false;
  for (const auto& q : admissible_queries(m)) any = any || face_factorizes(m, q);
  const std::size_t dim = dominant_face_dimension(m);
  r.record(any == (dim + 1 < m.users() + m.relays()));
  r.details["dimension"] = dim;
  r.details["factorizes"] = any;
  return r;
}

/// psi(alpha) satisfies the sum-rate identity and lies on the dominant face.
inline SuiteResult suite_telescope(const UplinkSpec& spec, std::size_t samples, std::uint64_t seed) {
  SuiteResult r{"telescope"};
  const UplinkModel m(spec);
  sampling::Rng rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t off_face = 0;
  for (std::size_t i = 0; i < samples; ++i) {
    std::vector<double> alpha(spec.users() + spec.relays() - 1);
    for (auto& a : alpha) a = u(rng);
    const auto p = psi(spec, alpha);
    const double gap = std::abs(sum_gap(m, p));
    const bool on = on_dominant_face(m, p, kFaceTol);
    if (!on) ++off_face;
    r.record(gap <= kCornerTol && on, gap);
  }
  r.details["off_face"] = off_face;
  return r;
}

inline SuiteResult suite_downlink_iterative_closed(const DownlinkModel& m) {
  SuiteResult r{"downlink-iterative-closed"};
  for (const auto& order : SolveOrder::all(m.users(), m.relays())) {
    const double e = max_abs_diff(downlink_corner_iterative(m, order), downlink_corner_closed(m, order));
    r.record(e <= kCornerTol, e);
  }
  return r;
}

/// Every downlink corner is a vertex of the joint-encoding region; corners
/// with negative coordinates are counted separately.
inline SuiteResult suite_downlink_corner_vertex(const DownlinkModel& m) {
  SuiteResult r{"downlink-corner-vertex"};
  std::size_t negative = 0;
  for (const auto& [order, p] : downlink_enumerate_corners(m).corners) {
    const auto rep = verify_downlink_corner(m, p);
    if (!negative_coordinates(p).empty()) ++negative;
    r.record(rep.pass, std::max(0.0, -rep.min_slack));
  }
  r.details["corners_with_negative_coordinates"] = negative;
  return r;
}

/// Every downlink corner equals the successive-encoding corner of the same order.
inline SuiteResult suite_successive_joint_encoding(const DownlinkModel& m) {
  SuiteResult r{"successive-joint-encoding"};
  for (const auto& order : SolveOrder::all(m.users(), m.relays())) {
    const double e = max_abs_diff(downlink_corner_closed(m, order), se_corner(m, solve_order_to_encode_order(order)));
    r.record(e <= kCornerTol, e);
  }
  for (const auto& order : EncodeOrder::all(m.users(), m.relays())) {
    const auto p = se_corner(m, order);
    r.record(in_je_region(m, p, kMembershipTol));
  }
  return r;
}

}  // namespace cran
