#include <catch_amalgamated.hpp>

#include "cran/sampling.hpp"
#include "oracles.hpp"

using namespace cran;
using Catch::Matchers::WithinAbs;

namespace {

RateFronthaulPoint pt(std::vector<double> r, std::vector<double> c) { return {std::move(r), std::move(c)}; }

bool near(const RateFronthaulPoint& a, const RateFronthaulPoint& b, double tol = 1e-9) { return max_abs_diff(a, b) <= tol; }

UplinkSpec bsc_chain(double p, double q) {
  UplinkSpec s;
  s.input_pmfs = {{0.5, 0.5}};
  s.output_sizes = {2};
  s.quant_sizes = {2};
  s.channel = sampling::bsc(p);
  s.test_channels = {sampling::bsc(q)};
  return s;
}

// Swaps the labels of users 1 and 2 (and of relays 1 and 2) in a K=L=2 binary spec.
UplinkSpec relabel(const UplinkSpec& s) {
  UplinkSpec r = s;
  r.input_pmfs = {s.input_pmfs[1], s.input_pmfs[0]};
  r.test_channels = {s.test_channels[1], s.test_channels[0]};
  for (std::size_t x1 = 0; x1 < 2; ++x1)
    for (std::size_t x2 = 0; x2 < 2; ++x2)
      for (std::size_t y1 = 0; y1 < 2; ++y1)
        for (std::size_t y2 = 0; y2 < 2; ++y2)
          r.channel[(x2 * 2 + x1) * 4 + y2 * 2 + y1] = s.channel[(x1 * 2 + x2) * 4 + y1 * 2 + y2];
  return r;
}

Element swap_labels(Element e) { return {e.side, 1 - e.index}; }

}  // namespace

TEST_CASE("joint-decoding slack on simple chains") {
  const UplinkModel id(sampling::identity_chain());
  for (const auto& p : {pt({1}, {1}), pt({0}, {0}), pt({0.3}, {2.0})}) CHECK(jd_slack(id, p, {}, {}) == 0.0);
  CHECK_THAT(jd_slack(id, pt({1}, {1}), IndexSet{0}, IndexSet{0}), WithinAbs(0.0, 1e-12));

  const UplinkModel noisy(bsc_chain(0.1, 0.05));
  const double expected = oracle::h2(0.05 * 0.9 + 0.95 * 0.1) - oracle::h2(0.05);
  CHECK_THAT(jd_slack(noisy, pt({0}, {0}), {}, IndexSet{0}), WithinAbs(-expected, 1e-12));
}

TEST_CASE("joint-decoding membership on the identity chain") {
  const UplinkModel id(sampling::identity_chain());
  CHECK(in_jd_region(id, pt({1}, {1})));
  CHECK_FALSE(in_jd_region(id, pt({1.1}, {1})));
  CHECK(in_jd_region(id, pt({0}, {0})));
  CHECK_THROWS_AS(in_jd_region(id, pt({0, 0}, {0})), SpecError);
}

TEST_CASE("joint-decoding bounds match the oracle") {
  sampling::Rng rng(21);
  for (int trial = 0; trial < 5; ++trial) {
    const auto spec = sampling::random_uplink(rng);
    const UplinkModel m(spec);
    const auto tab = oracle::uplink_table(spec);
    for (auto s : subsets_of(m.all_users())) {
      for (auto t : subsets_of(m.all_relays())) CHECK_THAT(m.jd_bound(s, t), WithinAbs(oracle::jd_bound(tab, 2, 2, s, t), 1e-10));
    }
  }
}

TEST_CASE("successive-decoding corners on the identity chain") {
  const UplinkModel id(sampling::identity_chain());
  CHECK(near(sd_corner(id, parse_order<DecodeTag>("(Yhat1,X1)", 1, 1)), pt({1}, {1})));
  CHECK(near(sd_corner(id, parse_order<DecodeTag>("(X1,Yhat1)", 1, 1)), pt({0}, {0})));
}

TEST_CASE("successive-decoding corner matches the oracle") {
  const auto spec = sampling::bsc_uplink(2, 0.1, 0.05);
  const UplinkModel m(spec);
  const auto tab = oracle::uplink_table(spec);
  // Positions: X1 0, X2 1, Y1 2, Y2 3, Yhat1 4, Yhat2 5.
  const auto p = sd_corner(m, parse_order<DecodeTag>("(Yhat1,X2,Yhat2,X1)", 2, 2));
  CHECK_THAT(p.C[0], WithinAbs(oracle::cmi(tab, {2}, {4}), 1e-10));
  CHECK_THAT(p.R[1], WithinAbs(oracle::cmi(tab, {1}, {4}), 1e-10));
  CHECK_THAT(p.C[1], WithinAbs(oracle::cmi(tab, {3}, {5}) - oracle::cmi(tab, {5}, {4, 1}), 1e-10));
  CHECK_THAT(p.R[0], WithinAbs(oracle::cmi(tab, {0}, {4, 5, 1}), 1e-10));
}

TEST_CASE("solve-order index sets") {
  const auto order = parse_order<SolveTag>("(R3,R1,C2,R2,C1)", 3, 2);
  const std::vector<IndexSet> I = {{}, IndexSet{2}, IndexSet{0, 2}, IndexSet{0, 2}, IndexSet{0, 1, 2}};
  const std::vector<IndexSet> J = {{}, {}, {}, IndexSet{1}, IndexSet{1}};
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(order.users_before(k) == I[k]);
    CHECK(order.relays_before(k) == J[k]);
  }
  CHECK(order.side_flags() == std::vector<int>{1, 1, 0, 1, 0});
  CHECK(order.side_indices() == std::vector<std::size_t>{2, 0, 1, 1, 0});
  CHECK(order.str() == "(R3,R1,C2,R2,C1)");
  CHECK_THROWS_AS(parse_order<SolveTag>("(R1,R1)", 1, 1), SpecError);
  CHECK_THROWS_AS(parse_order<SolveTag>("(R1,C3)", 1, 1), SpecError);
}

TEST_CASE("corner procedures on the identity chain") {
  const UplinkModel id(sampling::identity_chain());
  const auto rc = parse_order<SolveTag>("(R1,C1)", 1, 1);
  const auto cr = parse_order<SolveTag>("(C1,R1)", 1, 1);
  CHECK(near(corner_iterative(id, rc), pt({1}, {1})));
  CHECK(near(corner_closed(id, rc), pt({1}, {1})));
  CHECK(near(corner_iterative(id, cr), pt({0}, {0})));
  CHECK(near(corner_closed(id, cr), pt({0}, {0})));
  CHECK(solve_order_to_decode_order(rc).str() == "(Yhat1,X1)");
  CHECK(solve_order_to_decode_order(cr).str() == "(X1,Yhat1)");
}

TEST_CASE("iterative and closed-form corners agree on random specs") {
  sampling::Rng rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    const UplinkModel m(sampling::random_uplink(rng));
    for (const auto& order : SolveOrder::all(2, 2)) {
      const auto closed = corner_closed(m, order);
      CHECK(max_abs_diff(corner_iterative(m, order), closed) <= 1e-9);
      CHECK(max_abs_diff(sd_corner(m, solve_order_to_decode_order(order)), closed) <= 1e-9);
    }
    for (const auto& order : DecodeOrder::all(2, 2)) CHECK(in_jd_region(m, sd_corner(m, order)));
  }
  sampling::UplinkShape shape{3, 2, 2, 3, 2};
  const UplinkModel big(sampling::random_uplink(rng, shape));
  for (const auto& order : SolveOrder::all(3, 2)) CHECK(max_abs_diff(corner_iterative(big, order), corner_closed(big, order)) <= 1e-9);
}

TEST_CASE("correlated relay outputs break the closed form") {
  sampling::Rng rng(41);
  double worst = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    const UplinkModel m(sampling::random_uplink_correlated(rng));
    for (const auto& order : SolveOrder::all(2, 2)) worst = std::max(worst, max_abs_diff(corner_iterative(m, order), corner_closed(m, order)));
  }
  CHECK(worst > 1e-6);
}

TEST_CASE("corner verification") {
  const UplinkModel id(sampling::identity_chain());
  const auto rep = verify_corner(id, pt({1}, {1}));
  CHECK(rep.pass);
  CHECK(rep.rank == 2);
  auto has = [&](IndexSet s, IndexSet t) {
    return std::any_of(rep.active.begin(), rep.active.end(), [&](const auto& a) { return a.users == s && a.relays == t; });
  };
  CHECK(has(IndexSet{0}, IndexSet{0}));
  CHECK(has(IndexSet{0}, IndexSet{}));

  const UplinkModel m(sampling::bsc_uplink(2, 0.1, 0.05));
  const auto corners = enumerate_corners(m);
  REQUIRE(corners.corners.size() == 24);
  for (const auto& [order, p] : corners.corners) CHECK(verify_corner(m, p).pass);
  // Centroid of the corners, pulled into the interior.
  auto mid = sampling::convex_combination(corners.points(), std::vector<double>(24, 1.0 / 24));
  for (auto& r : mid.R) r -= 0.01;
  for (auto& c : mid.C) c += 0.01;
  const auto interior = verify_corner(m, mid);
  CHECK(interior.in_region);
  CHECK_FALSE(interior.pass);
  CHECK(interior.rank < 4);
}

TEST_CASE("corner enumeration") {
  const UplinkModel id(sampling::identity_chain());
  const auto e = enumerate_corners(id);
  CHECK(e.corners.size() == 2);
  CHECK(same_point_set(e.vertices, std::vector{pt({1}, {1}), pt({0}, {0})}, 1e-8));

  auto useless = sampling::identity_chain();
  useless.test_channels = {{0.3, 0.7, 0.3, 0.7}};
  for (const auto& [order, p] : enumerate_corners(UplinkModel(useless)).corners) CHECK_THAT(p.R[0], WithinAbs(0.0, 1e-12));

  sampling::Rng rng(1);
  sampling::UplinkShape too_big{5, 4, 2, 2, 2};
  CHECK_THROWS_AS(enumerate_corners(UplinkModel(sampling::random_uplink(rng, too_big))), SpecError);
}

TEST_CASE("membership is monotone in fronthaul and rate") {
  sampling::Rng rng(51);
  std::uniform_real_distribution<double> bump(0.0, 0.5);
  for (int trial = 0; trial < 10; ++trial) {
    const UplinkModel m(sampling::random_uplink(rng));
    const auto verts = enumerate_corners(m).vertices;
    for (int i = 0; i < 20; ++i) {
      auto p = sampling::random_combination(rng, verts);
      REQUIRE(in_jd_region(m, p));
      auto up = p;
      up.C[i % 2] += bump(rng);
      CHECK(in_jd_region(m, up));
      auto down = p;
      down.R[i % 2] -= bump(rng);
      CHECK(in_jd_region(m, down));
    }
  }
}

TEST_CASE("relabeling users and relays permutes corners") {
  sampling::Rng rng(61);
  for (int trial = 0; trial < 5; ++trial) {
    const auto spec = sampling::random_uplink(rng);
    const UplinkModel m(spec), r(relabel(spec));
    for (const auto& order : SolveOrder::all(2, 2)) {
      std::vector<Element> swapped;
      for (const auto& e : order.elements()) swapped.push_back(swap_labels(e));
      const auto p = corner_closed(m, order);
      const auto q = corner_closed(r, SolveOrder(swapped, 2, 2));
      for (const auto& e : SolveOrder::canonical(2, 2)) CHECK_THAT(q.at(swap_labels(e)), WithinAbs(p.at(e), 1e-10));
    }
  }
}
