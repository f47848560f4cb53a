// Acceptance battery: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>

#include "cran/cli.hpp"
#include "cran/sampling.hpp"

using namespace cran;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string summary;
};

int failures = 0;

void criterion(int n, const char* title, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s (%s; %.2f s)\n", o.pass ? "PASS" : "FAIL", n, title, o.summary.c_str(), secs);
  std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<UplinkSpec> uplink_battery(std::uint64_t seed, std::size_t n) {
  sampling::Rng rng(seed);
  std::vector<UplinkSpec> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(sampling::random_uplink(rng));
  return out;
}

std::string data(const std::string& name) { return std::string(CRAN_DATA_DIR) + "/" + name; }

int run(const std::vector<std::string>& args, std::string* out = nullptr) {
  std::ostringstream o, e;
  const int code = run_cli(args, o, e);
  if (out) *out = o.str();
  return code;
}

std::string without_wall_time(const std::string& text) {
  auto j = Json::parse(text);
  j.erase("wall_time");
  return j.dump();
}

}  // namespace

int main() {
  const auto battery = uplink_battery(2024, 20);

  criterion(1, "iterative and closed-form corners agree", [&] {
    const auto t0 = Clock::now();
    double worst = 0.0;
    std::size_t checks = 0;
    for (const auto& spec : battery) {
      const UplinkModel m(spec);
      for (const auto& order : SolveOrder::all(2, 2)) {
        worst = std::max(worst, max_abs_diff(corner_iterative(m, order), corner_closed(m, order)));
        ++checks;
      }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    return Outcome{worst <= 1e-9 && checks == 480 && secs <= 10.0,
                   fmt("%.0f orders, max deviation %.2e", double(checks), worst)};
  });

  criterion(2, "corners equal successive-decoding corners of the reversed order", [&] {
    double worst = 0.0;
    std::size_t outside = 0;
    for (const auto& spec : battery) {
      const UplinkModel m(spec);
      for (const auto& order : SolveOrder::all(2, 2)) {
        worst = std::max(worst, max_abs_diff(corner_closed(m, order), sd_corner(m, solve_order_to_decode_order(order))));
      }
      for (const auto& order : DecodeOrder::all(2, 2)) outside += in_jd_region(m, sd_corner(m, order), 1e-9) ? 0 : 1;
    }
    return Outcome{worst <= 1e-9 && outside == 0,
                   fmt("max deviation %.2e, %.0f successive corners outside the region", worst, double(outside))};
  });

  criterion(3, "every corner is a vertex of the joint-decoding region", [&] {
    std::size_t bad = 0, total = 0;
    for (const auto& spec : battery) {
      const UplinkModel m(spec);
      for (const auto& [order, p] : enumerate_corners(m).corners) {
        ++total;
        bad += verify_corner(m, p).pass ? 0 : 1;
      }
    }
    return Outcome{bad == 0 && total == 480, fmt("%.0f of %.0f corners failed", double(bad), double(total))};
  });

  criterion(4, "two dominant-face descriptions agree", [&] {
    std::size_t disagree = 0, on = 0, total = 0;
    sampling::Rng rng(4);
    std::uniform_real_distribution<double> shift(-0.05, 0.05);
    std::uniform_int_distribution<std::size_t> coord(0, 3);
    for (const auto& spec : battery) {
      const UplinkModel m(spec);
      std::vector<RateFronthaulPoint> pts = enumerate_corners(m).vertices;
      const auto face = dominant_face_vertices(m);
      for (int i = 0; i < 500; ++i) {
        auto p = sampling::random_combination(rng, face);
        if (i % 2) {
          const auto c = coord(rng);
          (c < 2 ? p.R[c] : p.C[c - 2]) += shift(rng);
        }
        pts.push_back(p);
      }
      for (const auto& p : pts) {
        const bool a = on_dominant_face(m, p), b = on_dominant_face_alt(m, p);
        disagree += a == b ? 0 : 1;
        on += a ? 1 : 0;
        ++total;
      }
    }
    return Outcome{disagree == 0, fmt("%.0f disagreements over %.0f points (%.0f on the face)", double(disagree), double(total), double(on))};
  });

  criterion(5, "faces factor into sub-faces", [&] {
    std::size_t bad = 0, queries = 0, points = 0;
    for (std::size_t s = 0; s < 5; ++s) {
      const UplinkModel m(battery[s]);
      for (const auto& q : admissible_queries(m)) {
        const auto r = check_face_decomposition(m, q, 200, 100 + s, 1e-8);
        ++queries;
        points += r.forward_checked + r.converse_checked;
        bad += r.pass() ? 0 : 1;
      }
    }
    return Outcome{bad == 0, fmt("%.0f of %.0f (S,T) queries failed, %.0f points checked", double(bad), double(queries), double(points))};
  });

  criterion(6, "degeneracy and face dimension", [&] {
    sampling::Rng rng(6);
    bool ok = true;
    std::size_t product_specs = 0, coupled_specs = 0;
    for (int i = 0; i < 5; ++i) {
      const UplinkModel m(sampling::random_parallel_uplink(rng));
      ok = ok && degeneracy_condition(m, {IndexSet{0}, IndexSet{0}}) && dominant_face_dimension(m) < 3;
      ++product_specs;
    }
    std::vector<UplinkSpec> coupled{std::get<UplinkSpec>(load_spec(data("mac_2x2.json")))};
    for (std::size_t s = 0; s < 5; ++s) coupled.push_back(battery[s]);
    for (const auto& spec : coupled) {
      const UplinkModel m(spec);
      for (const auto& q : admissible_queries(m)) ok = ok && !degeneracy_condition(m, q);
      ok = ok && dominant_face_dimension(m) == 3;
      ++coupled_specs;
    }
    return Outcome{ok, fmt("%.0f product specs, %.0f coupled specs", double(product_specs), double(coupled_specs))};
  });

  criterion(7, "rate and quantization split laws", [&] {
    double law_err = 0.0, markov = 0.0, merge_err = 0.0;
    bool endpoints = true;
    const std::vector<double> py{0.35, 0.65}, tc{0.9, 0.1, 0.25, 0.75};
    for (int i = 0; i <= 100; ++i) {
      const double eps = i / 100.0;
      for (double a : {0.05, 0.3, 0.5, 0.77, 0.95}) law_err = std::max(law_err, std::abs(make_rate_split(a, eps).pushforward()[1] - a));
      const auto q = make_quant_split(py, tc, eps);
      const auto law = q.joint();
      markov = std::max(markov, mutual_info(law, law.vars({"Y"}), law.vars({"U", "V"}), law.vars({"Yhat"})));
      for (std::size_t k = 0; k < 4; ++k) merge_err = std::max(merge_err, std::abs(q.merged()[k] - py[k / 2] * tc[k]));
    }
    for (double a : {0.05, 0.5, 0.95}) {
      endpoints = endpoints && make_rate_split(a, 0.0).p_u[1] == 0.0 && make_rate_split(a, 1.0).p_v[1] == 0.0;
    }
    const auto k0 = quant_split_kernel(0.0), k1 = quant_split_kernel(1.0);
    for (std::size_t yh = 0; yh < 2; ++yh) endpoints = endpoints && k0[yh][0][yh] == 1.0 && k1[yh][yh][0] == 1.0;
    return Outcome{law_err <= 1e-12 && markov <= 1e-10 && merge_err <= 1e-12 && endpoints,
                   fmt("pushforward error %.1e, Markov %.1e, merge error %.1e", law_err, markov, merge_err) +
                       (endpoints ? ", endpoints exact" : ", endpoint mismatch")};
  });

  criterion(8, "generalized orders and the four-index example", [&] {
    const auto a2 = to_string(generalized_order(2)), a3 = to_string(generalized_order(3));
    const std::size_t j[] = {1, 1, 6};
    std::string s = "(";
    const auto order = order_from_active(2, 2, j);
    for (std::size_t k = 0; k < order.size(); ++k) s += (k ? "," : "") + order[k].str();
    s += ")";
    const bool ok = a2 == "(21,11,22)" && a3 == "(31,21,32,11,33,22,34)" && s == "(1c,2a,1d,1,2c,2b,2d)";
    return Outcome{ok, "A2 " + a2 + ", A3 " + a3 + ", order " + s};
  });

  criterion(9, "telescoping identity of psi", [&] {
    sampling::Rng rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    std::size_t off = 0;
    for (int i = 0; i < 100; ++i) {
      const auto& spec = battery[i % battery.size()];
      const UplinkModel m(spec);
      const std::vector<double> alpha{u(rng), u(rng), u(rng)};
      const auto p = psi(spec, alpha);
      worst = std::max(worst, std::abs(sum_gap(m, p)));
      off += on_dominant_face(m, p, 1e-8) ? 0 : 1;
    }
    return Outcome{worst <= 1e-9 && off == 0, fmt("max gap %.2e, %.0f points off the face", worst, double(off))};
  });

  criterion(10, "psi reaches every sampled face point", [&] {
    const auto t0 = Clock::now();
    sampling::Rng rng(10);
    std::size_t failed = 0, targets = 0, max_evals = 0;
    double worst = 0.0;
    for (const auto& spec : battery) {
      const UplinkModel m(spec);
      const auto verts = dominant_face_vertices(m);
      std::vector<RateFronthaulPoint> goals;
      for (std::size_t i = 0; i < verts.size() && goals.size() < 8; ++i) goals.push_back(verts[i]);
      while (goals.size() < 20) goals.push_back(sampling::random_combination(rng, verts));
      for (const auto& g : goals) {
        const auto r = invert_psi(spec, g, 1e-4, 5000);
        ++targets;
        worst = std::max(worst, r.residual);
        max_evals = std::max(max_evals, r.evaluations);
        failed += (r.converged && r.evaluations <= 5000) ? 0 : 1;
      }
    }
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    return Outcome{failed == 0 && secs <= 300.0,
                   fmt("%.0f targets unresolved, worst residual %.2e, max %.0f evaluations", double(failed), worst, double(max_evals)) +
                       fmt(" over %.0f targets", double(targets))};
  });

  criterion(11, "downlink corners, vertices and successive encoding", [&] {
    sampling::Rng rng(11);
    double worst_iter = 0.0, worst_se = 0.0;
    std::size_t bad_vertex = 0, outside = 0, negative = 0;
    for (int s = 0; s < 20; ++s) {
      const DownlinkModel m(sampling::random_downlink(rng));
      for (const auto& [order, p] : downlink_enumerate_corners(m).corners) {
        worst_iter = std::max(worst_iter, max_abs_diff(downlink_corner_iterative(m, order), p));
        worst_se = std::max(worst_se, max_abs_diff(se_corner(m, solve_order_to_encode_order(order)), p));
        bad_vertex += verify_downlink_corner(m, p).pass ? 0 : 1;
        negative += negative_coordinates(p).empty() ? 0 : 1;
      }
      for (const auto& order : EncodeOrder::all(2, 2)) outside += in_je_region(m, se_corner(m, order), 1e-9) ? 0 : 1;
    }
    return Outcome{worst_iter <= 1e-9 && worst_se <= 1e-9 && bad_vertex == 0 && outside == 0,
                   fmt("iterative %.2e, successive %.2e, ", worst_iter, worst_se) +
                       fmt("%.0f non-vertex corners, %.0f outside, %.0f with negative coordinates", double(bad_vertex),
                           double(outside), double(negative))};
  });

  criterion(12, "command-line determinism and exit codes", [&] {
    std::string a, b, mid_out;
    const std::vector<std::string> verify{"verify", data("mac_2x2.json"), "--seed", "12", "--samples", "60"};
    const int pass_code = run(verify, &a);
    run(verify, &b);
    const bool same = without_wall_time(a) == without_wall_time(b);
    const int fail_code = run({"verify", data("correlated_2x2.json"), "--suite", "iterative-closed"});
    const int parse_code = run({"verify", data("malformed_syntax.json")});
    // Midpoint of two face corners with a one-evaluation budget.
    const UplinkSpec mac = std::get<UplinkSpec>(load_spec(data("mac_2x2.json")));
    const auto verts = dominant_face_vertices(UplinkModel(mac));
    const std::vector<double> w{0.5, 0.5};
    const auto mid = sampling::convex_combination(std::span(verts).first(2), w);
    std::ostringstream target;
    target.precision(17);
    for (std::size_t i = 0; i < 4; ++i) target << (i ? "," : "") << mid.flat()[i];
    const int stuck_code = run({"psi", data("mac_2x2.json"), "--invert", target.str(), "--max-iters", "1"});
    const bool ok = same && pass_code == 0 && fail_code == 1 && parse_code == 2 && stuck_code == 3;
    return Outcome{ok, std::string(same ? "reports identical" : "reports differ") +
                           fmt(", exit codes pass %.0f fail %.0f parse %.0f", pass_code, fail_code, parse_code) +
                           fmt(" non-convergence %.0f", stuck_code)};
  });

  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
