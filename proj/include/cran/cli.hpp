#pragma once

// Command-line front end. run_cli returns the process exit code:
// 0 pass, 1 verification failure, 2 usage or parse error, 3 non-convergence.

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "cran/dominant_face.hpp"
#include "cran/spec_io.hpp"
#include "cran/splitting.hpp"
#include "cran/suites.hpp"

namespace cran {

inline constexpr int kExitPass = 0;
inline constexpr int kExitFail = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNoConvergence = 3;
inline constexpr int kSchemaVersion = 1;

namespace cli {

inline std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size() && tok.find_first_not_of(' ', used) != std::string::npos) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw SpecError(what + ": '" + tok + "' is not a number");
    }
  }
  return out;
}

/// "1,3", "{1,3}" or "" (empty set), with 1-based members.
inline IndexSet parse_subset(std::string text, std::size_t n, const std::string& what) {
  std::erase_if(text, [](char c) { return c == '{' || c == '}' || c == ' '; });
  IndexSet s;
  if (text.empty()) return s;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t used = 0;
    long v = 0;
    try {
      v = std::stol(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != tok.size() || v < 1 || static_cast<std::size_t>(v) > n) {
      throw SpecError(what + ": '" + tok + "' is not an index in 1.." + std::to_string(n));
    }
    s = s.with(static_cast<std::size_t>(v - 1));
  }
  return s;
}

inline Json point_json(const RateFronthaulPoint& p) { return {{"R", p.R}, {"C", p.C}}; }

inline RateFronthaulPoint parse_point(const std::string& text, std::size_t users, std::size_t relays, const std::string& what) {
  const auto v = parse_numbers(text, what);
  if (v.size() != users + relays) {
    throw SpecError(what + ": expected " + std::to_string(users + relays) + " values R1..RK,C1..CL");
  }
  return RateFronthaulPoint::from_flat(users, v);
}

inline std::string csv_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::string command;
  std::string spec_path;
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

  Json report(Json tolerances, Json results, bool pass, std::optional<std::uint64_t> seed = std::nullopt) const {
    Json j;
    j["schema_version"] = kSchemaVersion;
    j["command"] = command;
    j["spec"] = spec_path;
    j["seed"] = seed ? Json(*seed) : Json(nullptr);
    j["tolerances"] = std::move(tolerances);
    j["results"] = std::move(results);
    j["pass"] = pass;
    j["wall_time"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return j;
  }

  void emit(const Json& j) const { out << j.dump(2) << "\n"; }
};

inline const UplinkSpec& require_uplink(const AnySpec& s, const std::string& what) {
  if (!std::holds_alternative<UplinkSpec>(s)) throw SpecError(what + " needs an uplink spec");
  return std::get<UplinkSpec>(s);
}

inline Json corner_rows_json(const CornerEnumeration& e, const std::vector<bool>& pass, const std::vector<std::string>& mapped) {
  Json rows = Json::array();
  for (std::size_t i = 0; i < e.corners.size(); ++i) {
    rows.push_back({{"order", e.corners[i].first.str()},
                    {"mapped_order", mapped[i]},
                    {"point", point_json(e.corners[i].second)},
                    {"pass", static_cast<bool>(pass[i])}});
  }
  return rows;
}

inline int cmd_corners(Context& ctx, const AnySpec& spec, double dedup_tol, const std::string& format) {
  CornerEnumeration e;
  std::vector<bool> pass;
  std::vector<std::string> mapped;
  std::size_t users = 0, relays = 0;
  Json extra = Json::object();
  if (const auto* up = std::get_if<UplinkSpec>(&spec)) {
    const UplinkModel m(*up);
    users = m.users();
    relays = m.relays();
    e = enumerate_corners(m, dedup_tol);
    for (const auto& [order, p] : e.corners) {
      pass.push_back(verify_corner(m, p).pass);
      mapped.push_back(solve_order_to_decode_order(order).str());
    }
  } else {
    const DownlinkModel m(std::get<DownlinkSpec>(spec));
    users = m.users();
    relays = m.relays();
    e = downlink_enumerate_corners(m, dedup_tol);
    std::size_t negative = 0;
    for (const auto& [order, p] : e.corners) {
      pass.push_back(verify_downlink_corner(m, p).pass);
      mapped.push_back(solve_order_to_encode_order(order).str());
      if (!negative_coordinates(p).empty()) ++negative;
    }
    extra["corners_with_negative_coordinates"] = negative;
  }
  const bool all_pass = std::all_of(pass.begin(), pass.end(), [](bool b) { return b; });

  if (format == "csv") {
    ctx.out << "order,mapped_order";
    for (std::size_t k = 0; k < users; ++k) ctx.out << ",R" << k + 1;
    for (std::size_t l = 0; l < relays; ++l) ctx.out << ",C" << l + 1;
    ctx.out << ",pass\n";
    for (std::size_t i = 0; i < e.corners.size(); ++i) {
      ctx.out << '"' << e.corners[i].first.str() << "\",\"" << mapped[i] << '"';
      for (double v : e.corners[i].second.flat()) ctx.out << ',' << csv_number(v);
      ctx.out << ',' << (pass[i] ? "true" : "false") << "\n";
    }
  } else {
    Json vertices = Json::array();
    for (const auto& v : e.vertices) vertices.push_back(point_json(v));
    Json results = {{"rows", corner_rows_json(e, pass, mapped)}, {"vertices", vertices}};
    for (auto& [k, v] : extra.items()) results[k] = v;
    ctx.emit(ctx.report({{"dedup", dedup_tol}, {"membership", kMembershipTol}, {"active", kActiveTol}, {"pivot", kPivotTol}},
                        results, all_pass));
  }
  return all_pass ? kExitPass : kExitFail;
}

inline const std::vector<std::string>& uplink_suites() {
  static const std::vector<std::string> s = {"iterative-closed", "successive-joint", "corner-vertex",  "face-description",
                                             "face-product",     "degeneracy",       "face-dimension", "telescope"};
  return s;
}

inline const std::vector<std::string>& downlink_suites() {
  static const std::vector<std::string> s = {"downlink-iterative-closed", "downlink-corner-vertex",
                                             "successive-joint-encoding"};
  return s;
}

inline bool splittable(const UplinkSpec& s) {
  const auto xs = s.input_sizes();
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if (xs[k] != 2) return false;
  }
  for (auto q : s.quant_sizes) {
    if (q != 2) return false;
  }
  return true;
}

inline int cmd_verify(Context& ctx, const AnySpec& spec, const std::string& suite, std::uint64_t seed, std::size_t samples) {
  const bool uplink = std::holds_alternative<UplinkSpec>(spec);
  const auto& own = uplink ? uplink_suites() : downlink_suites();
  const auto& other = uplink ? downlink_suites() : uplink_suites();

  std::vector<std::string> selected;
  Json skipped = Json::array();
  if (suite == "all") {
    for (const auto& s : own) {
      if (s == "telescope" && !splittable(std::get<UplinkSpec>(spec))) {
        skipped.push_back({{"suite", s}, {"reason", "splitting needs binary X_2..X_K and binary Yhat"}});
        continue;
      }
      selected.push_back(s);
    }
  } else if (std::find(own.begin(), own.end(), suite) != own.end()) {
    selected.push_back(suite);
  } else if (std::find(other.begin(), other.end(), suite) != other.end()) {
    throw SpecError("suite '" + suite + "' does not apply to a " + (uplink ? "uplink" : "downlink") + " spec");
  } else {
    throw SpecError("unknown suite '" + suite + "'");
  }

  Json results = Json::array();
  bool pass = true;
  for (const auto& name : selected) {
    SuiteResult r;
    if (uplink) {
      const auto& up = std::get<UplinkSpec>(spec);
      const UplinkModel m(up);
      if (name == "iterative-closed") r = suite_iterative_closed(m);
      if (name == "successive-joint") r = suite_successive_joint(m);
      if (name == "corner-vertex") r = suite_corner_vertex(m);
      if (name == "face-description") r = suite_face_description(m, samples, seed);
      if (name == "face-product") r = suite_face_product(m, samples, seed);
      if (name == "degeneracy") r = suite_degeneracy(m);
      if (name == "face-dimension") r = suite_face_dimension(m);
      if (name == "telescope") r = suite_telescope(up, samples, seed);
    } else {
      const DownlinkModel m(std::get<DownlinkSpec>(spec));
      if (name == "downlink-iterative-closed") r = suite_downlink_iterative_closed(m);
      if (name == "downlink-corner-vertex") r = suite_downlink_corner_vertex(m);
      if (name == "successive-joint-encoding") r = suite_successive_joint_encoding(m);
    }
    pass = pass && r.pass;
    results.push_back(r.to_json());
  }
  Json body = {{"suites", results}};
  if (!skipped.empty()) body["skipped"] = skipped;
  ctx.emit(ctx.report({{"corner", kCornerTol},
                       {"membership", kMembershipTol},
                       {"face", kFaceTol},
                       {"zero_information", kZeroInfoTol},
                       {"pivot", kPivotTol}},
                      body, pass, seed));
  return pass ? kExitPass : kExitFail;
}

inline int cmd_psi(Context& ctx, const AnySpec& any, const std::string& alpha_text, const std::string& invert_text,
                   double tol, std::size_t max_iters) {
  const auto& spec = require_uplink(any, "psi");
  const UplinkModel m(spec);
  if (alpha_text.empty() == invert_text.empty()) throw SpecError("psi needs exactly one of --alpha or --invert");
  const Json tolerances = {{"face", kFaceTol}, {"identity", kCornerTol}, {"inversion", tol}};

  if (!alpha_text.empty()) {
    const auto alpha = parse_numbers(alpha_text, "--alpha");
    const auto d = psi_details(spec, alpha);
    Json beta = Json::object();
    for (const auto& [v, b] : d.rates.beta) beta[v.str()] = b;
    const bool on = on_dominant_face(m, d.rates.point);
    const double gap = sum_gap(m, d.rates.point);
    ctx.emit(ctx.report(tolerances,
                        {{"alpha", d.config.alpha},
                         {"j", d.config.j},
                         {"epsilon", d.config.epsilon},
                         {"order", d.config.order_str()},
                         {"beta", beta},
                         {"point", point_json(d.rates.point)},
                         {"on_dominant_face", on},
                         {"telescoping_gap", gap}},
                        on && std::abs(gap) <= kCornerTol));
    return on && std::abs(gap) <= kCornerTol ? kExitPass : kExitFail;
  }

  const auto target = parse_point(invert_text, m.users(), m.relays(), "--invert");
  try {
    const auto res = invert_psi(spec, target, tol, max_iters);
    Json results = {{"target", point_json(target)},
                    {"converged", res.converged},
                    {"alpha", res.alpha},
                    {"residual", res.residual},
                    {"evaluations", res.evaluations}};
    if (!res.alpha.empty()) {
      const auto d = psi_details(spec, res.alpha);
      results["order"] = d.config.order_str();
      results["achieved"] = point_json(res.achieved);
    }
    ctx.emit(ctx.report(tolerances, results, res.converged));
    if (!res.converged) ctx.err << "error: no preimage within " << tol << " after " << res.evaluations
                                << " evaluations (best residual " << res.residual << ")\n";
    return res.converged ? kExitPass : kExitNoConvergence;
  } catch (const OffFaceError& e) {
    ctx.emit(ctx.report(tolerances, {{"target", point_json(target)}, {"error", e.what()}}, false));
    ctx.err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

inline int cmd_face(Context& ctx, const AnySpec& any, const std::string& point_text, const std::optional<std::string>& s_text,
                    const std::optional<std::string>& t_text) {
  const auto& spec = require_uplink(any, "face");
  const UplinkModel m(spec);
  const auto p = parse_point(point_text, m.users(), m.relays(), "--point");
  Json results = {{"point", point_json(p)},
                  {"in_region", in_jd_region(m, p)},
                  {"on_dominant_face", on_dominant_face(m, p)},
                  {"on_dominant_face_alt", on_dominant_face_alt(m, p)}};
  if (s_text || t_text) {
    const FaceQuery q{parse_subset(s_text.value_or(""), m.users(), "--S"), parse_subset(t_text.value_or(""), m.relays(), "--T")};
    results["S"] = q.users.str();
    results["T"] = q.relays.str();
    results["in_face"] = in_face_FST(m, p, q);
    if (admissible(m, q)) {
      results["in_sub_face"] = in_sub_face_DST(m, p, q);
      results["in_conditional_sub_face"] = in_sub_face_cond(m, p, q);
    }
    results["degeneracy_condition"] = degeneracy_condition(m, q);
  }
  ctx.emit(ctx.report({{"membership", kMembershipTol}, {"face", kFaceTol}, {"zero_information", kZeroInfoTol}}, results,
                      true));
  return kExitPass;
}

/// CSV membership grid over two coordinates, the others fixed at `base`.
inline int cmd_slice(Context& ctx, const AnySpec& spec, const std::string& axes_text, const std::string& base_text,
                     const std::string& range_text, std::size_t steps) {
  const bool uplink = std::holds_alternative<UplinkSpec>(spec);
  const std::size_t users = uplink ? std::get<UplinkSpec>(spec).users() : std::get<DownlinkSpec>(spec).users();
  const std::size_t relays = uplink ? std::get<UplinkSpec>(spec).relays() : std::get<DownlinkSpec>(spec).relays();
  if (steps < 2) throw SpecError("--steps must be at least 2");

  auto axis = [&](const std::string& name) -> Element {
    if (name.size() >= 2 && (name[0] == 'R' || name[0] == 'C')) {
      const std::size_t n = name[0] == 'R' ? users : relays;
      const auto set = parse_subset(name.substr(1), n, "--axes");
      if (set.count() == 1) return {name[0] == 'R' ? Side::User : Side::Relay, set.members()[0]};
    }
    throw SpecError("--axes: '" + name + "' is not a coordinate name like R1 or C2");
  };
  const auto pos = axes_text.find(',');
  if (pos == std::string::npos) throw SpecError("--axes: expected two coordinates, e.g. R1,C1");
  const Element ax = axis(axes_text.substr(0, pos));
  const Element ay = axis(axes_text.substr(pos + 1));
  if (ax == ay) throw SpecError("--axes: the two coordinates must differ");

  RateFronthaulPoint base{std::vector<double>(users, 0.0), std::vector<double>(relays, 0.0)};
  if (!base_text.empty()) base = parse_point(base_text, users, relays, "--at");
  const auto range = parse_numbers(range_text, "--range");
  if (range.size() != 2 || !(range[0] < range[1])) throw SpecError("--range: expected lo,hi with lo < hi");

  std::function<bool(const RateFronthaulPoint&)> member;
  if (uplink) {
    auto m = std::make_shared<UplinkModel>(std::get<UplinkSpec>(spec));
    member = [m](const RateFronthaulPoint& p) { return in_jd_region(*m, p); };
  } else {
    auto m = std::make_shared<DownlinkModel>(std::get<DownlinkSpec>(spec));
    member = [m](const RateFronthaulPoint& p) { return in_je_region(*m, p) && negative_coordinates(p).empty(); };
  }
  const std::string nx = (ax.side == Side::User ? "R" : "C") + std::to_string(ax.index + 1);
  const std::string ny = (ay.side == Side::User ? "R" : "C") + std::to_string(ay.index + 1);
  ctx.out << nx << "," << ny << ",in_region\n";
  for (std::size_t i = 0; i < steps; ++i) {
    for (std::size_t k = 0; k < steps; ++k) {
      auto p = base;
      p.at(ax) = range[0] + (range[1] - range[0]) * static_cast<double>(i) / static_cast<double>(steps - 1);
      p.at(ay) = range[0] + (range[1] - range[0]) * static_cast<double>(k) / static_cast<double>(steps - 1);
      ctx.out << csv_number(p.at(ax)) << "," << csv_number(p.at(ay)) << "," << (member(p) ? 1 : 0) << "\n";
    }
  }
  return kExitPass;
}

}  // namespace cli

/// Runs the command line `args` (without the program name).
inline int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rate-fronthaul regions of uplink and downlink C-RANs", "cran"};
  app.require_subcommand(1);

  std::string spec_path;
  auto add_spec = [&](CLI::App* sub) { sub->add_option("spec", spec_path, "JSON spec file")->required(); };

  auto* corners = app.add_subcommand("corners", "Enumerate corner points over all solve orders");
  add_spec(corners);
  double dedup_tol = kDedupTol;
  std::string format = "json";
  corners->add_option("--dedup-tol", dedup_tol, "Infinity-norm tolerance for merging corners");
  corners->add_option("--format", format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  auto* verify = app.add_subcommand("verify", "Run verification suites");
  add_spec(verify);
  std::string suite = "all";
  std::uint64_t seed = 1;
  std::size_t samples = 200;
  verify->add_option("--suite", suite, "Suite name or 'all'");
  verify->add_option("--seed", seed, "Seed for sampled points");
  verify->add_option("--samples", samples, "Sampled points per check");

  auto* psi_cmd = app.add_subcommand("psi", "Map split parameters to the dominant face, or invert the map");
  add_spec(psi_cmd);
  std::string alpha_text, invert_text;
  double tol = 1e-4;
  std::size_t max_iters = 5000;
  auto* alpha_opt = psi_cmd->add_option("--alpha", alpha_text, "alpha_2,...,alpha_{K+L}");
  auto* invert_opt = psi_cmd->add_option("--invert", invert_text, "Target R1,..,RK,C1,..,CL");
  alpha_opt->excludes(invert_opt);
  psi_cmd->add_option("--tol", tol, "Inversion tolerance (infinity norm)");
  psi_cmd->add_option("--max-iters", max_iters, "Evaluation budget for inversion");

  auto* face = app.add_subcommand("face", "Dominant-face and face membership of a point");
  add_spec(face);
  std::string point_text;
  std::optional<std::string> s_text, t_text;
  face->add_option("--point", point_text, "R1,..,RK,C1,..,CL")->required();
  face->add_option("--S", s_text, "User subset, e.g. 1,2 (1-based; empty for none)");
  face->add_option("--T", t_text, "Relay subset, e.g. 1");

  auto* slice = app.add_subcommand("slice", "CSV membership grid over two coordinates");
  add_spec(slice);
  std::string axes_text = "R1,C1", base_text, range_text = "0,1";
  std::size_t steps = 21;
  slice->add_option("--axes", axes_text, "Two coordinates, e.g. R1,C1");
  slice->add_option("--at", base_text, "Values of all coordinates (the two axes are overwritten)");
  slice->add_option("--range", range_text, "lo,hi for both axes");
  slice->add_option("--steps", steps, "Grid points per axis");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  cli::Context ctx{out, err, app.get_subcommands().front()->get_name(), spec_path};
  try {
    const AnySpec spec = load_spec(spec_path);
    if (corners->parsed()) return cli::cmd_corners(ctx, spec, dedup_tol, format);
    if (verify->parsed()) return cli::cmd_verify(ctx, spec, suite, seed, samples);
    if (psi_cmd->parsed()) return cli::cmd_psi(ctx, spec, alpha_text, invert_text, tol, max_iters);
    if (face->parsed()) return cli::cmd_face(ctx, spec, point_text, s_text, t_text);
    if (slice->parsed()) return cli::cmd_slice(ctx, spec, axes_text, base_text, range_text, steps);
  } catch (const SpecError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace cran
