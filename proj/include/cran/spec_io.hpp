#pragma once

// JSON spec files. Tensors are nested arrays in row-major order: users
// outermost, then relays, outputs last.
//
// uplink:   {"direction": "uplink", "K", "L",
//            "alphabets": {"X": [...], "Y": [...], "Yhat": [...]},
//            "input_pmfs": [[...], ...],
//            "channel": p(y_1..y_L | x_1..x_K) nested as [x1]...[xK][y1]...[yL],
//            "test_channels": [p(yhat_l | y_l) nested as [y][yhat], ...]}
// downlink: {"direction": "downlink", "K", "L",
//            "alphabets": {"U": [...], "X": [...], "Y": [...]},
//            "aux_joint": p(u, x) nested as [u1]...[uK][x1]...[xL],
//            "channel": p(y_1..y_K | x_1..x_L) nested as [x1]...[xL][y1]...[yK]}

#include <fstream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cran/downlink.hpp"
#include "cran/uplink.hpp"

namespace cran {

using Json = nlohmann::ordered_json;
using AnySpec = std::variant<UplinkSpec, DownlinkSpec>;

namespace detail {

inline const Json& field(const Json& obj, const std::string& name, const std::string& path) {
  if (!obj.is_object()) throw SpecError(path + ": expected an object");
  auto it = obj.find(name);
  if (it == obj.end()) throw SpecError((path.empty() ? name : path + "." + name) + ": missing field");
  return *it;
}

inline std::size_t positive_int(const Json& v, const std::string& path) {
  if (!v.is_number_integer() || v.get<long long>() < 1) throw SpecError(path + ": expected a positive integer");
  return v.get<std::size_t>();
}

inline std::vector<std::size_t> sizes(const Json& v, std::size_t count, const std::string& path) {
  if (!v.is_array() || v.size() != count) {
    throw SpecError(path + ": expected an array of " + std::to_string(count) + " alphabet sizes");
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < count; ++i) out.push_back(positive_int(v[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

/// Flattens a nested array whose axis lengths are `shape`.
inline void flatten(const Json& v, std::span<const std::size_t> shape, const std::string& path, std::vector<double>& out) {
  if (shape.empty()) {
    if (!v.is_number()) throw SpecError(path + ": expected a number");
    out.push_back(v.get<double>());
    return;
  }
  if (!v.is_array() || v.size() != shape[0]) {
    throw SpecError(path + ": expected an array of " + std::to_string(shape[0]) + " entries");
  }
  for (std::size_t i = 0; i < shape[0]; ++i) flatten(v[i], shape.subspan(1), path + "[" + std::to_string(i) + "]", out);
}

inline std::vector<double> tensor(const Json& v, std::span<const std::size_t> shape, const std::string& path) {
  std::vector<double> out;
  flatten(v, shape, path, out);
  return out;
}

inline Json nest(std::span<const double> flat, std::span<const std::size_t> shape) {
  if (shape.empty()) return flat[0];
  Json arr = Json::array();
  const std::size_t stride = flat.size() / shape[0];
  for (std::size_t i = 0; i < shape[0]; ++i) arr.push_back(nest(flat.subspan(i * stride, stride), shape.subspan(1)));
  return arr;
}

inline std::vector<std::size_t> concat(std::vector<std::size_t> a, const std::vector<std::size_t>& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline std::string line_col(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

}  // namespace detail

inline UplinkSpec parse_uplink(const Json& j) {
  const std::size_t K = detail::positive_int(detail::field(j, "K", ""), "K");
  const std::size_t L = detail::positive_int(detail::field(j, "L", ""), "L");
  const Json& al = detail::field(j, "alphabets", "");
  UplinkSpec s;
  const auto xs = detail::sizes(detail::field(al, "X", "alphabets"), K, "alphabets.X");
  s.output_sizes = detail::sizes(detail::field(al, "Y", "alphabets"), L, "alphabets.Y");
  s.quant_sizes = detail::sizes(detail::field(al, "Yhat", "alphabets"), L, "alphabets.Yhat");

  const Json& pmfs = detail::field(j, "input_pmfs", "");
  if (!pmfs.is_array() || pmfs.size() != K) throw SpecError("input_pmfs: expected an array of " + std::to_string(K) + " pmfs");
  for (std::size_t k = 0; k < K; ++k) {
    const std::size_t shape[] = {xs[k]};
    s.input_pmfs.push_back(detail::tensor(pmfs[k], shape, "input_pmfs[" + std::to_string(k) + "]"));
  }
  s.channel = detail::tensor(detail::field(j, "channel", ""), detail::concat(xs, s.output_sizes), "channel");

  const Json& tcs = detail::field(j, "test_channels", "");
  if (!tcs.is_array() || tcs.size() != L) {
    throw SpecError("test_channels: expected an array of " + std::to_string(L) + " channels");
  }
  for (std::size_t l = 0; l < L; ++l) {
    const std::size_t shape[] = {s.output_sizes[l], s.quant_sizes[l]};
    s.test_channels.push_back(detail::tensor(tcs[l], shape, "test_channels[" + std::to_string(l) + "]"));
  }
  build_uplink_joint(s);
  return s;
}

inline DownlinkSpec parse_downlink(const Json& j) {
  const std::size_t K = detail::positive_int(detail::field(j, "K", ""), "K");
  const std::size_t L = detail::positive_int(detail::field(j, "L", ""), "L");
  const Json& al = detail::field(j, "alphabets", "");
  DownlinkSpec s;
  s.aux_sizes = detail::sizes(detail::field(al, "U", "alphabets"), K, "alphabets.U");
  s.input_sizes = detail::sizes(detail::field(al, "X", "alphabets"), L, "alphabets.X");
  s.output_sizes = detail::sizes(detail::field(al, "Y", "alphabets"), K, "alphabets.Y");
  s.aux_joint = detail::tensor(detail::field(j, "aux_joint", ""), detail::concat(s.aux_sizes, s.input_sizes), "aux_joint");
  s.channel = detail::tensor(detail::field(j, "channel", ""), detail::concat(s.input_sizes, s.output_sizes), "channel");
  build_downlink_joint(s);
  return s;
}

inline AnySpec parse_spec(const Json& j) {
  const Json& dir = detail::field(j, "direction", "");
  if (dir == "uplink") return parse_uplink(j);
  if (dir == "downlink") return parse_downlink(j);
  throw SpecError("direction: expected \"uplink\" or \"downlink\"");
}

inline AnySpec parse_spec_text(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SpecError("malformed JSON at " + detail::line_col(text, e.byte) + ": " + e.what());
  }
  return parse_spec(j);
}

inline AnySpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open spec file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec_text(buf.str());
}

inline Json to_json(const UplinkSpec& s) {
  Json j;
  j["direction"] = "uplink";
  j["K"] = s.users();
  j["L"] = s.relays();
  const auto xs = s.input_sizes();
  j["alphabets"] = {{"X", xs}, {"Y", s.output_sizes}, {"Yhat", s.quant_sizes}};
  j["input_pmfs"] = s.input_pmfs;
  j["channel"] = detail::nest(s.channel, detail::concat(xs, s.output_sizes));
  Json tcs = Json::array();
  for (std::size_t l = 0; l < s.relays(); ++l) {
    const std::size_t shape[] = {s.output_sizes[l], s.quant_sizes[l]};
    tcs.push_back(detail::nest(s.test_channels[l], shape));
  }
  j["test_channels"] = tcs;
  return j;
}

inline Json to_json(const DownlinkSpec& s) {
  Json j;
  j["direction"] = "downlink";
  j["K"] = s.users();
  j["L"] = s.relays();
  j["alphabets"] = {{"U", s.aux_sizes}, {"X", s.input_sizes}, {"Y", s.output_sizes}};
  j["aux_joint"] = detail::nest(s.aux_joint, detail::concat(s.aux_sizes, s.input_sizes));
  j["channel"] = detail::nest(s.channel, detail::concat(s.input_sizes, s.output_sizes));
  return j;
}

inline Json to_json(const AnySpec& s) {
  return std::visit([](const auto& v) { return to_json(v); }, s);
}

}  // namespace cran
