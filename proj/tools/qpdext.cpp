// Copyright 2026 The qpdext Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// qpdext: batch front end for extent computation, QPD synthesis and
// cut-circuit estimation. Exit status 0 on success, 1 on invalid input,
// 2 when a solver stops short of optimality.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qpdext/extent.hpp"
#include "qpdext/gates.hpp"
#include "qpdext/io.hpp"
#include "qpdext/qpsim.hpp"

#ifndef QPDEXT_VERSION
#define QPDEXT_VERSION "unknown"
#endif

namespace {

using qpdext::io::Json;
namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitSolver = 2;

struct Settings {
  std::string command;
  std::map<std::string, std::string> raw;  // flag name -> value
};

const std::map<std::string, std::set<std::string>> kCommandFlags = {
    {"extent-ppt", {"gate", "split", "tol-gap", "tol-feas"}},
    {"extent-state", {"schmidt", "state", "tol-gap", "tol-feas"}},
    {"extent-analytic", {"schmidt", "kak"}},
    {"synth", {"gate", "split", "dict", "tol-gap", "tol-feas"}},
    {"cut-run", {"circuit", "shots", "mode"}},
    {"sweep", {"gate", "dict", "cuts", "shots", "mode", "tol-gap", "tol-feas"}},
};
const std::set<std::string> kCommonFlags = {"seed", "out", "format"};

const std::vector<std::string> kAllFlags = {"gate",  "split", "schmidt", "kak",     "state",
                                            "circuit", "dict", "cuts",   "shots",   "mode",
                                            "seed",  "tol-gap", "tol-feas", "out", "format"};

std::vector<double> parse_doubles(const std::string& s, const std::string& flag) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
      v = std::stod(tok, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != tok.size() || !std::isfinite(v))
      throw std::invalid_argument("--" + flag + ": cannot parse '" + tok + "' as a number");
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("--" + flag + ": empty list");
  return out;
}

std::vector<int> parse_ints(const std::string& s, const std::string& flag) {
  std::vector<int> out;
  for (double v : parse_doubles(s, flag)) {
    if (v != std::floor(v) || std::abs(v) > 1e9) throw std::invalid_argument("--" + flag + ": expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::int64_t parse_count(const std::string& s, const std::string& flag) {
  std::size_t pos = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != s.size() || v < 0) throw std::invalid_argument("--" + flag + ": expected a nonnegative integer");
  return v;
}

double parse_tol(const std::string& s, const std::string& flag) {
  const double v = parse_doubles(s, flag).at(0);
  if (!(v > 0.0) || v >= 1.0) throw std::invalid_argument("--" + flag + ": tolerance must lie in (0, 1)");
  return v;
}

// Merges the config file under the command-line flags.
void apply_config(const fs::path& path, Settings& st) {
  const Json j = qpdext::io::read_json_file(path);
  if (!j.is_object()) throw std::invalid_argument(path.string() + ": config must be a JSON object");
  const std::set<std::string> known(kAllFlags.begin(), kAllFlags.end());
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) throw std::invalid_argument(path.string() + ": unknown field '" + key + "'");
    std::string text;
    if (value.is_string()) {
      text = value.get<std::string>();
    } else if (value.is_number()) {
      text = value.dump();
    } else if (value.is_array()) {
      for (std::size_t i = 0; i < value.size(); ++i) {
        if (!value[i].is_number()) throw std::invalid_argument(path.string() + ": field '" + key + "' must hold numbers");
        text += (i ? "," : "") + value[i].dump();
      }
    } else {
      throw std::invalid_argument(path.string() + ": field '" + key + "' has an unsupported type");
    }
    st.raw.emplace(key, text);  // flags already present win
  }
}

void check_flags(const Settings& st) {
  const auto& allowed = kCommandFlags.at(st.command);
  for (const auto& [k, v] : st.raw)
    if (!allowed.count(k) && !kCommonFlags.count(k))
      throw std::invalid_argument("--" + k + " is not accepted by '" + st.command + "'");
}

std::string get(const Settings& st, const std::string& k, const std::string& fallback = "") {
  const auto it = st.raw.find(k);
  return it == st.raw.end() ? fallback : it->second;
}

bool has(const Settings& st, const std::string& k) { return st.raw.count(k) > 0; }

struct Target {
  qpdext::ChoiChannel channel;
  Json input;
};

// Resolves --gate (built-in name or channel JSON file) and --split.
Target load_target(const Settings& st, const std::string& default_gate = "") {
  const std::string gate = get(st, "gate", default_gate);
  if (gate.empty()) throw std::invalid_argument("--gate is required");
  Target t;
  if (gate.rfind("builtin:", 0) != 0) {
    if (has(st, "split")) throw std::invalid_argument("--split applies only to built-in gates; channel files carry their dims");
    t.channel = qpdext::io::channel_from_json(qpdext::io::read_json_file(gate), gate + "#");
    t.input = {{"gate", gate}, {"sha256", qpdext::io::sha256_hex(qpdext::io::read_text_file(gate))}};
    return t;
  }
  const auto g = qpdext::gates::BuiltinGate::parse(gate);
  const int n = g.qubits();
  std::vector<int> side_a, side_b;
  const std::string split = get(st, "split", "1:" + std::to_string(n - 1));
  if (split.find('|') != std::string::npos) {
    const auto bar = split.find('|');
    side_a = parse_ints(split.substr(0, bar), "split");
    side_b = parse_ints(split.substr(bar + 1), "split");
  } else {
    const auto colon = split.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("--split: expected 'k:m' or 'qubits|qubits'");
    const auto ka = parse_ints(split.substr(0, colon), "split");
    const auto kb = parse_ints(split.substr(colon + 1), "split");
    if (ka.size() != 1 || kb.size() != 1 || ka[0] < 1 || kb[0] < 1 || ka[0] + kb[0] != n)
      throw std::invalid_argument("--split: sizes must be positive and add up to " + std::to_string(n));
    for (int q = 0; q < n; ++q) (q < ka[0] ? side_a : side_b).push_back(q);
  }
  std::vector<int> order(side_a);
  order.insert(order.end(), side_b.begin(), side_b.end());
  std::vector<int> sorted(order);
  std::sort(sorted.begin(), sorted.end());
  for (int q = 0; q < n; ++q)
    if (static_cast<int>(sorted.size()) != n || sorted[q] != q || side_a.empty() || side_b.empty())
      throw std::invalid_argument("--split: sides must partition qubits 0.." + std::to_string(n - 1));
  const auto u = qpdext::gates::permute_qubits(g.unitary(), order);
  t.channel = qpdext::choi_of_unitary(u, qpdext::ChannelDims::bipartite(1 << side_a.size(), 1 << side_b.size()));
  Json split_json = {{"A", side_a}, {"B", side_b}};
  const std::string canonical = g.spec() + ";" + split_json.dump();
  t.input = {{"gate", g.spec()}, {"split", split_json}, {"sha256", qpdext::io::sha256_hex(canonical)}};
  return t;
}

qpdext::Dictionary load_dictionary(const Settings& st, Json& inputs) {
  const std::string d = get(st, "dict", "builtin:lo-star");
  if (d == "builtin:lo-star") {
    inputs["dict"] = {{"name", d}, {"sha256", qpdext::io::sha256_hex(d)}};
    return qpdext::lo_star_qubit_dictionary();
  }
  inputs["dict"] = {{"name", d}, {"sha256", qpdext::io::sha256_hex(qpdext::io::read_text_file(d))}};
  return qpdext::io::dictionary_from_json(qpdext::io::read_json_file(d), d + "#");
}

qpdext::SdpOptions solver_options(const Settings& st) {
  qpdext::SdpOptions o;
  if (has(st, "tol-gap")) o.gap_tol = parse_tol(get(st, "tol-gap"), "tol-gap");
  if (has(st, "tol-feas")) o.feas_tol = parse_tol(get(st, "tol-feas"), "tol-feas");
  return o;
}

qpdext::TrajectoryMode parse_mode(const Settings& st, const std::string& fallback) {
  const std::string m = get(st, "mode", fallback);
  if (m == "linear") return qpdext::TrajectoryMode::linear;
  if (m == "sampled") return qpdext::TrajectoryMode::sampled;
  throw std::invalid_argument("--mode: expected 'linear' or 'sampled'");
}

struct Outcome {
  Json result;
  Json inputs = Json::object();
  Json tolerances = Json::object();
  bool optimal = true;
  Json table;  // optional rows for csv
};

Json tolerance_json(const qpdext::SdpOptions& o) {
  return {{"gap_tol", o.gap_tol}, {"feas_tol", o.feas_tol}, {"max_iter", o.max_iter}};
}

Outcome run_extent_ppt(const Settings& st) {
  Outcome out;
  const Target t = load_target(st);
  const auto opts = solver_options(st);
  const auto r = qpdext::gamma_ppt_channel(t.channel, opts);
  out.inputs = t.input;
  out.tolerances = tolerance_json(opts);
  out.result = qpdext::io::to_json(r);
  out.optimal = r.ok();
  return out;
}

Outcome run_extent_state(const Settings& st) {
  Outcome out;
  const auto opts = solver_options(st);
  out.tolerances = tolerance_json(opts);
  qpdext::ComplexMatrix rho;
  int da = 0, db = 0;
  if (has(st, "schmidt") == has(st, "state")) throw std::invalid_argument("give exactly one of --schmidt and --state");
  if (has(st, "schmidt")) {
    const auto a = parse_doubles(get(st, "schmidt"), "schmidt");
    da = db = static_cast<int>(a.size());
    qpdext::ComplexMatrix psi = qpdext::ComplexMatrix::Zero(da * db, 1);
    for (int i = 0; i < da; ++i) psi(i * db + i, 0) = a[i];
    rho = psi * psi.adjoint();
    out.inputs = {{"schmidt", a}, {"sha256", qpdext::io::sha256_hex(get(st, "schmidt"))}};
    out.result["pure_state_extent"] = qpdext::pure_state_extent(a);
  } else {
    const std::string path = get(st, "state");
    const Json j = qpdext::io::read_json_file(path);
    if (!j.is_object() || !j.contains("state") || !j.contains("dims") || j.size() != 2)
      throw std::invalid_argument(path + ": expected exactly the fields \"state\" and \"dims\"");
    const auto dims = j["dims"];
    if (!dims.is_array() || dims.size() != 2 || !dims[0].is_number_integer() || !dims[1].is_number_integer())
      throw std::invalid_argument(path + "#/dims: expected [dA, dB]");
    da = dims[0].get<int>();
    db = dims[1].get<int>();
    const auto m = qpdext::io::matrix_from_json(j["state"], path + "#/state");
    rho = m.cols() == 1 ? qpdext::ComplexMatrix(m * m.adjoint()) : m;
    out.inputs = {{"state", path}, {"sha256", qpdext::io::sha256_hex(qpdext::io::read_text_file(path))}};
  }
  const auto r = qpdext::gamma_ppt_state(rho, da, db, opts);
  const Json rj = qpdext::io::to_json(r);
  for (const auto& [k, v] : rj.items()) out.result[k] = v;
  out.optimal = r.ok();
  return out;
}

Outcome run_extent_analytic(const Settings& st) {
  Outcome out;
  if (has(st, "schmidt") == has(st, "kak")) throw std::invalid_argument("give exactly one of --schmidt and --kak");
  const bool pure = has(st, "schmidt");
  const std::string text = get(st, pure ? "schmidt" : "kak");
  const auto a = parse_doubles(text, pure ? "schmidt" : "kak");
  qpdext::ExtentResult r;
  r.method = qpdext::ExtentMethod::analytic;
  r.value = pure ? qpdext::pure_state_extent(a) : qpdext::kak_unitary_extent(a);
  out.inputs = {{pure ? "schmidt" : "kak", a}, {"sha256", qpdext::io::sha256_hex(text)}};
  out.result = {{"gamma", r.value}, {"method", "analytic"}, {"formula", pure ? "pure_state" : "kak_unitary"},
                {"certificate", nullptr}, {"residuals", Json::object()}};
  return out;
}

Outcome run_synth(const Settings& st) {
  Outcome out;
  const Target t = load_target(st);
  out.inputs = t.input;
  const auto dict = load_dictionary(st, out.inputs);
  const auto opts = solver_options(st);
  const auto r = qpdext::synthesize_qpd_lp(t.channel, dict, opts);
  out.tolerances = tolerance_json(opts);
  out.result = qpdext::io::to_json(r);
  out.optimal = r.ok();
  return out;
}

Outcome run_cut(const Settings& st) {
  Outcome out;
  if (!has(st, "circuit")) throw std::invalid_argument("--circuit is required");
  const std::string path = get(st, "circuit");
  const auto c = qpdext::io::circuit_from_json(qpdext::io::read_json_file(path), fs::path(path).parent_path());
  const auto shots = parse_count(get(st, "shots", "100000"), "shots");
  if (shots < 1) throw std::invalid_argument("--shots must be at least 1");
  const auto seed = static_cast<std::uint64_t>(parse_count(get(st, "seed", "0"), "seed"));
  qpdext::EstimatorOptions eo;
  eo.mode = parse_mode(st, "linear");
  const auto rep = qpdext::qps_estimate(c, shots, seed, eo);
  out.inputs = {{"circuit", path}, {"sha256", qpdext::io::sha256_hex(qpdext::io::read_text_file(path))}};
  out.result = qpdext::io::to_json(rep);
  out.result["exact"] = qpdext::exact_expectation(c);
  out.result["shotBound"] = rep.l1_product * rep.observable_norm;
  return out;
}

Outcome run_sweep(const Settings& st) {
  Outcome out;
  const Target t = load_target(st, "builtin:cnot");
  if (!(t.channel.dims() == qpdext::ChannelDims::bipartite(2, 2)))
    throw std::invalid_argument("sweep: the cut gate must act on two qubits split 1:1");
  out.inputs = t.input;
  const auto dict = load_dictionary(st, out.inputs);
  const auto opts = solver_options(st);
  out.tolerances = tolerance_json(opts);
  const auto lp = qpdext::synthesize_qpd_lp(t.channel, dict, opts);
  if (!lp.ok() || !lp.qpd) {
    out.result = {{"synthesis", qpdext::io::to_json(lp, false)}};
    out.optimal = false;
    return out;
  }
  const auto cuts = parse_ints(get(st, "cuts", "0,1,2,3"), "cuts");
  const auto shots = parse_count(get(st, "shots", "200000"), "shots");
  if (shots < 2) throw std::invalid_argument("--shots must be at least 2 for a variance");
  const auto seed = static_cast<std::uint64_t>(parse_count(get(st, "seed", "0"), "seed"));
  qpdext::EstimatorOptions eo;
  eo.mode = parse_mode(st, "sampled");
  const auto rows = qpdext::overhead_sweep([&](int n) { return qpdext::cnot_chain_circuit(n, *lp.qpd); }, cuts,
                                           shots, seed, eo);
  Json table = Json::array();
  for (const auto& r : rows) table.push_back(qpdext::io::to_json(r));
  out.result = {{"rows", table}, {"cut_l1", lp.value}, {"mode", eo.mode == qpdext::TrajectoryMode::linear ? "linear" : "sampled"}};
  if (rows.size() >= 2) {
    const double slope = qpdext::log_variance_slope(rows);
    out.result["log_variance_slope"] = slope;
    out.result["expected_slope"] = 2.0 * std::log(lp.value);
  }
  out.table = table;
  return out;
}

void flatten(const Json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& rows) {
  for (const auto& [k, v] : j.items()) {
    const std::string key = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object()) flatten(v, key, rows);
    else if (v.is_primitive()) rows.emplace_back(key, v.is_string() ? v.get<std::string>() : v.dump());
  }
}

std::string to_csv(const Json& report, const Json& table) {
  std::ostringstream os;
  if (table.is_array() && !table.empty()) {
    std::vector<std::string> cols;
    for (const auto& [k, v] : table[0].items()) cols.push_back(k);
    for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
    os << "\n";
    for (const auto& row : table) {
      for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << row[cols[i]].dump();
      os << "\n";
    }
    return os.str();
  }
  Json scalars = report;
  scalars["result"].erase("certificate");
  std::vector<std::pair<std::string, std::string>> rows;
  flatten(scalars, "", rows);
  os << "field,value\n";
  for (const auto& [k, v] : rows) os << k << "," << v << "\n";
  return os.str();
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

int run(const Settings& st) {
  check_flags(st);
  const std::string format = get(st, "format", "json");
  if (format != "json" && format != "csv") throw std::invalid_argument("--format: expected 'json' or 'csv'");
  const auto seed = parse_count(get(st, "seed", "0"), "seed");

  Outcome o;
  if (st.command == "extent-ppt") o = run_extent_ppt(st);
  else if (st.command == "extent-state") o = run_extent_state(st);
  else if (st.command == "extent-analytic") o = run_extent_analytic(st);
  else if (st.command == "synth") o = run_synth(st);
  else if (st.command == "cut-run") o = run_cut(st);
  else o = run_sweep(st);

  const Json report = {{"tool", "qpdext"},    {"version", QPDEXT_VERSION}, {"command", st.command},
                       {"inputs", o.inputs},  {"tolerances", o.tolerances}, {"seed", seed},
                       {"result", o.result}};
  std::string text;
  if (format == "json") text = Json{{"report", report}, {"generated_at", utc_timestamp()}}.dump(2) + "\n";
  else text = to_csv(report, o.table);

  if (has(st, "out")) {
    std::ofstream f(get(st, "out"), std::ios::binary);
    if (!f) throw std::invalid_argument("cannot write '" + get(st, "out") + "'");
    f << text;
  } else {
    std::cout << text;
  }
  if (!o.optimal) {
    std::cerr << "qpdext: solver did not reach optimality\n";
    return kExitSolver;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasiprobability extents and cut-circuit estimation"};
  app.set_version_flag("--version", std::string(QPDEXT_VERSION));
  Settings st;
  std::vector<std::string> commands;
  for (const auto& [k, v] : kCommandFlags) commands.push_back(k);
  app.add_option("command", st.command, "extent-ppt | extent-state | extent-analytic | synth | cut-run | sweep")
      ->required()
      ->check(CLI::IsMember(commands));
  std::map<std::string, std::string> values;
  const std::map<std::string, std::string> help = {
      {"gate", "builtin:cnot|cz|swap|toffoli|zz(theta), or a channel JSON file"},
      {"split", "bipartition of a built-in gate: sizes 'k:m' or qubit lists 'i,j|k'"},
      {"schmidt", "comma-separated Schmidt coefficients"},
      {"kak", "comma-separated operator-Schmidt coefficients of a unitary"},
      {"state", "state JSON file {\"state\": <matrix>, \"dims\": [dA, dB]}"},
      {"circuit", "circuit JSON file"},
      {"dict", "builtin:lo-star (default) or a dictionary JSON file"},
      {"cuts", "cut counts for the sweep (default 0,1,2,3)"},
      {"shots", "number of shots (per point for sweep)"},
      {"mode", "trajectory mode: linear | sampled"},
      {"seed", "64-bit seed (default 0)"},
      {"tol-gap", "relative duality gap tolerance"},
      {"tol-feas", "relative feasibility tolerance"},
      {"out", "report path (default stdout)"},
      {"format", "json | csv"}};
  for (const auto& name : kAllFlags) app.add_option("--" + name, values[name], help.at(name));
  std::string config;
  app.add_option("--config", config, "JSON file mirroring the flags; flags win");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInvalid;
  }
  for (const auto& name : kAllFlags)
    if (app.get_option("--" + name)->count() > 0) st.raw[name] = values[name];

  try {
    if (!config.empty()) apply_config(config, st);
    return run(st);
  } catch (const std::invalid_argument& e) {
    std::cerr << "qpdext: error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "qpdext: error: " << e.what() << "\n";
    return kExitInvalid;
  }
}
