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

#include "qpdext/io.hpp"

#include <openssl/evp.h>

#include <fstream>
#include <set>
#include <sstream>

#include "qpdext/gates.hpp"

namespace qpdext::io {

namespace {

void check_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path.empty() ? "/" : path, "expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!ok.count(k)) throw SchemaError(path + "/" + k, "unknown field");
}

const Json& field(const Json& j, const char* key, const std::string& path) {
  const auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path + "/" + key, "missing field");
  return *it;
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) throw SchemaError(path, "expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& path) {
  if (!j.is_number_integer()) throw SchemaError(path, "expected an integer");
  return j.get<int>();
}

std::vector<int> int_list(const Json& j, const std::string& path) {
  if (!j.is_array()) throw SchemaError(path, "expected an array of integers");
  std::vector<int> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(integer(j[i], path + "/" + std::to_string(i)));
  return out;
}

template <class F>
auto rethrow_as_schema(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw SchemaError(path.empty() ? "/" : path, e.what());
  }
}

Json weighted_to_json(const WeightedMap& w) {
  return {{"b", w.weight ? Json(*w.weight) : Json(nullptr)}, {"map", to_json(w.map)}};
}

std::vector<WeightedMap> instrument_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) throw SchemaError(path, "expected a nonempty array of outcomes");
  std::vector<WeightedMap> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    check_keys(j[i], {"b", "map"}, p);
    std::optional<double> b;
    if (j[i].contains("b") && !j[i]["b"].is_null()) b = number(j[i]["b"], p + "/b");
    out.push_back({channel_from_json(field(j[i], "map", p), p + "/map"), b});
  }
  return out;
}

}  // namespace

std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::invalid_argument("cannot open '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::filesystem::path& p) {
  const std::string text = read_text_file(p);
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // Translate the byte offset into line and column.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw std::invalid_argument(p.string() + ":" + std::to_string(line) + ":" + std::to_string(col) +
                                ": malformed JSON");
  }
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 15]);
  }
  return out;
}

Json to_json(const ComplexMatrix& m) {
  Json re = Json::array(), im = Json::array();
  bool any_im = false;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json rr = Json::array(), ir = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      rr.push_back(m(r, c).real());
      ir.push_back(m(r, c).imag());
      any_im = any_im || m(r, c).imag() != 0.0;
    }
    re.push_back(std::move(rr));
    im.push_back(std::move(ir));
  }
  Json j = {{"rows", m.rows()}, {"cols", m.cols()}, {"re", std::move(re)}};
  if (any_im) j["im"] = std::move(im);
  return j;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& path) {
  check_keys(j, {"rows", "cols", "re", "im"}, path);
  const int rows = integer(field(j, "rows", path), path + "/rows");
  const int cols = integer(field(j, "cols", path), path + "/cols");
  if (rows < 1 || cols < 1) throw SchemaError(path, "matrix dimensions must be positive");
  ComplexMatrix m = ComplexMatrix::Zero(rows, cols);
  auto fill = [&](const char* key, bool imag) {
    const std::string p = path + "/" + key;
    const Json& a = j[key];
    if (!a.is_array() || static_cast<int>(a.size()) != rows) throw SchemaError(p, "expected " + std::to_string(rows) + " rows");
    for (int r = 0; r < rows; ++r) {
      const std::string pr = p + "/" + std::to_string(r);
      if (!a[r].is_array() || static_cast<int>(a[r].size()) != cols)
        throw SchemaError(pr, "expected " + std::to_string(cols) + " columns");
      for (int c = 0; c < cols; ++c) {
        const double v = number(a[r][c], pr + "/" + std::to_string(c));
        if (imag) m(r, c) += Complex(0, v);
        else m(r, c) += v;
      }
    }
  };
  field(j, "re", path);
  fill("re", false);
  if (j.contains("im")) fill("im", true);
  return m;
}

Json to_json(const ChoiChannel& ch) {
  const auto& d = ch.dims();
  return {{"choi", to_json(ch.choi())},
          {"dims", {{"A", d.a}, {"Ap", d.ap}, {"B", d.b}, {"Bp", d.bp}}},
          {"norm", "trace1"}};
}

ChoiChannel channel_from_json(const Json& j, const std::string& path) {
  check_keys(j, {"choi", "dims", "norm"}, path);
  const Json& dj = field(j, "dims", path);
  const std::string dp = path + "/dims";
  check_keys(dj, {"A", "Ap", "B", "Bp"}, dp);
  ChannelDims d;
  d.a = integer(field(dj, "A", dp), dp + "/A");
  d.ap = integer(field(dj, "Ap", dp), dp + "/Ap");
  d.b = dj.contains("B") ? integer(dj["B"], dp + "/B") : 1;
  d.bp = dj.contains("Bp") ? integer(dj["Bp"], dp + "/Bp") : 1;
  ChoiNormalization norm = ChoiNormalization::trace_one;
  if (j.contains("norm")) {
    const Json& n = j["norm"];
    if (n == "trace1") norm = ChoiNormalization::trace_one;
    else if (n == "trace_din") norm = ChoiNormalization::trace_din;
    else throw SchemaError(path + "/norm", "expected \"trace1\" or \"trace_din\"");
  }
  ComplexMatrix choi = matrix_from_json(field(j, "choi", path), path + "/choi");
  return rethrow_as_schema(path, [&] { return ChoiChannel(std::move(choi), d, norm); });
}

Json to_json(const Qpd& q) {
  Json terms = Json::array();
  for (const auto& t : q.terms) {
    if (t.elements.size() == 1) {
      const auto& e = t.elements.front();
      terms.push_back({{"a", t.coeff}, {"b", e.weight ? Json(*e.weight) : Json(nullptr)}, {"map", to_json(e.map)}});
    } else {
      Json inst = Json::array();
      for (const auto& e : t.elements) inst.push_back(weighted_to_json(e));
      terms.push_back({{"a", t.coeff}, {"instrument", std::move(inst)}});
    }
  }
  return {{"target", to_json(q.target)}, {"terms", std::move(terms)}};
}

Qpd qpd_from_json(const Json& j, const std::string& path) {
  check_keys(j, {"target", "terms"}, path);
  Qpd q;
  q.target = channel_from_json(field(j, "target", path), path + "/target");
  const Json& terms = field(j, "terms", path);
  if (!terms.is_array() || terms.empty()) throw SchemaError(path + "/terms", "expected a nonempty array");
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string p = path + "/terms/" + std::to_string(i);
    check_keys(terms[i], {"a", "b", "map", "instrument"}, p);
    const double a = number(field(terms[i], "a", p), p + "/a");
    if (terms[i].contains("instrument")) {
      if (terms[i].contains("map") || terms[i].contains("b"))
        throw SchemaError(p, "a term has either \"map\" or \"instrument\", not both");
      auto outcomes = instrument_from_json(terms[i]["instrument"], p + "/instrument");
      q.terms.push_back(rethrow_as_schema(p, [&] { return QpdTerm(a, std::move(outcomes)); }));
    } else {
      std::optional<double> b;
      if (terms[i].contains("b") && !terms[i]["b"].is_null()) b = number(terms[i]["b"], p + "/b");
      ChoiChannel map = channel_from_json(field(terms[i], "map", p), p + "/map");
      q.terms.push_back(rethrow_as_schema(p, [&] { return QpdTerm(a, std::move(map), b); }));
    }
  }
  return q;
}

Json to_json(const Dictionary& d) {
  Json entries = Json::array();
  for (const auto& e : d.entries) {
    Json inst = Json::array();
    for (const auto& o : e.outcomes) inst.push_back(weighted_to_json(o));
    entries.push_back({{"label", e.label}, {"instrument", std::move(inst)}});
  }
  return {{"name", d.name},
          {"dims", {{"A", d.dims.a}, {"Ap", d.dims.ap}, {"B", d.dims.b}, {"Bp", d.dims.bp}}},
          {"entries", std::move(entries)}};
}

Dictionary dictionary_from_json(const Json& j, const std::string& path) {
  check_keys(j, {"name", "dims", "entries"}, path);
  Dictionary d;
  const Json& name = field(j, "name", path);
  if (!name.is_string()) throw SchemaError(path + "/name", "expected a string");
  d.name = name.get<std::string>();
  const Json& dj = field(j, "dims", path);
  const std::string dp = path + "/dims";
  check_keys(dj, {"A", "Ap", "B", "Bp"}, dp);
  d.dims = {integer(field(dj, "A", dp), dp + "/A"), integer(field(dj, "Ap", dp), dp + "/Ap"),
            integer(field(dj, "B", dp), dp + "/B"), integer(field(dj, "Bp", dp), dp + "/Bp")};
  const Json& entries = field(j, "entries", path);
  if (!entries.is_array()) throw SchemaError(path + "/entries", "expected an array");
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string p = path + "/entries/" + std::to_string(i);
    check_keys(entries[i], {"label", "instrument"}, p);
    const Json& label = field(entries[i], "label", p);
    if (!label.is_string()) throw SchemaError(p + "/label", "expected a string");
    d.entries.push_back({label.get<std::string>(), instrument_from_json(field(entries[i], "instrument", p), p + "/instrument")});
  }
  rethrow_as_schema(path, [&] { d.validate(); return 0; });
  return d;
}

Json to_json(const ExtentResult& r, bool with_certificate) {
  const auto& s = r.residuals;
  Json res = {{"status", to_string(s.status)},
              {"primal_objective", s.primal_objective},
              {"dual_objective", s.dual_objective},
              {"gap", s.gap},
              {"primal_infeasibility", s.primal_infeasibility},
              {"dual_infeasibility", s.dual_infeasibility},
              {"iterations", s.iterations},
              {"free_vars", s.free_vars}};
  if (r.method == ExtentMethod::lp) res["reconstruction_error"] = s.reconstruction_error;
  Json j = {{"gamma", r.value}, {"method", to_string(r.method)}, {"residuals", std::move(res)}};
  if (r.method != ExtentMethod::analytic) j["certified_lower"] = r.certified_lower;
  Json cert = nullptr;
  if (with_certificate && r.qpd) {
    cert = to_json(*r.qpd);
    cert["labels"] = r.labels;
  } else if (with_certificate && !r.multipliers.empty()) {
    Json ms = Json::array();
    for (const auto& m : r.multipliers) ms.push_back(to_json(m));
    cert = {{"multipliers", std::move(ms)}};
  }
  j["certificate"] = std::move(cert);
  return j;
}

Json to_json(const EstimatorReport& r) {
  return {{"estimate", r.estimate},
          {"shots", r.shots},
          {"empiricalStdErr", r.empirical_stderr},
          {"variance", r.variance},
          {"l1Product", r.l1_product},
          {"seed", r.seed},
          {"mode", r.mode == TrajectoryMode::linear ? "linear" : "sampled"},
          {"observableNorm", r.observable_norm},
          {"maxAbsValue", r.max_abs_value}};
}

Json to_json(const SweepRow& r) {
  return {{"cuts", r.cuts},
          {"l1Product", r.l1_product},
          {"estimate", r.estimate},
          {"variance", r.variance},
          {"empiricalStdErr", r.empirical_stderr},
          {"shots", r.shots}};
}

ComplexMatrix pauli_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty Pauli string");
  std::vector<ComplexMatrix> factors;
  for (char c : s) {
    switch (c) {
      case 'I': factors.push_back(identity(2)); break;
      case 'X': factors.push_back(gates::pauli_x()); break;
      case 'Y': factors.push_back(gates::pauli_y()); break;
      case 'Z': factors.push_back(gates::pauli_z()); break;
      default: throw std::invalid_argument(std::string("bad Pauli letter '") + c + "'");
    }
  }
  return kron_all(factors);
}

Circuit circuit_from_json(const Json& j, const std::filesystem::path& base_dir) {
  check_keys(j, {"n", "ops", "obs"}, "");
  Circuit c;
  c.qubit_count = integer(field(j, "n", ""), "/n");
  if (c.qubit_count < 1 || c.qubit_count > kMaxQubits)
    throw SchemaError("/n", "qubit count must be in [1, " + std::to_string(kMaxQubits) + "]");
  const Json& ops = field(j, "ops", "");
  if (!ops.is_array()) throw SchemaError("/ops", "expected an array");
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const std::string p = "/ops/" + std::to_string(i);
    const Json& op = ops[i];
    if (op.is_object() && op.contains("u")) {
      check_keys(op, {"u", "q"}, p);
      c.ops.push_back(GateOp{matrix_from_json(op["u"], p + "/u"), int_list(field(op, "q", p), p + "/q")});
      continue;
    }
    check_keys(op, {"cut", "qa", "qb"}, p);
    const Json& ref = field(op, "cut", p);
    Qpd qpd;
    if (ref.is_object()) {
      qpd = qpd_from_json(ref, p + "/cut");
    } else if (ref.is_string() && ref.get<std::string>().rfind("builtin:", 0) == 0) {
      qpd = rethrow_as_schema(p + "/cut", [&] {
        const auto gate = gates::BuiltinGate::parse(ref.get<std::string>());
        if (gate.qubits() != 2) throw std::invalid_argument("only two-qubit built-ins can be cut");
        const auto r = synthesize_qpd_lp(choi_of_unitary(gate.unitary(), ChannelDims::bipartite(2, 2)),
                                         lo_star_qubit_dictionary());
        if (!r.ok() || !r.qpd) throw std::invalid_argument("LP synthesis failed for " + gate.spec());
        return *r.qpd;
      });
    } else if (ref.is_string()) {
      std::filesystem::path f = ref.get<std::string>();
      if (f.is_relative()) f = base_dir / f;
      qpd = qpd_from_json(read_json_file(f), f.string() + "#");
    } else {
      throw SchemaError(p + "/cut", "expected a QPD object, a file path or a built-in gate name");
    }
    c.ops.push_back(CutOp{std::move(qpd), int_list(field(op, "qa", p), p + "/qa"),
                          int_list(field(op, "qb", p), p + "/qb")});
  }
  const Json& obs = field(j, "obs", "");
  if (obs.is_string()) c.observable = rethrow_as_schema("/obs", [&] { return pauli_string(obs.get<std::string>()); });
  else c.observable = matrix_from_json(obs, "/obs");
  rethrow_as_schema("", [&] { c.validate(); return 0; });
  return c;
}

}  // namespace qpdext::io
