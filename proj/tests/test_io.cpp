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

#include <gtest/gtest.h>

#include <filesystem>
#include <algorithm>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "qpdext/extent.hpp"
#include "qpdext/gates.hpp"
#include "qpdext/io.hpp"

using namespace qpdext;
using io::Json;

namespace {

const ChannelDims kTwo = ChannelDims::bipartite(2, 2);

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto p = std::filesystem::temp_directory_path() / ("qpdext_io_" + name);
  std::ofstream(p) << text;
  return p;
}

// Returns the path carried by the SchemaError raised by f, or "" if none.
template <class F>
std::string schema_path(F&& f) {
  try {
    f();
  } catch (const io::SchemaError& e) {
    return e.path();
  }
  return "";
}

}  // namespace

TEST(Io, MatrixRoundTripIsExact) {
  std::mt19937_64 rng(3);
  const ComplexMatrix m = oracle::random_gaussian(rng, 3, 5);
  const Json j = Json::parse(io::to_json(m).dump());
  EXPECT_EQ(io::matrix_from_json(j), m);
  // Real matrices may omit "im".
  const Json r = {{"rows", 1}, {"cols", 2}, {"re", {{1.0, -2.5}}}};
  const ComplexMatrix rm = io::matrix_from_json(r);
  EXPECT_EQ(rm(0, 1), Complex(-2.5, 0.0));
}

TEST(Io, MatrixSchemaErrors) {
  EXPECT_EQ(schema_path([] { io::matrix_from_json(Json{{"rows", 2}, {"cols", 1}}, "/m"); }), "/m/re");
  EXPECT_EQ(schema_path([] {
              io::matrix_from_json(Json{{"rows", 1}, {"cols", 1}, {"re", {{1.0}}}, {"bogus", 1}}, "/m");
            }),
            "/m/bogus");
  EXPECT_NE(schema_path([] { io::matrix_from_json(Json{{"rows", 2}, {"cols", 1}, {"re", {{1.0}}}}); }), "");
  EXPECT_NE(schema_path([] { io::matrix_from_json(Json{{"rows", 1}, {"cols", 1}, {"re", {{"x"}}}}); }), "");
}

TEST(Io, ChannelRoundTrip) {
  std::mt19937_64 rng(5);
  const auto ch = choi_of_unitary(oracle::random_unitary(rng, 4), kTwo);
  const auto back = io::channel_from_json(Json::parse(io::to_json(ch).dump()));
  EXPECT_EQ(back.dims(), ch.dims());
  EXPECT_LT(choi_distance(back, ch), 1e-15);
  // trace_din input is rescaled to the stored convention.
  Json j = io::to_json(ch);
  j["choi"] = io::to_json(ch.choi_unnormalized());
  j["norm"] = "trace_din";
  EXPECT_LT(choi_distance(io::channel_from_json(j), ch), 1e-14);
  j["norm"] = "trace2";
  EXPECT_EQ(schema_path([&] { io::channel_from_json(j, "/target"); }), "/target/norm");
  j["norm"] = "trace1";
  j["dims"]["Bp"] = 3;
  EXPECT_THROW(io::channel_from_json(j), std::invalid_argument);
}

TEST(Io, QpdRoundTripIncludingInstruments) {
  const auto id = choi_of_unitary(identity(2), ChannelDims::local(2, 2));
  const Qpd q = hptp_to_cptp_qpd(id);
  const Qpd back = io::qpd_from_json(Json::parse(io::to_json(q).dump()));
  ASSERT_EQ(back.terms.size(), q.terms.size());
  EXPECT_DOUBLE_EQ(back.l1(), q.l1());
  EXPECT_LT(qpd_validate(back).reconstruction_error, 1e-12);

  const auto dict = lo_star_qubit_dictionary();
  const auto e = *std::find_if(dict.entries.begin(), dict.entries.end(),
                               [](const DictionaryEntry& x) { return x.outcomes.size() > 1; });
  const Qpd inst{e.effective_map(), {QpdTerm(1.0, e.outcomes)}};
  const Json j = io::to_json(inst);
  ASSERT_TRUE(j["terms"][0].contains("instrument"));
  const Qpd ib = io::qpd_from_json(j);
  EXPECT_EQ(ib.terms[0].elements.size(), e.outcomes.size());
  EXPECT_LT(choi_distance(ib.terms[0].effective_map(), e.effective_map()), 1e-15);
}

TEST(Io, QpdSchemaErrors) {
  const auto id = choi_of_unitary(identity(2), ChannelDims::local(2, 2));
  Json j = io::to_json(Qpd{id, {QpdTerm(1.0, id)}});
  j["terms"][0]["instrument"] = Json::array({{{"b", 1.0}, {"map", io::to_json(id)}}});
  EXPECT_NE(schema_path([&] { io::qpd_from_json(j); }).find("/terms/0"), std::string::npos);
  j["terms"] = Json::array();
  EXPECT_EQ(schema_path([&] { io::qpd_from_json(j); }), "/terms");
  j["extra"] = true;
  EXPECT_EQ(schema_path([&] { io::qpd_from_json(j); }), "/extra");
}

TEST(Io, DictionaryRoundTrip) {
  const Dictionary d = lo_star_qubit_dictionary();
  Dictionary small{d.name, d.dims, {d.entries.begin(), d.entries.begin() + 20}};
  const Dictionary back = io::dictionary_from_json(Json::parse(io::to_json(small).dump()));
  EXPECT_EQ(back.name, small.name);
  ASSERT_EQ(back.entries.size(), 20u);
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_EQ(back.entries[i].label, small.entries[i].label);
    EXPECT_LT(choi_distance(back.entries[i].effective_map(), small.entries[i].effective_map()), 1e-15);
  }
  EXPECT_NO_THROW(back.validate());
}

TEST(Io, CircuitFromJson) {
  const Json j = Json::parse(R"({
    "n": 2,
    "ops": [{"u": {"rows": 2, "cols": 2, "re": [[0.7071067811865476, 0.7071067811865476],
                                                [0.7071067811865476, -0.7071067811865476]]}, "q": [0]},
            {"cut": "builtin:cnot", "qa": [0], "qb": [1]}],
    "obs": "ZZ"})");
  const Circuit c = io::circuit_from_json(j);
  EXPECT_EQ(c.qubit_count, 2);
  ASSERT_EQ(c.ops.size(), 2u);
  const auto& cut = std::get<CutOp>(c.ops[1]);
  EXPECT_NEAR(cut.qpd.l1(), 3.0, 1e-9);
  EXPECT_NEAR(exact_expectation(c), 1.0, 1e-12);

  // A cut given as a file, relative to the base directory.
  const auto qfile = temp_file("cut.json", io::to_json(cut.qpd).dump());
  Json jf = j;
  jf["ops"][1]["cut"] = qfile.filename().string();
  const Circuit cf = io::circuit_from_json(jf, qfile.parent_path());
  EXPECT_NEAR(std::get<CutOp>(cf.ops[1]).qpd.l1(), 3.0, 1e-9);
}

TEST(Io, CircuitSchemaErrors) {
  const Json base = {{"n", 2}, {"ops", Json::array()}, {"obs", "ZI"}};
  EXPECT_NO_THROW(io::circuit_from_json(base));
  Json j = base;
  j["n"] = 11;
  EXPECT_EQ(schema_path([&] { io::circuit_from_json(j); }), "/n");
  j = base;
  j["obs"] = "ZQ";
  EXPECT_EQ(schema_path([&] { io::circuit_from_json(j); }), "/obs");
  j = base;
  j["ops"] = Json::array({{{"cut", "builtin:toffoli"}, {"qa", {0}}, {"qb", {1}}}});
  EXPECT_EQ(schema_path([&] { io::circuit_from_json(j); }), "/ops/0/cut");
  j["ops"][0]["cut"] = 4;
  EXPECT_EQ(schema_path([&] { io::circuit_from_json(j); }), "/ops/0/cut");
  j["ops"][0] = {{"u", io::to_json(identity(2))}, {"q", {0}}, {"note", "x"}};
  EXPECT_EQ(schema_path([&] { io::circuit_from_json(j); }), "/ops/0/note");
  j = base;
  j["obs"] = "ZZZ";
  EXPECT_THROW(io::circuit_from_json(j), std::invalid_argument);
}

TEST(Io, ParseErrorsCarryLineAndColumn) {
  const auto p = temp_file("bad.json", "{\n  \"n\": ,\n}\n");
  try {
    io::read_json_file(p);
    FAIL() << "expected a parse error";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(io::read_json_file("/nonexistent/qpdext.json"), std::invalid_argument);
}

TEST(Io, Sha256KnownAnswers) {
  EXPECT_EQ(io::sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(io::sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Io, PauliString) {
  EXPECT_EQ(io::pauli_string("Z"), gates::pauli_z());
  EXPECT_LT((io::pauli_string("XZ") - oracle::kron(gates::pauli_x(), gates::pauli_z())).norm(), 1e-15);
  EXPECT_EQ(io::pauli_string("IYI").rows(), 8);
  EXPECT_THROW(io::pauli_string(""), std::invalid_argument);
  EXPECT_THROW(io::pauli_string("A"), std::invalid_argument);
}

TEST(Io, ReportsUseStableKeys) {
  EstimatorReport r;
  r.estimate = 0.5;
  r.mode = TrajectoryMode::sampled;
  const Json j = io::to_json(r);
  for (const char* k : {"estimate", "shots", "empiricalStdErr", "variance", "l1Product", "seed", "mode",
                        "observableNorm", "maxAbsValue"})
    EXPECT_TRUE(j.contains(k)) << k;
  EXPECT_EQ(j["mode"], "sampled");
}
