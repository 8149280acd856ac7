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

#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "json.hpp"
#include "qpdext/channel.hpp"
#include "qpdext/extent.hpp"
#include "qpdext/qpsim.hpp"

namespace qpdext::io {

using Json = nlohmann::json;

/// Schema violation; `path()` is a JSON pointer to the offending field.
class SchemaError : public std::invalid_argument {
 public:
  SchemaError(const std::string& path, const std::string& what)
      : std::invalid_argument(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

/// Parses a file; syntax errors are reported with line and column.
Json read_json_file(const std::filesystem::path& p);
std::string read_text_file(const std::filesystem::path& p);
std::string sha256_hex(const std::string& bytes);

// {"rows", "cols", "re": [[...]], "im": [[...]]}; "im" may be omitted.
Json to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, const std::string& path = "");

// {"choi": <matrix>, "dims": {"A", "Ap", "B", "Bp"}, "norm": "trace1" | "trace_din"}
Json to_json(const ChoiChannel& ch);
ChoiChannel channel_from_json(const Json& j, const std::string& path = "");

// {"target": <channel>, "terms": [{"a", "b": number | null, "map": <channel>}
//                                | {"a", "instrument": [{"b", "map"}]}]}
Json to_json(const Qpd& q);
Qpd qpd_from_json(const Json& j, const std::string& path = "");

// {"name", "dims", "entries": [{"label", "instrument": [{"b", "map"}]}]}
Json to_json(const Dictionary& d);
Dictionary dictionary_from_json(const Json& j, const std::string& path = "");

Json to_json(const ExtentResult& r, bool with_certificate = true);
Json to_json(const EstimatorReport& r);
Json to_json(const SweepRow& r);

/// Circuit JSON: {"n", "ops": [{"u": <matrix>, "q": [..]} |
///                             {"cut": <qpd-ref>, "qa": [..], "qb": [..]}],
///                "obs": <matrix> | "<pauli string>"}.
/// A qpd-ref is an inline QPD, a path to a QPD file (relative to
/// `base_dir`), or a built-in gate name, which is decomposed by LP
/// synthesis over the LO* qubit dictionary.
Circuit circuit_from_json(const Json& j, const std::filesystem::path& base_dir = {});

/// Tensor product of single-qubit Paulis, e.g. "ZZ" or "IXZ".
ComplexMatrix pauli_string(const std::string& s);

}  // namespace qpdext::io
