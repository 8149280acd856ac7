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

#include "qpdext/gates.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace qpdext::gates {

ComplexMatrix pauli_x() {
  ComplexMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

ComplexMatrix pauli_y() {
  ComplexMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}

ComplexMatrix pauli_z() {
  ComplexMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

ComplexMatrix hadamard() {
  ComplexMatrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}

ComplexMatrix cnot() {
  ComplexMatrix m = identity(4);
  m(2, 2) = m(3, 3) = 0;
  m(2, 3) = m(3, 2) = 1;
  return m;
}

ComplexMatrix cz() {
  ComplexMatrix m = identity(4);
  m(3, 3) = -1;
  return m;
}

ComplexMatrix swap() {
  ComplexMatrix m = ComplexMatrix::Zero(4, 4);
  m(0, 0) = m(3, 3) = 1;
  m(1, 2) = m(2, 1) = 1;
  return m;
}

ComplexMatrix toffoli() {
  ComplexMatrix m = identity(8);
  m(6, 6) = m(7, 7) = 0;
  m(6, 7) = m(7, 6) = 1;
  return m;
}

ComplexMatrix pauli_exp(const ComplexMatrix& p, double angle) {
  return std::cos(angle) * identity(static_cast<int>(p.rows())) + Complex(0, std::sin(angle)) * p;
}

ComplexMatrix zz(double theta) { return pauli_exp(kron(pauli_z(), pauli_z()), theta); }

ComplexMatrix permute_qubits(const ComplexMatrix& u, std::span<const int> order) {
  const int n = static_cast<int>(order.size());
  if (u.rows() != (1 << n)) throw std::invalid_argument("permute_qubits: size mismatch");
  return permute_subsystems(u, DimProfile(std::vector<int>(n, 2)), order);
}

BuiltinGate BuiltinGate::parse(const std::string& spec) {
  constexpr std::string_view prefix = "builtin:";
  if (spec.rfind(prefix, 0) != 0)
    throw std::invalid_argument("gate '" + spec + "' does not start with 'builtin:'");
  const std::string body = spec.substr(prefix.size());
  if (body == "cnot" || body == "cz" || body == "swap" || body == "toffoli") return {body, std::nullopt};
  if (body.rfind("zz(", 0) == 0 && body.back() == ')') {
    const std::string arg = body.substr(3, body.size() - 4);
    double theta = 0.0;
    const auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), theta);
    if (ec != std::errc() || ptr != arg.data() + arg.size() || !std::isfinite(theta))
      throw std::invalid_argument("gate '" + spec + "': cannot parse angle");
    return {"zz", theta};
  }
  throw std::invalid_argument("unknown built-in gate '" + spec + "'");
}

std::string BuiltinGate::spec() const {
  if (!theta) return "builtin:" + name;
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), *theta);
  return "builtin:" + name + "(" + std::string(buf, ptr) + ")";
}

int BuiltinGate::qubits() const { return name == "toffoli" ? 3 : 2; }

ComplexMatrix BuiltinGate::unitary() const {
  if (name == "cnot") return cnot();
  if (name == "cz") return cz();
  if (name == "swap") return swap();
  if (name == "toffoli") return toffoli();
  if (name == "zz") return zz(theta.value_or(0.0));
  throw std::invalid_argument("unknown built-in gate '" + name + "'");
}

}  // namespace qpdext::gates
