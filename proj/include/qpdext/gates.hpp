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

#include <optional>
#include <span>
#include <string>

#include "qpdext/qmat.hpp"

namespace qpdext::gates {

ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();
ComplexMatrix hadamard();
ComplexMatrix cnot();
ComplexMatrix cz();
ComplexMatrix swap();
ComplexMatrix toffoli();

/// exp(i angle P) = cos(angle) 1 + i sin(angle) P for a Pauli-type P with P^2 = 1.
ComplexMatrix pauli_exp(const ComplexMatrix& p, double angle);

/// exp(i theta Z (x) Z).
ComplexMatrix zz(double theta);

/// Reorders the qubits of an n-qubit operator: qubit k of the result is
/// qubit order[k] of the input.
ComplexMatrix permute_qubits(const ComplexMatrix& u, std::span<const int> order);

/// Named gate from the built-in library: `builtin:cnot`, `builtin:cz`,
/// `builtin:swap`, `builtin:toffoli`, `builtin:zz(theta)`.
struct BuiltinGate {
  std::string name;
  std::optional<double> theta;

  static BuiltinGate parse(const std::string& spec);
  std::string spec() const;
  int qubits() const;
  ComplexMatrix unitary() const;
};

}  // namespace qpdext::gates
