// Copyright 2026 The knitvqa Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at

//     http://www.apache.org/licenses/LICENSE-2.0

// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "knitvqa/circuit.hpp"

namespace knitvqa {

using Complex = std::complex<double>;

/// Row-major 2x2 complex matrix.
using Mat2 = std::array<Complex, 4>;

[[nodiscard]] Mat2 gate_matrix(GateKind kind, double angle = 0.0);
[[nodiscard]] Mat2 matmul(const Mat2 &a, const Mat2 &b) noexcept;
[[nodiscard]] Mat2 adjoint(const Mat2 &a) noexcept;

/// Pure state over n qubits. Qubit 0 is the most significant bit of the
/// amplitude index.
class StateVector {
  public:
    explicit StateVector(std::size_t num_qubits);
    StateVector(std::size_t num_qubits, std::vector<Complex> amplitudes);

    [[nodiscard]] std::size_t num_qubits() const noexcept { return n_; }
    [[nodiscard]] const std::vector<Complex> &amplitudes() const noexcept {
        return amp_;
    }
    [[nodiscard]] double squared_norm() const noexcept;

    /// Applies an arbitrary (not necessarily unitary) 2x2 operator.
    void apply(const Mat2 &op, Qubit q);
    void apply_cx(Qubit control, Qubit target);
    void apply_cz(Qubit a, Qubit b);
    void apply(const BoundGate &gate);

    /// <psi|P|psi> for a Pauli string; complex for unnormalized inputs only
    /// through rounding.
    [[nodiscard]] Complex pauli_expectation(std::string_view pauli) const;

  private:
    std::size_t n_;
    std::vector<Complex> amp_;
};

/// Dense 2^n x 2^n density operator, row-major.
class DensityMatrix {
  public:
    static constexpr std::size_t kMaxQubits = 10;

    explicit DensityMatrix(std::size_t num_qubits);
    [[nodiscard]] static DensityMatrix from_state(const StateVector &psi);

    [[nodiscard]] std::size_t num_qubits() const noexcept { return n_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] Complex at(std::size_t row, std::size_t col) const {
        return rho_[row * dim_ + col];
    }
    [[nodiscard]] const std::vector<Complex> &entries() const noexcept {
        return rho_;
    }
    [[nodiscard]] Complex trace() const noexcept;

    /// rho -> K rho K^dagger on one qubit.
    void conjugate(const Mat2 &op, Qubit q);
    void apply(const BoundGate &gate);
    /// rho -> sum_b sign_b K_b rho K_b^dagger.
    void apply_map(const std::vector<Mat2> &kraus, const std::vector<int> &signs,
                   Qubit q);

    [[nodiscard]] Complex pauli_expectation(std::string_view pauli) const;

  private:
    std::size_t n_;
    std::size_t dim_;
    std::vector<Complex> rho_;

    void apply_cx(Qubit control, Qubit target);
    void apply_cz(Qubit a, Qubit b);
};

enum class NoiseKind { Depolarizing, AmplitudeDamping, PhaseDamping, ThermalRelaxation };

[[nodiscard]] std::string_view to_string(NoiseKind kind) noexcept;
/// Accepts DEP, AMP, PHA, THE.
[[nodiscard]] NoiseKind noise_kind_from_string(std::string_view name);

struct NoiseChannel {
    NoiseKind kind = NoiseKind::Depolarizing;
    double probability = 0.0;
    std::vector<Mat2> kraus;

    [[nodiscard]] static NoiseChannel make(NoiseKind kind, double probability);
};

/// Noise attached after every gate, on each operand qubit independently.
using NoisePolicy = std::optional<NoiseChannel>;

[[nodiscard]] StateVector run_statevector(const BoundCircuit &circuit);
[[nodiscard]] StateVector run_statevector(const BoundCircuit &circuit,
                                          StateVector initial);
[[nodiscard]] DensityMatrix run_density(const BoundCircuit &circuit,
                                        const NoisePolicy &noise = std::nullopt);

[[nodiscard]] double expectation(const StateVector &state, const Observable &obs);
[[nodiscard]] double expectation(const DensityMatrix &state,
                                 const Observable &obs);

/// Dense Hermitian matrix of the observable (offset included), row-major.
[[nodiscard]] std::vector<Complex> dense_matrix(const Observable &obs);

/// Smallest eigenvalue of the observable by dense diagonalization (n <= 12).
[[nodiscard]] double exact_ground_energy(const Observable &obs);

} // namespace knitvqa
