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

#include "knitvqa/simulator.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace knitvqa {

namespace {

constexpr Complex kI{0.0, 1.0};

struct PauliMasks {
    std::size_t x = 0;
    std::size_t z = 0;
    Complex global{1.0, 0.0};
};

PauliMasks pauli_masks(std::string_view pauli, std::size_t n) {
    if (pauli.size() != n) {
        throw std::invalid_argument("pauli string length " +
                                    std::to_string(pauli.size()) +
                                    " does not match " + std::to_string(n) +
                                    " qubits");
    }
    PauliMasks m;
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t bit = std::size_t{1} << (n - 1 - q);
        switch (pauli[q]) {
        case 'I':
            break;
        case 'X':
            m.x |= bit;
            break;
        case 'Y':
            m.x |= bit;
            m.z |= bit;
            m.global *= kI;
            break;
        case 'Z':
            m.z |= bit;
            break;
        default:
            throw std::invalid_argument("bad pauli letter");
        }
    }
    return m;
}

// P|b> = phase(b) |b ^ x>.
inline Complex pauli_phase(const PauliMasks &m, std::size_t b) noexcept {
    return (std::popcount(b & m.z) & 1U) ? -m.global : m.global;
}

void apply_on_bit(std::vector<Complex> &v, std::size_t bit, const Mat2 &op) {
    const std::size_t stride = std::size_t{1} << bit;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i & stride) {
            continue;
        }
        const Complex a0 = v[i];
        const Complex a1 = v[i | stride];
        v[i] = op[0] * a0 + op[1] * a1;
        v[i | stride] = op[2] * a0 + op[3] * a1;
    }
}

void cx_on_bits(std::vector<Complex> &v, std::size_t cbit, std::size_t tbit) {
    const std::size_t c = std::size_t{1} << cbit;
    const std::size_t t = std::size_t{1} << tbit;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if ((i & c) && !(i & t)) {
            std::swap(v[i], v[i | t]);
        }
    }
}

void cz_on_bits(std::vector<Complex> &v, std::size_t abit, std::size_t bbit) {
    const std::size_t mask = (std::size_t{1} << abit) | (std::size_t{1} << bbit);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if ((i & mask) == mask) {
            v[i] = -v[i];
        }
    }
}

Mat2 conj(const Mat2 &a) noexcept {
    return {std::conj(a[0]), std::conj(a[1]), std::conj(a[2]), std::conj(a[3])};
}

Mat2 scaled(const Mat2 &a, double s) noexcept {
    return {a[0] * s, a[1] * s, a[2] * s, a[3] * s};
}

void check_qubit(Qubit q, std::size_t n) {
    if (q >= n) {
        throw std::out_of_range("qubit " + std::to_string(q) +
                                " out of range for " + std::to_string(n) +
                                " qubits");
    }
}

double real_checked(Complex value, double scale) {
    if (std::abs(value.imag()) > 1e-9 * std::max(1.0, scale)) {
        throw std::runtime_error("expectation has imaginary part " +
                                 std::to_string(value.imag()));
    }
    return value.real();
}

double coefficient_scale(const Observable &obs) {
    double s = std::abs(obs.offset());
    for (const auto &t : obs.terms()) {
        s += std::abs(t.coefficient);
    }
    return s;
}

} // namespace

Mat2 gate_matrix(GateKind kind, double angle) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    const double r = 1.0 / std::sqrt(2.0);
    switch (kind) {
    case GateKind::RX:
        return {c, -kI * s, -kI * s, c};
    case GateKind::RY:
        return {c, -s, s, c};
    case GateKind::RZ:
        return {std::polar(1.0, -angle / 2.0), 0.0, 0.0,
                std::polar(1.0, angle / 2.0)};
    case GateKind::H:
        return {r, r, r, -r};
    case GateKind::X:
        return {0.0, 1.0, 1.0, 0.0};
    case GateKind::Y:
        return {0.0, -kI, kI, 0.0};
    case GateKind::Z:
        return {1.0, 0.0, 0.0, -1.0};
    case GateKind::S:
        return {1.0, 0.0, 0.0, kI};
    default:
        throw std::invalid_argument("gate_matrix: " +
                                    std::string(to_string(kind)) +
                                    " is not a single-qubit gate");
    }
}

Mat2 matmul(const Mat2 &a, const Mat2 &b) noexcept {
    return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3],
            a[2] * b[0] + a[3] * b[2], a[2] * b[1] + a[3] * b[3]};
}

Mat2 adjoint(const Mat2 &a) noexcept {
    return {std::conj(a[0]), std::conj(a[2]), std::conj(a[1]), std::conj(a[3])};
}

// ---------------------------------------------------------------------------

StateVector::StateVector(std::size_t num_qubits)
    : n_(num_qubits), amp_(std::size_t{1} << num_qubits) {
    amp_[0] = 1.0;
}

StateVector::StateVector(std::size_t num_qubits, std::vector<Complex> amplitudes)
    : n_(num_qubits), amp_(std::move(amplitudes)) {
    if (amp_.size() != (std::size_t{1} << n_)) {
        throw std::invalid_argument("statevector needs 2^n amplitudes");
    }
}

double StateVector::squared_norm() const noexcept {
    double s = 0.0;
    for (const auto &a : amp_) {
        s += std::norm(a);
    }
    return s;
}

void StateVector::apply(const Mat2 &op, Qubit q) {
    check_qubit(q, n_);
    apply_on_bit(amp_, n_ - 1 - q, op);
}

void StateVector::apply_cx(Qubit control, Qubit target) {
    check_qubit(control, n_);
    check_qubit(target, n_);
    cx_on_bits(amp_, n_ - 1 - control, n_ - 1 - target);
}

void StateVector::apply_cz(Qubit a, Qubit b) {
    check_qubit(a, n_);
    check_qubit(b, n_);
    cz_on_bits(amp_, n_ - 1 - a, n_ - 1 - b);
}

void StateVector::apply(const BoundGate &gate) {
    switch (gate.kind) {
    case GateKind::CX:
        apply_cx(gate.qubits[0], gate.qubits[1]);
        return;
    case GateKind::CZ:
        apply_cz(gate.qubits[0], gate.qubits[1]);
        return;
    case GateKind::Identity2:
        check_qubit(gate.qubits[0], n_);
        check_qubit(gate.qubits[1], n_);
        return;
    default:
        apply(gate_matrix(gate.kind, gate.angle), gate.qubits[0]);
    }
}

Complex StateVector::pauli_expectation(std::string_view pauli) const {
    const auto m = pauli_masks(pauli, n_);
    Complex acc = 0.0;
    for (std::size_t b = 0; b < amp_.size(); ++b) {
        acc += std::conj(amp_[b ^ m.x]) * pauli_phase(m, b) * amp_[b];
    }
    return acc;
}

// ---------------------------------------------------------------------------

DensityMatrix::DensityMatrix(std::size_t num_qubits)
    : n_(num_qubits), dim_(std::size_t{1} << num_qubits) {
    if (n_ > kMaxQubits) {
        throw std::length_error("density matrix limited to " +
                                std::to_string(kMaxQubits) + " qubits");
    }
    rho_.assign(dim_ * dim_, 0.0);
    rho_[0] = 1.0;
}

DensityMatrix DensityMatrix::from_state(const StateVector &psi) {
    DensityMatrix d(psi.num_qubits());
    const auto &a = psi.amplitudes();
    for (std::size_t r = 0; r < d.dim_; ++r) {
        for (std::size_t c = 0; c < d.dim_; ++c) {
            d.rho_[r * d.dim_ + c] = a[r] * std::conj(a[c]);
        }
    }
    return d;
}

Complex DensityMatrix::trace() const noexcept {
    Complex t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) {
        t += rho_[i * dim_ + i];
    }
    return t;
}

// The flattened index is row * dim + col: row qubit q sits at bit
// (2n - 1 - q), column qubit q at bit (n - 1 - q).
void DensityMatrix::conjugate(const Mat2 &op, Qubit q) {
    check_qubit(q, n_);
    apply_on_bit(rho_, 2 * n_ - 1 - q, op);
    apply_on_bit(rho_, n_ - 1 - q, conj(op));
}

void DensityMatrix::apply_cx(Qubit control, Qubit target) {
    check_qubit(control, n_);
    check_qubit(target, n_);
    cx_on_bits(rho_, 2 * n_ - 1 - control, 2 * n_ - 1 - target);
    cx_on_bits(rho_, n_ - 1 - control, n_ - 1 - target);
}

void DensityMatrix::apply_cz(Qubit a, Qubit b) {
    check_qubit(a, n_);
    check_qubit(b, n_);
    cz_on_bits(rho_, 2 * n_ - 1 - a, 2 * n_ - 1 - b);
    cz_on_bits(rho_, n_ - 1 - a, n_ - 1 - b);
}

void DensityMatrix::apply(const BoundGate &gate) {
    switch (gate.kind) {
    case GateKind::CX:
        apply_cx(gate.qubits[0], gate.qubits[1]);
        return;
    case GateKind::CZ:
        apply_cz(gate.qubits[0], gate.qubits[1]);
        return;
    case GateKind::Identity2:
        check_qubit(gate.qubits[0], n_);
        check_qubit(gate.qubits[1], n_);
        return;
    default:
        conjugate(gate_matrix(gate.kind, gate.angle), gate.qubits[0]);
    }
}

void DensityMatrix::apply_map(const std::vector<Mat2> &kraus,
                              const std::vector<int> &signs, Qubit q) {
    check_qubit(q, n_);
    if (kraus.size() != signs.size()) {
        throw std::invalid_argument("apply_map: kraus/sign size mismatch");
    }
    if (kraus.size() == 1 && signs[0] == 1) {
        conjugate(kraus[0], q);
        return;
    }
    std::vector<Complex> acc(rho_.size(), 0.0);
    for (std::size_t b = 0; b < kraus.size(); ++b) {
        auto branch = rho_;
        apply_on_bit(branch, 2 * n_ - 1 - q, kraus[b]);
        apply_on_bit(branch, n_ - 1 - q, conj(kraus[b]));
        const double s = signs[b];
        for (std::size_t i = 0; i < acc.size(); ++i) {
            acc[i] += s * branch[i];
        }
    }
    rho_ = std::move(acc);
}

Complex DensityMatrix::pauli_expectation(std::string_view pauli) const {
    const auto m = pauli_masks(pauli, n_);
    Complex acc = 0.0;
    for (std::size_t b = 0; b < dim_; ++b) {
        acc += pauli_phase(m, b) * rho_[b * dim_ + (b ^ m.x)];
    }
    return acc;
}

// ---------------------------------------------------------------------------

std::string_view to_string(NoiseKind kind) noexcept {
    switch (kind) {
    case NoiseKind::Depolarizing:
        return "DEP";
    case NoiseKind::AmplitudeDamping:
        return "AMP";
    case NoiseKind::PhaseDamping:
        return "PHA";
    case NoiseKind::ThermalRelaxation:
        return "THE";
    }
    return "?";
}

NoiseKind noise_kind_from_string(std::string_view name) {
    for (auto k : {NoiseKind::Depolarizing, NoiseKind::AmplitudeDamping,
                   NoiseKind::PhaseDamping, NoiseKind::ThermalRelaxation}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown noise kind '" + std::string(name) +
                                "' (expected DEP, AMP, PHA or THE)");
}

NoiseChannel NoiseChannel::make(NoiseKind kind, double p) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw std::invalid_argument("noise probability must lie in [0, 1]");
    }
    NoiseChannel ch{kind, p, {}};
    const Mat2 id{1.0, 0.0, 0.0, 1.0};
    const Mat2 damp0{1.0, 0.0, 0.0, std::sqrt(1.0 - p)};
    const Mat2 amp1{0.0, std::sqrt(p), 0.0, 0.0};
    const Mat2 pha1{0.0, 0.0, 0.0, std::sqrt(p)};
    switch (kind) {
    case NoiseKind::Depolarizing:
        // rho -> (1 - p) rho + p I/2
        ch.kraus = {scaled(id, std::sqrt(1.0 - 0.75 * p)),
                    scaled(gate_matrix(GateKind::X), std::sqrt(p / 4.0)),
                    scaled(gate_matrix(GateKind::Y), std::sqrt(p / 4.0)),
                    scaled(gate_matrix(GateKind::Z), std::sqrt(p / 4.0))};
        break;
    case NoiseKind::AmplitudeDamping:
        ch.kraus = {damp0, amp1};
        break;
    case NoiseKind::PhaseDamping:
        ch.kraus = {damp0, pha1};
        break;
    case NoiseKind::ThermalRelaxation:
        // amplitude damping followed by dephasing, zero excited population
        for (const auto &pk : {damp0, pha1}) {
            for (const auto &ak : {damp0, amp1}) {
                ch.kraus.push_back(matmul(pk, ak));
            }
        }
        break;
    }
    return ch;
}

// ---------------------------------------------------------------------------

StateVector run_statevector(const BoundCircuit &circuit) {
    return run_statevector(circuit, StateVector(circuit.num_qubits()));
}

StateVector run_statevector(const BoundCircuit &circuit, StateVector initial) {
    if (initial.num_qubits() != circuit.num_qubits()) {
        throw std::invalid_argument("initial state has " +
                                    std::to_string(initial.num_qubits()) +
                                    " qubits, circuit has " +
                                    std::to_string(circuit.num_qubits()));
    }
    for (const auto &g : circuit.gates()) {
        initial.apply(g);
    }
    return initial;
}

DensityMatrix run_density(const BoundCircuit &circuit, const NoisePolicy &noise) {
    DensityMatrix rho(circuit.num_qubits());
    std::vector<int> signs;
    if (noise) {
        signs.assign(noise->kraus.size(), 1);
    }
    for (const auto &g : circuit.gates()) {
        rho.apply(g);
        if (noise) {
            for (std::size_t i = 0; i < g.arity(); ++i) {
                rho.apply_map(noise->kraus, signs, g.qubits[i]);
            }
        }
    }
    return rho;
}

double expectation(const StateVector &state, const Observable &obs) {
    if (obs.num_qubits() != state.num_qubits()) {
        throw std::invalid_argument("observable/state qubit count mismatch");
    }
    Complex acc = obs.offset() * state.squared_norm();
    for (const auto &t : obs.terms()) {
        acc += t.coefficient * state.pauli_expectation(t.pauli);
    }
    return real_checked(acc, coefficient_scale(obs));
}

double expectation(const DensityMatrix &state, const Observable &obs) {
    if (obs.num_qubits() != state.num_qubits()) {
        throw std::invalid_argument("observable/state qubit count mismatch");
    }
    Complex acc = obs.offset() * state.trace();
    for (const auto &t : obs.terms()) {
        acc += t.coefficient * state.pauli_expectation(t.pauli);
    }
    return real_checked(acc, coefficient_scale(obs));
}

std::vector<Complex> dense_matrix(const Observable &obs) {
    const std::size_t n = obs.num_qubits();
    const std::size_t dim = std::size_t{1} << n;
    std::vector<Complex> h(dim * dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i) {
        h[i * dim + i] += obs.offset();
    }
    for (const auto &t : obs.terms()) {
        const auto m = pauli_masks(t.pauli, n);
        for (std::size_t b = 0; b < dim; ++b) {
            h[(b ^ m.x) * dim + b] += t.coefficient * pauli_phase(m, b);
        }
    }
    return h;
}

double exact_ground_energy(const Observable &obs) {
    if (obs.num_qubits() > 12) {
        throw std::length_error("exact_ground_energy limited to 12 qubits");
    }
    const auto h = dense_matrix(obs);
    const auto dim = static_cast<Eigen::Index>(std::size_t{1} << obs.num_qubits());
    Eigen::MatrixXcd m(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
        for (Eigen::Index c = 0; c < dim; ++c) {
            m(r, c) = h[static_cast<std::size_t>(r * dim + c)];
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw std::runtime_error("eigensolver failed to converge");
    }
    return solver.eigenvalues()(0);
}

} // namespace knitvqa
