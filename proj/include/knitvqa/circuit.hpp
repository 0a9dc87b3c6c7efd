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
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace knitvqa {

using Qubit = std::size_t;

enum class GateKind { RX, RY, RZ, H, X, Y, Z, S, CX, CZ, Identity2 };

[[nodiscard]] bool is_rotation(GateKind kind) noexcept;
[[nodiscard]] bool is_two_qubit(GateKind kind) noexcept;
[[nodiscard]] std::string_view to_string(GateKind kind) noexcept;
/// Parses the names produced by `to_string` ("RX", "CX", "IDENTITY2", ...).
[[nodiscard]] GateKind gate_kind_from_string(std::string_view name);

/// Reference to a trainable parameter. The gate angle is `scale * theta[index]`.
struct Slot {
    std::size_t index = 0;
    double scale = 1.0;

    friend bool operator==(const Slot &, const Slot &) = default;
};

using Angle = std::variant<double, Slot>;

struct Gate {
    GateKind kind = GateKind::H;
    std::array<Qubit, 2> qubits{};
    std::optional<Angle> angle;

    [[nodiscard]] static Gate rotation(GateKind kind, Qubit q, Angle angle);
    [[nodiscard]] static Gate single(GateKind kind, Qubit q);
    [[nodiscard]] static Gate two(GateKind kind, Qubit a, Qubit b);

    [[nodiscard]] std::size_t arity() const noexcept {
        return is_two_qubit(kind) ? 2 : 1;
    }
    [[nodiscard]] std::optional<Slot> slot() const noexcept;

    friend bool operator==(const Gate &, const Gate &) = default;
};

/// Ordered gate list over `num_qubits` qubits. Immutable once constructed;
/// the constructor validates every gate.
class Circuit {
  public:
    Circuit() = default;
    Circuit(std::size_t num_qubits, std::vector<Gate> gates,
            std::size_t num_params);

    [[nodiscard]] std::size_t num_qubits() const noexcept { return n_; }
    [[nodiscard]] std::size_t num_params() const noexcept { return params_; }
    [[nodiscard]] const std::vector<Gate> &gates() const noexcept {
        return gates_;
    }

    friend bool operator==(const Circuit &, const Circuit &) = default;

  private:
    std::size_t n_ = 0;
    std::vector<Gate> gates_;
    std::size_t params_ = 0;
};

struct BoundGate {
    GateKind kind = GateKind::H;
    std::array<Qubit, 2> qubits{};
    double angle = 0.0;

    [[nodiscard]] std::size_t arity() const noexcept {
        return is_two_qubit(kind) ? 2 : 1;
    }
};

class BoundCircuit {
  public:
    BoundCircuit() = default;
    BoundCircuit(std::size_t num_qubits, std::vector<BoundGate> gates);

    [[nodiscard]] std::size_t num_qubits() const noexcept { return n_; }
    [[nodiscard]] const std::vector<BoundGate> &gates() const noexcept {
        return gates_;
    }

  private:
    std::size_t n_ = 0;
    std::vector<BoundGate> gates_;
};

/// Replaces every slot by `scale * theta[index]`. A function object, so an
/// unqualified call never picks up std::bind through argument lookup.
struct BindFn {
    [[nodiscard]] BoundCircuit operator()(const Circuit &circuit,
                                          const std::vector<double> &theta) const;
};
inline constexpr BindFn bind{};

/// Slot index -> ascending gate positions using that slot. Every slot in
/// [0, num_params) has an entry, possibly empty.
using ParameterTable = std::vector<std::vector<std::size_t>>;
[[nodiscard]] ParameterTable parameter_table(const Circuit &circuit);

// ---------------------------------------------------------------------------
// Ansatz templates

struct Placement {
    GateKind kind = GateKind::CX;
    Qubit a = 0;
    Qubit b = 1;

    friend bool operator==(const Placement &, const Placement &) = default;
    friend auto operator<=>(const Placement &, const Placement &) = default;
};

/// One ansatz layer: a single-qubit row (one kind per qubit, applied first)
/// followed by two-qubit placements in listed order.
struct AnsatzLayer {
    std::vector<GateKind> singles;
    std::vector<Placement> placements;

    friend bool operator==(const AnsatzLayer &, const AnsatzLayer &) = default;
};

struct AnsatzSpec {
    std::vector<AnsatzLayer> layers;

    [[nodiscard]] std::size_t depth() const noexcept { return layers.size(); }
    /// Canonical text form, used as a deduplication key during search.
    [[nodiscard]] std::string key() const;

    friend bool operator==(const AnsatzSpec &, const AnsatzSpec &) = default;
};

/// Expands the spec layer by layer. Rotations get fresh slots in emission
/// order; fixed single-qubit kinds (H, X, ...) take no slot.
[[nodiscard]] Circuit build_ansatz(const AnsatzSpec &spec, std::size_t n);

// ---------------------------------------------------------------------------
// Observables

struct PauliTerm {
    double coefficient = 0.0;
    std::string pauli;

    friend bool operator==(const PauliTerm &, const PauliTerm &) = default;
};

/// Real-weighted Pauli sum plus a scalar offset. Duplicate strings are merged
/// on construction, keeping first-occurrence order.
class Observable {
  public:
    Observable() = default;
    Observable(std::size_t num_qubits, std::vector<PauliTerm> terms,
               double offset = 0.0);

    [[nodiscard]] std::size_t num_qubits() const noexcept { return n_; }
    [[nodiscard]] const std::vector<PauliTerm> &terms() const noexcept {
        return terms_;
    }
    [[nodiscard]] double offset() const noexcept { return offset_; }

  private:
    std::size_t n_ = 0;
    std::vector<PauliTerm> terms_;
    double offset_ = 0.0;
};

/// Parses `<coefficient> <pauli-string>` lines; `#` starts a comment.
/// Errors carry the offending line number.
[[nodiscard]] Observable parse_observable(std::string_view text);
[[nodiscard]] std::string format_observable(const Observable &obs);

// ---------------------------------------------------------------------------
// JSON

void to_json(nlohmann::json &j, const Gate &gate);
void from_json(const nlohmann::json &j, Gate &gate);
void to_json(nlohmann::json &j, const Circuit &circuit);
void from_json(const nlohmann::json &j, Circuit &circuit);
void to_json(nlohmann::json &j, const AnsatzSpec &spec);
void from_json(const nlohmann::json &j, AnsatzSpec &spec);

} // namespace knitvqa
