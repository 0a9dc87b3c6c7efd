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

// Variational problems evaluated through knit programs: QAOA Max-Cut and
// VQE losses, parameter-shift gradients, and two gradient-descent drivers
// that differ only in which fragments they re-simulate per parameter.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "knitvqa/circuit.hpp"
#include "knitvqa/knitting.hpp"
#include "knitvqa/reconstruct.hpp"
#include "knitvqa/simulator.hpp"

namespace knitvqa {

enum class ProblemKind { QaoaMaxCut, Vqe };

[[nodiscard]] std::string_view to_string(ProblemKind kind) noexcept;

/// Expected cut value as an observable: sum_w/2 offset, -w/2 Z_u Z_v per edge.
[[nodiscard]] Observable maxcut_observable(const WeightedGraph &graph);

/// Optimal cut by enumerating bipartitions with the last node pinned. n <= 20.
[[nodiscard]] double max_cut_value(const WeightedGraph &graph);

[[nodiscard]] double approximation_ratio(double expected_cut, double optimal_cut);

struct ProblemInstance {
    ProblemKind kind = ProblemKind::Vqe;
    WeightedGraph graph;    ///< QAOA only
    Observable hamiltonian; ///< VQE Hamiltonian, or the cut observable for QAOA
    double reference = 0.0; ///< optimal cut (QAOA) or ground energy (VQE)

    [[nodiscard]] static ProblemInstance maxcut(WeightedGraph graph);
    [[nodiscard]] static ProblemInstance vqe(Observable hamiltonian);

    [[nodiscard]] std::size_t num_qubits() const noexcept {
        return hamiltonian.num_qubits();
    }
    /// Observable whose expectation is the loss: -cut for QAOA, H for VQE.
    [[nodiscard]] Observable loss_observable() const;
    /// r for QAOA, delta for VQE.
    [[nodiscard]] double performance(double loss) const;
    /// Minimized search objective: 1 - r or delta.
    [[nodiscard]] double performance_loss(double loss) const;
};

/// QAOA template with shared (gamma, beta) slots per layer: H on every qubit,
/// then per layer CX.RZ(2 w gamma).CX on each edge and RX(2 beta) mixers.
[[nodiscard]] Circuit qaoa_circuit(const WeightedGraph &graph, std::size_t layers);

[[nodiscard]] double loss(const KnitProgram &program, const ProblemInstance &problem,
                          const std::vector<double> &theta,
                          const NoisePolicy &noise = std::nullopt);

[[nodiscard]] std::vector<double>
parameter_shift_grad(const KnitProgram &program, const ProblemInstance &problem,
                     const std::vector<double> &theta,
                     const NoisePolicy &noise = std::nullopt);

struct FragmentIndex {
    std::vector<std::vector<std::size_t>> fragments; ///< slot -> fragments
    std::vector<std::size_t> counts;                 ///< K_i per slot
    std::size_t fragment_count = 0;
    double acceleration = 0.0; ///< mean of K_i / fragment_count; 0 without slots
};

[[nodiscard]] FragmentIndex param_fragment_index(const KnitProgram &program);

struct TrainConfig {
    std::size_t max_iterations = 500;
    double threshold = 1e-6;
    double step = 0.05;
    NoisePolicy noise;
};

struct TrainReport {
    std::vector<double> theta_star;
    std::vector<double> loss_history;
    double final_loss = 0.0;
    double performance = 0.0;
    std::size_t iterations = 0;
    /// Full fragment simulations (every QPD variant of one fragment).
    std::size_t fragment_executions = 0;
    /// Fragment simulations spent on each slot's gradient.
    std::vector<std::size_t> slot_executions;
    double wall_time_s = 0.0;
};

void to_json(nlohmann::json &j, const TrainReport &report);

/// Gradient descent where each shifted evaluation re-simulates only the
/// fragments holding the shifted slot and reuses cached tables elsewhere.
[[nodiscard]] TrainReport train_subcircuit(const KnitProgram &program,
                                           const ProblemInstance &problem,
                                           std::vector<double> theta0,
                                           const TrainConfig &config = {});

/// Baseline: every shifted evaluation re-simulates all fragments.
[[nodiscard]] TrainReport train_full(const KnitProgram &program,
                                     const ProblemInstance &problem,
                                     std::vector<double> theta0,
                                     const TrainConfig &config = {});

/// Uniform angles in [-pi, pi).
[[nodiscard]] std::vector<double> random_parameters(std::size_t count,
                                                    std::uint64_t seed);

} // namespace knitvqa
