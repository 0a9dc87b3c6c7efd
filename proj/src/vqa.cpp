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
#include "knitvqa/vqa.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace knitvqa {

namespace {

constexpr double kHalfPi = std::numbers::pi / 2;

struct Occurrence {
    std::size_t fragment;
    std::size_t gate;
    double scale;
};

// Fragment tables for one parameter vector plus the shifted re-evaluations
// the gradient needs. `local` restricts re-simulation to the slot's fragments.
class Objective {
  public:
    Objective(const KnitProgram &program, const ProblemInstance &problem,
              const NoisePolicy &noise)
        : prog_(program), eval_(program, problem.loss_observable(), noise),
          occ_(program.num_params) {
        for (std::size_t f = 0; f < prog_.fragments.size(); ++f) {
            const auto &gates = prog_.fragments[f].circuit.gates();
            for (std::size_t j = 0; j < gates.size(); ++j) {
                const auto slot = gates[j].slot();
                if (!slot) {
                    continue;
                }
                if (!is_rotation(gates[j].kind)) {
                    throw std::invalid_argument(
                        "parameter shift needs Pauli rotations, got " +
                        std::string(to_string(gates[j].kind)));
                }
                occ_[slot->index].push_back({f, j, slot->scale});
            }
        }
    }

    [[nodiscard]] std::size_t fragment_count() const noexcept {
        return prog_.fragments.size();
    }

    void bind_all(const std::vector<double> &theta) {
        if (theta.size() != prog_.num_params) {
            throw std::invalid_argument("theta has " + std::to_string(theta.size()) +
                                        " entries, program expects " +
                                        std::to_string(prog_.num_params));
        }
        bound_.clear();
        tables_.clear();
        for (const auto &frag : prog_.fragments) {
            bound_.push_back(bind(frag.circuit, theta));
        }
        for (std::size_t f = 0; f < bound_.size(); ++f) {
            tables_.push_back(eval_.evaluate(f, bound_[f]));
        }
    }

    [[nodiscard]] double value() const {
        std::vector<const FragmentTable *> ptrs;
        for (const auto &t : tables_) {
            ptrs.push_back(&t);
        }
        return eval_.combine(ptrs);
    }

    // Gradient at the last bound point. `executions[i]` accumulates the
    // fragment simulations spent on slot i.
    [[nodiscard]] std::vector<double> gradient(bool local,
                                               std::vector<std::size_t> &executions) const {
        std::vector<double> grad(prog_.num_params, 0.0);
        std::vector<std::size_t> all(prog_.fragments.size());
        for (std::size_t f = 0; f < all.size(); ++f) {
            all[f] = f;
        }
        for (std::size_t i = 0; i < occ_.size(); ++i) {
            const auto &touched = local ? prog_.param_map[i] : all;
            for (const auto &o : occ_[i]) {
                double diff = 0.0;
                for (const double shift : {kHalfPi, -kHalfPi}) {
                    auto gates = bound_[o.fragment].gates();
                    gates[o.gate].angle += shift;
                    const BoundCircuit shifted(bound_[o.fragment].num_qubits(),
                                               std::move(gates));
                    std::vector<FragmentTable> fresh;
                    fresh.reserve(touched.size());
                    std::vector<const FragmentTable *> ptrs;
                    for (const auto &t : tables_) {
                        ptrs.push_back(&t);
                    }
                    for (std::size_t f : touched) {
                        fresh.push_back(eval_.evaluate(f, f == o.fragment ? shifted : bound_[f]));
                        ptrs[f] = &fresh.back();
                    }
                    executions[i] += touched.size();
                    diff += (shift > 0 ? 0.5 : -0.5) * eval_.combine(ptrs);
                }
                grad[i] += o.scale * diff;
            }
        }
        return grad;
    }

  private:
    const KnitProgram &prog_;
    KnitEvaluator eval_;
    std::vector<std::vector<Occurrence>> occ_;
    std::vector<BoundCircuit> bound_;
    std::vector<FragmentTable> tables_;
};

void check_finite(double value, std::size_t iteration) {
    if (!std::isfinite(value)) {
        throw std::runtime_error("loss diverged at iteration " + std::to_string(iteration));
    }
}

TrainReport train(const KnitProgram &program, const ProblemInstance &problem,
                  std::vector<double> theta, const TrainConfig &config, bool local) {
    const auto start = std::chrono::steady_clock::now();
    Objective obj(program, problem, config.noise);
    TrainReport report;
    report.slot_executions.assign(program.num_params, 0);

    obj.bind_all(theta);
    report.fragment_executions += obj.fragment_count();
    double current = obj.value();
    check_finite(current, 0);
    report.loss_history.push_back(current);

    for (std::size_t t = 0; t < config.max_iterations; ++t) {
        const auto grad = obj.gradient(local, report.slot_executions);
        for (std::size_t j = 0; j < theta.size(); ++j) {
            theta[j] -= config.step * grad[j];
        }
        obj.bind_all(theta);
        report.fragment_executions += obj.fragment_count();
        const double next = obj.value();
        check_finite(next, t + 1);
        report.loss_history.push_back(next);
        ++report.iterations;
        const double change = std::abs(next - current);
        current = next;
        if (change < config.threshold) {
            break;
        }
    }
    for (std::size_t e : report.slot_executions) {
        report.fragment_executions += e;
    }
    report.theta_star = std::move(theta);
    report.final_loss = current;
    report.performance = problem.performance(current);
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace

std::string_view to_string(ProblemKind kind) noexcept {
    return kind == ProblemKind::QaoaMaxCut ? "qaoa" : "vqe";
}

Observable maxcut_observable(const WeightedGraph &graph) {
    const std::size_t n = graph.num_nodes();
    std::vector<PauliTerm> terms;
    for (const auto &e : graph.edges()) {
        std::string p(n, 'I');
        p[e.u] = 'Z';
        p[e.v] = 'Z';
        terms.push_back({-e.weight / 2, std::move(p)});
    }
    return Observable(n, std::move(terms), graph.total_weight() / 2);
}

double max_cut_value(const WeightedGraph &graph) {
    const std::size_t n = graph.num_nodes();
    if (n > 20) {
        throw std::length_error("max_cut_value limited to 20 nodes");
    }
    if (n < 2) {
        return 0.0;
    }
    double best = 0.0;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << (n - 1)); ++mask) {
        double cut = 0.0;
        for (const auto &e : graph.edges()) {
            // Node n-1 is pinned to side 0.
            const bool su = e.u + 1 < n && ((mask >> e.u) & 1U);
            const bool sv = e.v + 1 < n && ((mask >> e.v) & 1U);
            if (su != sv) {
                cut += e.weight;
            }
        }
        best = std::max(best, cut);
    }
    return best;
}

double approximation_ratio(double expected_cut, double optimal_cut) {
    if (optimal_cut == 0.0) {
        throw std::invalid_argument("approximation ratio undefined for optimal cut 0");
    }
    return expected_cut / optimal_cut;
}

ProblemInstance ProblemInstance::maxcut(WeightedGraph graph) {
    ProblemInstance p;
    p.kind = ProblemKind::QaoaMaxCut;
    p.hamiltonian = maxcut_observable(graph);
    p.reference = max_cut_value(graph);
    p.graph = std::move(graph);
    return p;
}

ProblemInstance ProblemInstance::vqe(Observable hamiltonian) {
    ProblemInstance p;
    p.kind = ProblemKind::Vqe;
    p.reference = exact_ground_energy(hamiltonian);
    p.hamiltonian = std::move(hamiltonian);
    return p;
}

Observable ProblemInstance::loss_observable() const {
    if (kind == ProblemKind::Vqe) {
        return hamiltonian;
    }
    auto terms = hamiltonian.terms();
    for (auto &t : terms) {
        t.coefficient = -t.coefficient;
    }
    return Observable(hamiltonian.num_qubits(), std::move(terms), -hamiltonian.offset());
}

double ProblemInstance::performance(double loss) const {
    if (kind == ProblemKind::Vqe) {
        return std::abs(loss - reference);
    }
    return approximation_ratio(-loss, reference);
}

double ProblemInstance::performance_loss(double loss) const {
    return kind == ProblemKind::Vqe ? performance(loss) : 1.0 - performance(loss);
}

Circuit qaoa_circuit(const WeightedGraph &graph, std::size_t layers) {
    const std::size_t n = graph.num_nodes();
    std::vector<Gate> gates;
    for (std::size_t q = 0; q < n; ++q) {
        gates.push_back(Gate::single(GateKind::H, q));
    }
    for (std::size_t l = 0; l < layers; ++l) {
        for (const auto &e : graph.edges()) {
            gates.push_back(Gate::two(GateKind::CX, e.u, e.v));
            gates.push_back(Gate::rotation(GateKind::RZ, e.v, Slot{2 * l, 2 * e.weight}));
            gates.push_back(Gate::two(GateKind::CX, e.u, e.v));
        }
        for (std::size_t q = 0; q < n; ++q) {
            gates.push_back(Gate::rotation(GateKind::RX, q, Slot{2 * l + 1, 2.0}));
        }
    }
    return Circuit(n, std::move(gates), 2 * layers);
}

double loss(const KnitProgram &program, const ProblemInstance &problem,
            const std::vector<double> &theta, const NoisePolicy &noise) {
    return reconstruct_exact(program, problem.loss_observable(), theta, noise);
}

std::vector<double> parameter_shift_grad(const KnitProgram &program,
                                         const ProblemInstance &problem,
                                         const std::vector<double> &theta,
                                         const NoisePolicy &noise) {
    Objective obj(program, problem, noise);
    obj.bind_all(theta);
    std::vector<std::size_t> executions(program.num_params, 0);
    return obj.gradient(false, executions);
}

FragmentIndex param_fragment_index(const KnitProgram &program) {
    FragmentIndex idx;
    idx.fragments = program.param_map;
    idx.fragment_count = program.fragments.size();
    double sum = 0.0;
    for (const auto &fs : idx.fragments) {
        idx.counts.push_back(fs.size());
        sum += static_cast<double>(fs.size()) / static_cast<double>(idx.fragment_count);
    }
    if (!idx.fragments.empty()) {
        idx.acceleration = sum / static_cast<double>(idx.fragments.size());
    }
    return idx;
}

void to_json(nlohmann::json &j, const TrainReport &report) {
    j = nlohmann::json{{"theta_star", report.theta_star},
                       {"loss_history", report.loss_history},
                       {"final_loss", report.final_loss},
                       {"performance", report.performance},
                       {"iterations", report.iterations},
                       {"fragment_executions", report.fragment_executions},
                       {"slot_executions", report.slot_executions},
                       {"wall_time_s", report.wall_time_s}};
}

TrainReport train_subcircuit(const KnitProgram &program, const ProblemInstance &problem,
                             std::vector<double> theta0, const TrainConfig &config) {
    return train(program, problem, std::move(theta0), config, true);
}

TrainReport train_full(const KnitProgram &program, const ProblemInstance &problem,
                       std::vector<double> theta0, const TrainConfig &config) {
    return train(program, problem, std::move(theta0), config, false);
}

std::vector<double> random_parameters(std::size_t count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> angle(-std::numbers::pi, std::numbers::pi);
    std::vector<double> theta(count);
    for (auto &t : theta) {
        t = angle(rng);
    }
    return theta;
}

} // namespace knitvqa
