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

// Population-based architecture search over layered ansatzes, scored by a
// weighted sum of trained performance, cut count and fragment locality.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "knitvqa/circuit.hpp"
#include "knitvqa/knitting.hpp"
#include "knitvqa/vqa.hpp"

namespace knitvqa {

struct FitnessWeights {
    double w_g = 0.5;
    double w_h = 0.5;
    double w_I = 0.0;
    double eta = 6561.0; ///< raw overhead threshold, 9^4

    /// Weights with the locality penalty switched on.
    [[nodiscard]] static FitnessWeights with_locality() {
        return FitnessWeights{0.4, 0.4, 0.2, 6561.0};
    }
    void validate() const;
};

struct Candidate {
    std::size_t id = 0;
    AnsatzSpec spec;
    double g = std::numeric_limits<double>::infinity(); ///< 1 - r or delta
    double h = 1.0;                                     ///< 9^cuts
    double I = 0.0;
    double f = std::numeric_limits<double>::infinity();
    double performance = 0.0; ///< r or delta of the trained parameters
    bool evaluated = false;   ///< trained, i.e. not pruned
    std::size_t cuts = 0;
    PartitionPlan plan;
    std::size_t fragment_executions = 0;
    std::vector<double> theta;
    std::string failure; ///< set when training raised
};

/// +inf when h exceeds eta, otherwise w_g g + w_h log9(h) + w_I I.
[[nodiscard]] double fitness(const Candidate &candidate, const FitnessWeights &weights);

struct SearchSpace {
    std::size_t num_qubits = 0;
    std::size_t max_layers = 3;
    std::vector<GateKind> singles{GateKind::RX, GateKind::RY, GateKind::RZ};
    std::vector<GateKind> two{GateKind::CX, GateKind::CZ, GateKind::Identity2};
    std::vector<std::pair<Qubit, Qubit>> pairs; ///< allowed placements

    /// Nearest-neighbour chain placements.
    [[nodiscard]] static SearchSpace chain(std::size_t n, std::size_t max_layers);

    [[nodiscard]] AnsatzSpec random_spec(std::size_t depth, std::mt19937_64 &rng) const;
    /// Every spec one mutation away: one single kind replaced, one placement
    /// added/removed/rekinded, or the last layer repeated.
    [[nodiscard]] std::vector<AnsatzSpec> neighbors(const AnsatzSpec &spec) const;
    void validate() const;
};

struct SearchConfig {
    std::size_t population_size = 8;
    std::size_t max_iterations = 5;
    std::size_t expansion_subset_size = 8;
    std::size_t capacity = 2;
    std::size_t train_restarts = 1;
    TrainConfig train{100, 1e-6, 0.05, std::nullopt};
    Partitioner partitioner = Partitioner::Heuristic;
    std::uint64_t seed = 0;
    void validate() const;
};

struct SearchIteration {
    std::size_t iteration = 0;
    double best_f = 0.0;
    double best_g = 0.0;
    double best_h = 0.0;
};

struct SearchReport {
    Candidate best;
    std::vector<SearchIteration> history;
    std::size_t evaluations = 0; ///< trained candidates
    std::size_t pruned = 0;      ///< candidates rejected by eta before training
    std::size_t fragment_executions = 0;
    bool feasible = false;
    double wall_time_s = 0.0;
    std::vector<Candidate> archive; ///< every scored candidate, in scoring order
};

/// Partitions, prunes by eta, and otherwise trains the candidate's ansatz.
[[nodiscard]] Candidate evaluate_candidate(Candidate candidate, const ProblemInstance &problem,
                                           const FitnessWeights &weights,
                                           const SearchConfig &config);

[[nodiscard]] SearchReport search(const SearchSpace &space, const ProblemInstance &problem,
                                  const FitnessWeights &weights, const SearchConfig &config);

/// Uniform sample of `size` items without replacement, original order kept.
template <class T>
[[nodiscard]] std::vector<T> prune_random_subset(std::vector<T> items, std::size_t size,
                                                 std::uint64_t seed) {
    if (size == 0) {
        throw std::invalid_argument("prune_random_subset: size must be >= 1");
    }
    if (size >= items.size()) {
        return items;
    }
    std::vector<T> out;
    out.reserve(size);
    std::mt19937_64 rng(seed);
    std::sample(std::make_move_iterator(items.begin()), std::make_move_iterator(items.end()),
                std::back_inserter(out), size, rng);
    return out;
}

void to_json(nlohmann::json &j, const Candidate &candidate);
void to_json(nlohmann::json &j, const SearchReport &report);

} // namespace knitvqa
