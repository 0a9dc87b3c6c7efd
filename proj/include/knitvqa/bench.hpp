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

// Problem generators, Hamiltonian ingestion and the experiment runner that
// turns one ExperimentConfig into CSV rows.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "knitvqa/qas.hpp"

namespace knitvqa {

/// Uniform simple d-regular graph (pairing model with rejection), unit weights.
[[nodiscard]] WeightedGraph gen_regular_graph(std::size_t n, std::size_t d,
                                              std::uint64_t seed);

/// Reads a `<coefficient> <pauli>` file; errors name the path and line.
[[nodiscard]] Observable load_hamiltonian(const std::string &path);

struct ExperimentConfig {
    std::string study = "search"; ///< search|train|capacity|layers|weights|noise
    std::string algo = "qaoa";    ///< qaoa|vqe
    std::size_t n = 6;
    std::size_t d = 3;
    std::size_t m = 3;
    std::size_t layers = 3;
    std::vector<std::uint64_t> seeds{0};
    std::string hamiltonian; ///< path, required for vqe
    FitnessWeights weights;
    std::string partitioner = "heuristic"; ///< heuristic|brute-force

    std::size_t population = 8;
    std::size_t iterations = 5;
    std::size_t subset = 8;
    std::size_t restarts = 1;
    std::size_t train_iterations = 100;
    double step = 0.1;
    double threshold = 1e-6;

    std::vector<std::size_t> capacities{2, 3, 4, 5, 6, 7};
    std::vector<std::size_t> layer_counts{1, 2, 3};
    std::vector<double> wg_values{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    std::vector<std::string> noise_kinds{"DEP", "AMP", "PHA", "THE"};
    double noise_p = 0.01;

    std::string mode = "exact"; ///< exact|sampled final estimate
    std::size_t shots = 10000;
    std::string output;

    void validate() const;
};

void to_json(nlohmann::json &j, const ExperimentConfig &config);
void from_json(const nlohmann::json &j, ExperimentConfig &config);

struct BenchRow {
    std::string study;
    std::string algo;
    std::size_t n = 0;
    std::size_t m = 0;
    std::size_t layers = 0;
    std::uint64_t seed = 0;
    double performance = 0.0;
    double overhead = 0.0;
    std::size_t fragment_executions = 0;
    double wall_time_s = 0.0;
    std::string status = "ok";
};

[[nodiscard]] std::vector<BenchRow> run_benchmark(const ExperimentConfig &config);

[[nodiscard]] std::string csv_header(bool with_wall_time = true);
[[nodiscard]] std::string format_csv(const std::vector<BenchRow> &rows,
                                     bool with_wall_time = true);

/// Writes figN.csv files (per-x means of performance and overhead) for the
/// sweep studies present in `rows`. Returns the paths written.
std::vector<std::string> write_figure_files(const std::vector<BenchRow> &rows,
                                            const std::string &directory);

} // namespace knitvqa
