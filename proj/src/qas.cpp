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
#include "knitvqa/qas.hpp"

#include <chrono>
#include <cmath>
#include <set>

namespace knitvqa {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void sort_placements(AnsatzLayer &layer) {
    std::sort(layer.placements.begin(), layer.placements.end(),
              [](const Placement &x, const Placement &y) {
                  return std::pair{x.a, x.b} < std::pair{y.a, y.b};
              });
}

bool ranks_before(const Candidate &x, const Candidate &y) {
    if (x.f != y.f) {
        return x.f < y.f;
    }
    return x.id < y.id;
}

Candidate make_candidate(std::size_t id, AnsatzSpec spec) {
    Candidate c;
    c.id = id;
    c.spec = std::move(spec);
    return c;
}

nlohmann::json finite_or_null(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

} // namespace

void FitnessWeights::validate() const {
    if (w_g < 0 || w_h < 0 || w_I < 0 || w_g + w_h + w_I <= 0) {
        throw std::invalid_argument("fitness weights must be >= 0 with a positive sum");
    }
    if (!(eta >= 1.0)) {
        throw std::invalid_argument("eta must be >= 1");
    }
}

double fitness(const Candidate &candidate, const FitnessWeights &weights) {
    if (candidate.h > weights.eta || !std::isfinite(candidate.g)) {
        return kInf;
    }
    const double cuts = std::log(candidate.h) / std::log(9.0);
    return weights.w_g * candidate.g + weights.w_h * cuts + weights.w_I * candidate.I;
}

SearchSpace SearchSpace::chain(std::size_t n, std::size_t max_layers) {
    SearchSpace s;
    s.num_qubits = n;
    s.max_layers = max_layers;
    for (Qubit q = 0; q + 1 < n; ++q) {
        s.pairs.emplace_back(q, q + 1);
    }
    return s;
}

void SearchSpace::validate() const {
    if (num_qubits == 0 || max_layers == 0 || singles.empty()) {
        throw std::invalid_argument("search space needs qubits, layers and single kinds");
    }
    for (GateKind k : singles) {
        if (!is_rotation(k)) {
            throw std::invalid_argument("single-qubit alphabet must hold rotations");
        }
    }
    for (GateKind k : two) {
        if (!is_two_qubit(k)) {
            throw std::invalid_argument("two-qubit alphabet must hold CX, CZ or IDENTITY2");
        }
    }
    for (auto [a, b] : pairs) {
        if (a == b || a >= num_qubits || b >= num_qubits) {
            throw std::invalid_argument("placement pair out of range");
        }
    }
}

AnsatzSpec SearchSpace::random_spec(std::size_t depth, std::mt19937_64 &rng) const {
    std::uniform_int_distribution<std::size_t> single(0, singles.size() - 1);
    std::uniform_int_distribution<std::size_t> option(0, two.size());
    AnsatzSpec spec;
    for (std::size_t l = 0; l < depth; ++l) {
        AnsatzLayer layer;
        for (std::size_t q = 0; q < num_qubits; ++q) {
            layer.singles.push_back(singles[single(rng)]);
        }
        for (auto [a, b] : pairs) {
            const std::size_t o = option(rng);
            if (o < two.size()) {
                layer.placements.push_back({two[o], a, b});
            }
        }
        sort_placements(layer);
        spec.layers.push_back(std::move(layer));
    }
    return spec;
}

std::vector<AnsatzSpec> SearchSpace::neighbors(const AnsatzSpec &spec) const {
    std::vector<AnsatzSpec> out;
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        for (std::size_t q = 0; q < spec.layers[l].singles.size(); ++q) {
            for (GateKind k : singles) {
                if (k != spec.layers[l].singles[q]) {
                    AnsatzSpec next = spec;
                    next.layers[l].singles[q] = k;
                    out.push_back(std::move(next));
                }
            }
        }
        for (auto [a, b] : pairs) {
            const auto &ps = spec.layers[l].placements;
            const auto it = std::find_if(ps.begin(), ps.end(), [a = a, b = b](const Placement &p) {
                return p.a == a && p.b == b;
            });
            if (it != ps.end()) {
                AnsatzSpec removed = spec;
                removed.layers[l].placements.erase(removed.layers[l].placements.begin() +
                                                   (it - ps.begin()));
                out.push_back(std::move(removed));
            }
            for (GateKind k : two) {
                if (it != ps.end() && it->kind == k) {
                    continue;
                }
                AnsatzSpec next = spec;
                auto &np = next.layers[l].placements;
                if (it != ps.end()) {
                    np[it - ps.begin()].kind = k;
                } else {
                    np.push_back({k, a, b});
                    sort_placements(next.layers[l]);
                }
                out.push_back(std::move(next));
            }
        }
    }
    if (!spec.layers.empty() && spec.layers.size() < max_layers) {
        AnsatzSpec longer = spec;
        longer.layers.push_back(spec.layers.back());
        out.push_back(std::move(longer));
    }
    return out;
}

void SearchConfig::validate() const {
    if (population_size == 0 || max_iterations == 0 || expansion_subset_size == 0 ||
        capacity == 0 || train_restarts == 0) {
        throw std::invalid_argument("search counts must be >= 1");
    }
}

Candidate evaluate_candidate(Candidate candidate, const ProblemInstance &problem,
                             const FitnessWeights &weights, const SearchConfig &config) {
    const std::uint64_t seed = config.seed ^ candidate.id;
    const Circuit circuit = build_ansatz(candidate.spec, problem.num_qubits());
    const PartitionPlan plan =
        partition_circuit(circuit, config.capacity, 0, config.partitioner, seed);
    candidate.cuts = entangling_cuts(plan);
    candidate.plan = plan;
    candidate.h = sampling_overhead(plan);
    candidate.evaluated = false;
    if (candidate.h > weights.eta) {
        candidate.g = kInf;
        candidate.f = kInf;
        return candidate;
    }
    const KnitProgram program = cut_circuit(circuit, plan);
    candidate.I = param_fragment_index(program).acceleration;
    candidate.evaluated = true;
    candidate.g = kInf;
    for (std::size_t r = 0; r < config.train_restarts; ++r) {
        const auto theta0 =
            random_parameters(circuit.num_params(), seed + 0x9e3779b97f4a7c15ULL * r);
        try {
            const auto report = train_subcircuit(program, problem, theta0, config.train);
            candidate.fragment_executions += report.fragment_executions;
            const double g = problem.performance_loss(report.final_loss);
            if (g < candidate.g) {
                candidate.g = g;
                candidate.performance = report.performance;
                candidate.theta = report.theta_star;
            }
        } catch (const std::runtime_error &e) {
            candidate.failure = e.what();
        } catch (const std::length_error &e) {
            candidate.failure = e.what();
        }
    }
    candidate.f = fitness(candidate, weights);
    return candidate;
}

SearchReport search(const SearchSpace &space, const ProblemInstance &problem,
                    const FitnessWeights &weights, const SearchConfig &config) {
    const auto start = std::chrono::steady_clock::now();
    space.validate();
    weights.validate();
    config.validate();
    if (space.num_qubits != problem.num_qubits()) {
        throw std::invalid_argument("search space and problem disagree on qubit count");
    }

    std::mt19937_64 rng(config.seed);
    std::set<std::string> seen;
    std::size_t next_id = 0;
    std::vector<Candidate> population;
    std::uniform_int_distribution<std::size_t> depth(1, space.max_layers);
    // Bounded retries so a tiny space cannot loop forever on duplicates.
    for (std::size_t tries = 0;
         population.size() < config.population_size && tries < 100 * config.population_size;
         ++tries) {
        AnsatzSpec spec = space.random_spec(depth(rng), rng);
        if (seen.insert(spec.key()).second) {
            population.push_back(make_candidate(next_id++, std::move(spec)));
        }
    }

    SearchReport report;
    bool have_best = false;
    std::vector<bool> scored(population.size(), false);
    for (std::size_t t = 0; t < config.max_iterations; ++t) {
        for (std::size_t i = 0; i < population.size(); ++i) {
            if (scored[i]) {
                continue;
            }
            population[i] = evaluate_candidate(std::move(population[i]), problem, weights, config);
            scored[i] = true;
            report.archive.push_back(population[i]);
            report.fragment_executions += population[i].fragment_executions;
            if (population[i].evaluated) {
                ++report.evaluations;
            } else {
                ++report.pruned;
            }
        }
        std::sort(population.begin(), population.end(), ranks_before);
        if (!population.empty() && (!have_best || ranks_before(population.front(), report.best))) {
            report.best = population.front();
            have_best = true;
        }
        report.history.push_back({t, report.best.f, report.best.g, report.best.h});
        if (t + 1 == config.max_iterations) {
            break;
        }

        const std::size_t keep = (population.size() + 1) / 2;
        population.resize(keep);
        std::vector<AnsatzSpec> pool;
        std::set<std::string> pooled;
        for (const auto &c : population) {
            std::vector<AnsatzSpec> fresh;
            for (auto &s : space.neighbors(c.spec)) {
                const auto key = s.key();
                if (!seen.count(key) && !pooled.count(key)) {
                    fresh.push_back(std::move(s));
                }
            }
            if (fresh.empty()) {
                continue;
            }
            for (auto &s : prune_random_subset(std::move(fresh), config.expansion_subset_size,
                                               rng())) {
                pooled.insert(s.key());
                pool.push_back(std::move(s));
            }
        }
        const std::size_t room = config.population_size - population.size();
        scored.assign(population.size(), true);
        if (room > 0 && !pool.empty()) {
            for (auto &s : prune_random_subset(std::move(pool), room, rng())) {
                seen.insert(s.key());
                population.push_back(make_candidate(next_id++, std::move(s)));
                scored.push_back(false);
            }
        }
    }
    report.feasible = have_best && std::isfinite(report.best.f);
    report.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

void to_json(nlohmann::json &j, const Candidate &c) {
    j = nlohmann::json{{"id", c.id},
                       {"spec", c.spec},
                       {"g", finite_or_null(c.g)},
                       {"h", c.h},
                       {"I", c.I},
                       {"f", finite_or_null(c.f)},
                       {"performance", c.performance},
                       {"evaluated", c.evaluated},
                       {"cuts", c.cuts},
                       {"plan", c.plan},
                       {"fragment_executions", c.fragment_executions},
                       {"theta", c.theta}};
    if (!c.failure.empty()) {
        j["failure"] = c.failure;
    }
}

void to_json(nlohmann::json &j, const SearchReport &r) {
    nlohmann::json history = nlohmann::json::array();
    for (const auto &h : r.history) {
        history.push_back({{"iter", h.iteration},
                           {"best_f", finite_or_null(h.best_f)},
                           {"best_g", finite_or_null(h.best_g)},
                           {"best_h", h.best_h}});
    }
    j = nlohmann::json{{"best", r.best},
                       {"history", history},
                       {"evaluations", r.evaluations},
                       {"pruned", r.pruned},
                       {"fragment_executions", r.fragment_executions},
                       {"feasible", r.feasible},
                       {"wall_time_s", r.wall_time_s}};
}

} // namespace knitvqa
