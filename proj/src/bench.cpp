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
#include "knitvqa/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

namespace knitvqa {

namespace {

const std::set<std::string> kStudies{"search",  "train",   "capacity",
                                     "layers",  "weights", "noise"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_field(std::string s) {
    std::replace_if(s.begin(), s.end(), [](char c) { return c == ',' || c == '\n'; }, ';');
    return s;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

ProblemInstance make_problem(const ExperimentConfig &cfg, std::uint64_t seed) {
    if (cfg.algo == "vqe") {
        return ProblemInstance::vqe(load_hamiltonian(cfg.hamiltonian));
    }
    return ProblemInstance::maxcut(gen_regular_graph(cfg.n, cfg.d, seed));
}

SearchConfig search_config(const ExperimentConfig &cfg, std::uint64_t seed, std::size_t m) {
    SearchConfig s;
    s.population_size = cfg.population;
    s.max_iterations = cfg.iterations;
    s.expansion_subset_size = cfg.subset;
    s.capacity = m;
    s.train_restarts = cfg.restarts;
    s.train.max_iterations = cfg.train_iterations;
    s.train.step = cfg.step;
    s.train.threshold = cfg.threshold;
    s.partitioner =
        cfg.partitioner == "brute-force" ? Partitioner::BruteForce : Partitioner::Heuristic;
    s.seed = seed;
    return s;
}

// Final performance of trained parameters, re-estimated by Monte Carlo when
// the config asks for sampled reconstruction or under a noise channel.
double final_performance(const ExperimentConfig &cfg, const ProblemInstance &problem,
                         const AnsatzSpec &spec, const PartitionPlan &plan,
                         const std::vector<double> &theta, double exact_performance,
                         std::uint64_t seed, const NoisePolicy &noise = std::nullopt) {
    if (cfg.mode != "sampled" && !noise) {
        return exact_performance;
    }
    const auto prog = cut_circuit(build_ansatz(spec, problem.num_qubits()), plan);
    const Observable obs = problem.loss_observable();
    const double value = cfg.mode == "sampled"
                             ? reconstruct_sampled(prog, obs, theta, cfg.shots, seed, noise).estimate
                             : reconstruct_exact(prog, obs, theta, noise);
    return problem.performance(value);
}

BenchRow base_row(const ExperimentConfig &cfg, std::string study, std::size_t n,
                  std::size_t m, std::size_t layers, std::uint64_t seed) {
    BenchRow r;
    r.study = std::move(study);
    r.algo = cfg.algo;
    r.n = n;
    r.m = m;
    r.layers = layers;
    r.seed = seed;
    return r;
}

template <class Fn> void guarded(BenchRow &row, Fn &&fn) {
    const auto start = std::chrono::steady_clock::now();
    try {
        fn(row);
    } catch (const std::exception &e) {
        row.status = "error: " + csv_field(e.what());
    }
    row.wall_time_s = seconds_since(start);
}

void search_row(const ExperimentConfig &cfg, const ProblemInstance &problem,
                const FitnessWeights &w, std::size_t m, std::size_t layers,
                std::uint64_t seed, BenchRow &row) {
    const SearchConfig sc = search_config(cfg, seed, m);
    const auto rep = search(SearchSpace::chain(problem.num_qubits(), layers), problem, w, sc);
    if (!rep.feasible) {
        row.status = "infeasible: every candidate exceeded eta";
    }
    row.performance = final_performance(cfg, problem, rep.best.spec, rep.best.plan,
                                        rep.best.theta, rep.best.performance, seed);
    row.overhead = rep.best.h;
    row.fragment_executions = rep.fragment_executions;
}

} // namespace

WeightedGraph gen_regular_graph(std::size_t n, std::size_t d, std::uint64_t seed) {
    if ((n * d) % 2 != 0) {
        throw std::invalid_argument("n*d must be even for a d-regular graph");
    }
    if (d >= n && !(n == 0 && d == 0)) {
        throw std::invalid_argument("d-regular graph needs d < n");
    }
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> stubs;
    for (std::size_t v = 0; v < n; ++v) {
        stubs.insert(stubs.end(), d, v);
    }
    for (;;) {
        std::shuffle(stubs.begin(), stubs.end(), rng);
        std::set<std::pair<std::size_t, std::size_t>> edges;
        bool ok = true;
        for (std::size_t i = 0; ok && i < stubs.size(); i += 2) {
            const auto u = std::min(stubs[i], stubs[i + 1]);
            const auto v = std::max(stubs[i], stubs[i + 1]);
            ok = u != v && edges.emplace(u, v).second;
        }
        if (ok) {
            WeightedGraph g(n);
            for (auto [u, v] : edges) {
                g.add_edge(u, v);
            }
            return g;
        }
    }
}

Observable load_hamiltonian(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open Hamiltonian file " + path);
    }
    std::stringstream text;
    text << in.rdbuf();
    try {
        return parse_observable(text.str());
    } catch (const std::invalid_argument &e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
}

void ExperimentConfig::validate() const {
    if (!kStudies.count(study)) {
        throw std::invalid_argument("unknown study '" + study + "'");
    }
    if (algo != "qaoa" && algo != "vqe") {
        throw std::invalid_argument("algo must be qaoa or vqe");
    }
    if (algo == "vqe" && hamiltonian.empty()) {
        throw std::invalid_argument("vqe needs a Hamiltonian file");
    }
    if (algo == "qaoa" && ((n * d) % 2 != 0 || d >= n)) {
        throw std::invalid_argument("no d-regular graph with these n and d");
    }
    if (seeds.empty() || m == 0 || layers == 0) {
        throw std::invalid_argument("seeds, m and layers must be non-empty / >= 1");
    }
    if (partitioner != "heuristic" && partitioner != "brute-force") {
        throw std::invalid_argument("partitioner must be heuristic or brute-force");
    }
    if (mode != "exact" && mode != "sampled") {
        throw std::invalid_argument("mode must be exact or sampled");
    }
    if (mode == "sampled" && shots == 0) {
        throw std::invalid_argument("sampled mode needs shots >= 1");
    }
    if (!(noise_p >= 0.0 && noise_p <= 1.0)) {
        throw std::invalid_argument("noise probability must lie in [0, 1]");
    }
    for (const auto &k : noise_kinds) {
        (void)noise_kind_from_string(k);
    }
    weights.validate();
    search_config(*this, 0, m).validate();
}

void to_json(nlohmann::json &j, const ExperimentConfig &c) {
    j = nlohmann::json{{"study", c.study},
                       {"algo", c.algo},
                       {"n", c.n},
                       {"d", c.d},
                       {"m", c.m},
                       {"layers", c.layers},
                       {"seeds", c.seeds},
                       {"hamiltonian", c.hamiltonian},
                       {"weights",
                        {{"w_g", c.weights.w_g},
                         {"w_h", c.weights.w_h},
                         {"w_I", c.weights.w_I},
                         {"eta", c.weights.eta}}},
                       {"partitioner", c.partitioner},
                       {"population", c.population},
                       {"iterations", c.iterations},
                       {"subset", c.subset},
                       {"restarts", c.restarts},
                       {"train_iterations", c.train_iterations},
                       {"step", c.step},
                       {"threshold", c.threshold},
                       {"capacities", c.capacities},
                       {"layer_counts", c.layer_counts},
                       {"wg_values", c.wg_values},
                       {"noise_kinds", c.noise_kinds},
                       {"noise_p", c.noise_p},
                       {"mode", c.mode},
                       {"shots", c.shots},
                       {"output", c.output}};
}

void from_json(const nlohmann::json &j, ExperimentConfig &c) {
    // Missing keys keep their defaults; unknown keys are an error.
    static const std::set<std::string> known{
        "study",       "algo",       "n",          "d",        "m",
        "layers",      "seeds",      "hamiltonian", "weights", "partitioner",
        "population",  "iterations", "subset",     "restarts", "train_iterations",
        "step",        "threshold",  "capacities", "layer_counts", "wg_values",
        "noise_kinds", "noise_p",    "mode",       "shots",    "output"};
    for (const auto &[key, _] : j.items()) {
        if (!known.count(key)) {
            throw std::invalid_argument("unknown config key '" + key + "'");
        }
    }
    auto get = [&](const char *key, auto &field) {
        if (j.contains(key)) {
            j.at(key).get_to(field);
        }
    };
    get("study", c.study);
    get("algo", c.algo);
    get("n", c.n);
    get("d", c.d);
    get("m", c.m);
    get("layers", c.layers);
    get("seeds", c.seeds);
    get("hamiltonian", c.hamiltonian);
    if (j.contains("weights")) {
        const auto &w = j.at("weights");
        c.weights.w_g = w.value("w_g", c.weights.w_g);
        c.weights.w_h = w.value("w_h", c.weights.w_h);
        c.weights.w_I = w.value("w_I", c.weights.w_I);
        c.weights.eta = w.value("eta", c.weights.eta);
    }
    get("partitioner", c.partitioner);
    get("population", c.population);
    get("iterations", c.iterations);
    get("subset", c.subset);
    get("restarts", c.restarts);
    get("train_iterations", c.train_iterations);
    get("step", c.step);
    get("threshold", c.threshold);
    get("capacities", c.capacities);
    get("layer_counts", c.layer_counts);
    get("wg_values", c.wg_values);
    get("noise_kinds", c.noise_kinds);
    get("noise_p", c.noise_p);
    get("mode", c.mode);
    get("shots", c.shots);
    get("output", c.output);
}

std::vector<BenchRow> run_benchmark(const ExperimentConfig &cfg) {
    cfg.validate();
    std::vector<BenchRow> rows;
    for (const std::uint64_t seed : cfg.seeds) {
        ProblemInstance problem;
        try {
            problem = make_problem(cfg, seed);
        } catch (const std::exception &e) {
            BenchRow row = base_row(cfg, cfg.study, cfg.n, cfg.m, cfg.layers, seed);
            row.status = "error: " + csv_field(e.what());
            rows.push_back(row);
            continue;
        }
        const std::size_t n = problem.num_qubits();

        if (cfg.study == "search") {
            BenchRow row = base_row(cfg, "search", n, cfg.m, cfg.layers, seed);
            guarded(row, [&](BenchRow &r) {
                search_row(cfg, problem, cfg.weights, cfg.m, cfg.layers, seed, r);
            });
            rows.push_back(row);
        } else if (cfg.study == "capacity") {
            ExperimentConfig exact = cfg;
            exact.partitioner = "brute-force";
            for (std::size_t m : cfg.capacities) {
                BenchRow row = base_row(cfg, "capacity", n, m, cfg.layers, seed);
                guarded(row, [&](BenchRow &r) {
                    search_row(exact, problem, cfg.weights, m, cfg.layers, seed, r);
                });
                rows.push_back(row);
            }
        } else if (cfg.study == "layers") {
            for (std::size_t l : cfg.layer_counts) {
                BenchRow row = base_row(cfg, "layers", n, cfg.m, l, seed);
                guarded(row, [&](BenchRow &r) {
                    search_row(cfg, problem, cfg.weights, cfg.m, l, seed, r);
                });
                rows.push_back(row);
            }
        } else if (cfg.study == "weights") {
            for (double wg : cfg.wg_values) {
                BenchRow row =
                    base_row(cfg, "weights:w_g=" + num(wg), n, cfg.m, cfg.layers, seed);
                guarded(row, [&](BenchRow &r) {
                    FitnessWeights w = cfg.weights;
                    w.w_g = wg;
                    w.w_h = 1.0 - wg;
                    search_row(cfg, problem, w, cfg.m, cfg.layers, seed, r);
                });
                rows.push_back(row);
            }
        } else if (cfg.study == "train") {
            // A seeded random ansatz trained by both drivers from one start.
            std::mt19937_64 rng(seed);
            const AnsatzSpec spec =
                SearchSpace::chain(n, cfg.layers).random_spec(cfg.layers, rng);
            const Circuit c = build_ansatz(spec, n);
            const SearchConfig sc = search_config(cfg, seed, cfg.m);
            for (const bool local : {true, false}) {
                BenchRow row = base_row(cfg, local ? "train:subcircuit" : "train:full", n,
                                        cfg.m, cfg.layers, seed);
                guarded(row, [&](BenchRow &r) {
                    const auto plan = partition_circuit(c, cfg.m, 0, sc.partitioner, seed);
                    const auto prog = cut_circuit(c, plan);
                    const auto theta0 = random_parameters(c.num_params(), seed);
                    const auto rep = local ? train_subcircuit(prog, problem, theta0, sc.train)
                                           : train_full(prog, problem, theta0, sc.train);
                    r.performance = final_performance(cfg, problem, spec, plan,
                                                      rep.theta_star, rep.performance, seed);
                    r.overhead = sampling_overhead(plan);
                    r.fragment_executions = rep.fragment_executions;
                });
                rows.push_back(row);
            }
        } else if (cfg.study == "noise") {
            // Search noiselessly once, then score the trained winner per channel.
            BenchRow clean = base_row(cfg, "noise:none", n, cfg.m, cfg.layers, seed);
            SearchReport rep;
            const SearchConfig sc = search_config(cfg, seed, cfg.m);
            guarded(clean, [&](BenchRow &r) {
                rep = search(SearchSpace::chain(n, cfg.layers), problem, cfg.weights, sc);
                if (!rep.feasible) {
                    throw std::runtime_error("search found no candidate under eta");
                }
                r.performance =
                    final_performance(cfg, problem, rep.best.spec, rep.best.plan,
                                      rep.best.theta, rep.best.performance, seed);
                r.overhead = rep.best.h;
                r.fragment_executions = rep.fragment_executions;
            });
            rows.push_back(clean);
            for (const auto &kind : cfg.noise_kinds) {
                BenchRow row = base_row(cfg, "noise:" + kind, n, cfg.m, cfg.layers, seed);
                guarded(row, [&](BenchRow &r) {
                    if (clean.status != "ok") {
                        throw std::runtime_error("noiseless search failed");
                    }
                    const NoisePolicy noise =
                        NoiseChannel::make(noise_kind_from_string(kind), cfg.noise_p);
                    r.performance = final_performance(cfg, problem, rep.best.spec,
                                                      rep.best.plan, rep.best.theta, 0.0,
                                                      seed, noise);
                    r.overhead = rep.best.h;
                });
                rows.push_back(row);
            }
        }
    }
    return rows;
}

std::string csv_header(bool with_wall_time) {
    std::string h = "study,algo,n,m,layers,seed,performance,overhead,fragment_executions";
    if (with_wall_time) {
        h += ",wall_time_s";
    }
    return h + ",status";
}

std::string format_csv(const std::vector<BenchRow> &rows, bool with_wall_time) {
    std::ostringstream out;
    out << csv_header(with_wall_time) << '\n';
    for (const auto &r : rows) {
        out << r.study << ',' << r.algo << ',' << r.n << ',' << r.m << ',' << r.layers << ','
            << r.seed << ',' << num(r.performance) << ',' << num(r.overhead) << ','
            << r.fragment_executions;
        if (with_wall_time) {
            out << ',' << num(r.wall_time_s);
        }
        out << ',' << r.status << '\n';
    }
    return out.str();
}

std::vector<std::string> write_figure_files(const std::vector<BenchRow> &rows,
                                            const std::string &directory) {
    static const std::map<std::string, std::string> figure{
        {"capacity", "fig4"}, {"search", "fig5"},  {"train", "fig6"},
        {"layers", "fig7"},   {"weights", "fig8"}, {"noise", "fig9"}};
    struct Acc {
        double perf = 0, overhead = 0, execs = 0;
        std::size_t count = 0;
    };
    // study -> x -> accumulated means, in first-seen x order.
    std::map<std::string, std::vector<std::pair<std::string, Acc>>> groups;
    for (const auto &r : rows) {
        if (r.status != "ok") {
            continue;
        }
        const auto colon = r.study.find(':');
        const std::string study = r.study.substr(0, colon);
        std::string x;
        if (colon != std::string::npos) {
            x = r.study.substr(colon + 1);
            if (x.rfind("w_g=", 0) == 0) {
                x = x.substr(4);
            }
        } else if (study == "capacity") {
            x = std::to_string(r.m);
        } else if (study == "layers") {
            x = std::to_string(r.layers);
        } else {
            x = std::to_string(r.n);
        }
        auto &g = groups[study];
        auto it = std::find_if(g.begin(), g.end(), [&](const auto &p) { return p.first == x; });
        if (it == g.end()) {
            g.emplace_back(x, Acc{});
            it = std::prev(g.end());
        }
        it->second.perf += r.performance;
        it->second.overhead += r.overhead;
        it->second.execs += static_cast<double>(r.fragment_executions);
        ++it->second.count;
    }
    std::filesystem::create_directories(directory);
    std::vector<std::string> written;
    for (const auto &[study, g] : groups) {
        const auto path = (std::filesystem::path(directory) / (figure.at(study) + ".csv")).string();
        std::ofstream out(path);
        out << "x,performance_mean,overhead_mean,fragment_executions_mean,count\n";
        for (const auto &[x, a] : g) {
            const double k = static_cast<double>(a.count);
            out << x << ',' << num(a.perf / k) << ',' << num(a.overhead / k) << ','
                << num(a.execs / k) << ',' << a.count << '\n';
        }
        written.push_back(path);
    }
    return written;
}

} // namespace knitvqa
