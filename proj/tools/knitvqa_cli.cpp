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
// knitvqa command line: partition, cut, search, train, bench, gen-graph.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "knitvqa/bench.hpp"

using namespace knitvqa;
using nlohmann::json;

namespace {

std::string slurp(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string &text, const std::string &path) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out << text;
}

Partitioner partitioner_of(const std::string &name) {
    if (name == "brute-force") {
        return Partitioner::BruteForce;
    }
    if (name != "heuristic") {
        throw std::invalid_argument("partitioner must be heuristic or brute-force");
    }
    return Partitioner::Heuristic;
}

NoisePolicy noise_of(const std::string &kind, double p) {
    if (kind.empty() || kind == "none") {
        return std::nullopt;
    }
    return NoiseChannel::make(noise_kind_from_string(kind), p);
}

// Problem flags shared by search and train.
struct ProblemFlags {
    std::string algo = "qaoa";
    std::size_t n = 6;
    std::size_t d = 3;
    std::string graph;
    std::string hamiltonian;

    void add(CLI::App *app) {
        app->add_option("--algo", algo, "qaoa or vqe")->check(CLI::IsMember({"qaoa", "vqe"}));
        app->add_option("--n", n, "graph nodes for a generated QAOA instance");
        app->add_option("--d", d, "graph regularity for a generated QAOA instance");
        app->add_option("--graph", graph, "edge-list file instead of a generated graph")
            ->check(CLI::ExistingFile);
        app->add_option("--hamiltonian", hamiltonian, "Pauli-sum file for VQE")
            ->check(CLI::ExistingFile);
    }

    ProblemInstance make(std::uint64_t seed) const {
        if (algo == "vqe") {
            if (hamiltonian.empty()) {
                throw std::invalid_argument("--hamiltonian is required for vqe");
            }
            return ProblemInstance::vqe(load_hamiltonian(hamiltonian));
        }
        return ProblemInstance::maxcut(graph.empty() ? gen_regular_graph(n, d, seed)
                                                     : parse_edge_list(slurp(graph)));
    }
};

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"Circuit knitting for variational quantum algorithms"};
    app.require_subcommand(1);

    // partition
    auto *part = app.add_subcommand("partition", "capacity-bounded min cut of a circuit or graph");
    std::string part_circuit, part_graph, part_out, part_method = "heuristic";
    std::size_t part_m = 2, part_k = 0;
    std::optional<std::uint64_t> part_seed;
    auto *pin = part->add_option_group("input");
    pin->add_option("--circuit", part_circuit, "circuit JSON")->check(CLI::ExistingFile);
    pin->add_option("--graph", part_graph, "edge-list file")->check(CLI::ExistingFile);
    pin->require_option(1);
    part->add_option("--m", part_m, "block capacity")->required();
    part->add_option("--k", part_k, "block count (0: unbounded)");
    part->add_option("--partitioner", part_method)
        ->check(CLI::IsMember({"heuristic", "brute-force"}));
    part->add_option("--seed", part_seed, "required for the heuristic");
    part->add_option("-o,--output", part_out);

    // cut
    auto *cut = app.add_subcommand("cut", "cut a circuit and reconstruct an expectation");
    std::string cut_circuit_path, cut_obs, cut_out, cut_mode = "exact", cut_noise;
    std::size_t cut_m = 2, cut_shots = 10000;
    double cut_p = 0.01;
    std::vector<double> cut_theta;
    std::optional<std::uint64_t> cut_seed;
    cut->add_option("--circuit", cut_circuit_path)->required()->check(CLI::ExistingFile);
    cut->add_option("--observable", cut_obs, "Pauli-sum file")->check(CLI::ExistingFile);
    cut->add_option("--m", cut_m)->required();
    cut->add_option("--theta", cut_theta, "parameter values (default all zero)");
    cut->add_option("--mode", cut_mode)->check(CLI::IsMember({"exact", "sampled"}));
    cut->add_option("--shots", cut_shots);
    cut->add_option("--noise", cut_noise, "DEP, AMP, PHA or THE");
    cut->add_option("--p", cut_p, "noise probability");
    cut->add_option("--seed", cut_seed, "partition and sampling seed")->required();
    cut->add_option("-o,--output", cut_out);

    // search
    auto *srch = app.add_subcommand("search", "architecture search");
    ProblemFlags srch_problem;
    srch_problem.add(srch);
    SearchConfig sc;
    FitnessWeights sw;
    std::size_t srch_layers = 3;
    std::string srch_method = "heuristic", srch_out, srch_history;
    bool srch_locality = false;
    srch->add_option("--m", sc.capacity)->required();
    srch->add_option("--layers", srch_layers, "layer budget L");
    srch->add_option("--population", sc.population_size);
    srch->add_option("--iterations", sc.max_iterations);
    srch->add_option("--subset", sc.expansion_subset_size);
    srch->add_option("--restarts", sc.train_restarts);
    srch->add_option("--itr", sc.train.max_iterations, "training budget per candidate");
    srch->add_option("--step", sc.train.step);
    srch->add_option("--threshold", sc.train.threshold);
    srch->add_option("--wg", sw.w_g);
    srch->add_option("--wh", sw.w_h);
    srch->add_option("--wi", sw.w_I);
    srch->add_option("--eta", sw.eta);
    srch->add_flag("--locality", srch_locality, "0.4/0.4/0.2 weights with the I penalty");
    srch->add_option("--partitioner", srch_method)
        ->check(CLI::IsMember({"heuristic", "brute-force"}));
    srch->add_option("--seed", sc.seed)->required();
    srch->add_option("-o,--output", srch_out);
    srch->add_option("--history-csv", srch_history);

    // train
    auto *trn = app.add_subcommand("train", "train a fixed ansatz through its knit program");
    ProblemFlags trn_problem;
    trn_problem.add(trn);
    std::string trn_ansatz, trn_out, trn_history, trn_noise;
    std::size_t trn_m = 2, trn_layers = 1;
    bool trn_full = false;
    double trn_p = 0.01;
    TrainConfig tc;
    std::uint64_t trn_seed = 0;
    auto *tin = trn->add_option_group("ansatz");
    tin->add_option("--ansatz", trn_ansatz, "AnsatzSpec JSON")->check(CLI::ExistingFile);
    tin->add_option("--qaoa-layers", trn_layers, "use the QAOA template instead");
    tin->require_option(1);
    trn->add_option("--m", trn_m)->required();
    trn->add_option("--itr", tc.max_iterations);
    trn->add_option("--step", tc.step);
    trn->add_option("--threshold", tc.threshold);
    trn->add_option("--noise", trn_noise, "DEP, AMP, PHA or THE");
    trn->add_option("--p", trn_p, "noise probability");
    trn->add_flag("--full", trn_full, "re-simulate every fragment per shifted evaluation");
    trn->add_option("--seed", trn_seed, "graph, partition and initial-parameter seed")
        ->required();
    trn->add_option("-o,--output", trn_out);
    trn->add_option("--history-csv", trn_history);

    // bench
    auto *bnch = app.add_subcommand("bench", "run an experiment study and write CSV rows");
    std::string bench_config, bench_out, bench_figs, bench_dump;
    ExperimentConfig flags;
    bnch->add_option("--config", bench_config, "ExperimentConfig JSON")->check(CLI::ExistingFile);
    auto *o_study = bnch->add_option("--study", flags.study)
                        ->check(CLI::IsMember({"search", "train", "capacity", "layers",
                                               "weights", "noise"}));
    auto *o_algo = bnch->add_option("--algo", flags.algo);
    auto *o_n = bnch->add_option("--n", flags.n);
    auto *o_d = bnch->add_option("--d", flags.d);
    auto *o_m = bnch->add_option("--m", flags.m);
    auto *o_layers = bnch->add_option("--layers", flags.layers);
    auto *o_seeds = bnch->add_option("--seeds", flags.seeds);
    auto *o_ham = bnch->add_option("--hamiltonian", flags.hamiltonian);
    auto *o_pop = bnch->add_option("--population", flags.population);
    auto *o_iter = bnch->add_option("--iterations", flags.iterations);
    auto *o_itr = bnch->add_option("--itr", flags.train_iterations);
    auto *o_step = bnch->add_option("--step", flags.step);
    auto *o_mode = bnch->add_option("--mode", flags.mode);
    auto *o_shots = bnch->add_option("--shots", flags.shots);
    auto *o_p = bnch->add_option("--p", flags.noise_p, "noise probability");
    bnch->add_option("-o,--output", bench_out, "CSV path (default stdout)");
    bnch->add_option("--fig-dir", bench_figs, "also write figN.csv files here");
    bnch->add_option("--dump-config", bench_dump, "write the effective config JSON");

    // gen-graph
    auto *gen = app.add_subcommand("gen-graph", "random d-regular graph as an edge list");
    std::size_t gen_n = 6, gen_d = 3;
    std::uint64_t gen_seed = 0;
    std::string gen_out;
    gen->add_option("--n", gen_n)->required();
    gen->add_option("--d", gen_d)->required();
    gen->add_option("--seed", gen_seed)->required();
    gen->add_option("-o,--output", gen_out);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*part) {
            WeightedGraph g;
            std::optional<Circuit> circuit;
            if (!part_circuit.empty()) {
                circuit = json::parse(slurp(part_circuit)).get<Circuit>();
                g = interaction_graph(*circuit);
            } else {
                g = parse_edge_list(slurp(part_graph));
            }
            const auto method = partitioner_of(part_method);
            if (method == Partitioner::Heuristic && !part_seed) {
                throw std::invalid_argument("--seed is required for the heuristic partitioner");
            }
            const std::size_t k = part_k == 0 ? std::max<std::size_t>(g.num_nodes(), 1) : part_k;
            auto plan = method == Partitioner::BruteForce
                            ? brute_force_min_cut(g, k, part_m)
                            : kway_min_cut(g, k, part_m, *part_seed);
            json out;
            if (circuit) {
                plan = attach_circuit(plan, *circuit);
                out = plan;
                out["sampling_overhead"] = sampling_overhead(plan);
            } else {
                out = plan;
            }
            emit(out.dump(2) + "\n", part_out);
        } else if (*cut) {
            const auto circuit = json::parse(slurp(cut_circuit_path)).get<Circuit>();
            std::vector<double> theta = cut_theta;
            if (theta.empty()) {
                theta.assign(circuit.num_params(), 0.0);
            }
            const auto plan = partition_circuit(circuit, cut_m, 0, Partitioner::Heuristic, *cut_seed);
            const auto prog = cut_circuit(circuit, plan);
            json out = describe(prog);
            out["plan"] = plan;
            if (!cut_obs.empty()) {
                const Observable obs = parse_observable(slurp(cut_obs));
                const auto noise = noise_of(cut_noise, cut_p);
                if (cut_mode == "exact") {
                    out["value"] = reconstruct_exact(prog, obs, theta, noise);
                } else {
                    const auto est =
                        reconstruct_sampled(prog, obs, theta, cut_shots, *cut_seed, noise);
                    out["value"] = est.estimate;
                    out["std_error"] = est.std_error;
                }
            }
            emit(out.dump(2) + "\n", cut_out);
        } else if (*srch) {
            if (srch_locality) {
                const double eta = sw.eta;
                sw = FitnessWeights::with_locality();
                sw.eta = eta;
            }
            sc.partitioner = partitioner_of(srch_method);
            const auto problem = srch_problem.make(sc.seed);
            const auto report = search(SearchSpace::chain(problem.num_qubits(), srch_layers),
                                       problem, sw, sc);
            if (!report.feasible) {
                std::cerr << "search: every candidate exceeded eta; no feasible ansatz\n";
            }
            json out = report;
            out["reference"] = problem.reference;
            emit(out.dump(2) + "\n", srch_out);
            if (!srch_history.empty()) {
                std::ostringstream csv;
                csv << "iter,best_f,best_g,best_h\n";
                for (const auto &h : report.history) {
                    csv << h.iteration << ',' << h.best_f << ',' << h.best_g << ',' << h.best_h
                        << '\n';
                }
                emit(csv.str(), srch_history);
            }
            return report.feasible ? 0 : 2;
        } else if (*trn) {
            const auto problem = trn_problem.make(trn_seed);
            const Circuit circuit =
                trn_ansatz.empty()
                    ? qaoa_circuit(problem.graph, trn_layers)
                    : build_ansatz(json::parse(slurp(trn_ansatz)).get<AnsatzSpec>(),
                                   problem.num_qubits());
            const auto plan = partition_circuit(circuit, trn_m, 0, Partitioner::Heuristic, trn_seed);
            const auto prog = cut_circuit(circuit, plan);
            tc.noise = noise_of(trn_noise, trn_p);
            const auto theta0 = random_parameters(circuit.num_params(), trn_seed);
            const auto report = trn_full ? train_full(prog, problem, theta0, tc)
                                         : train_subcircuit(prog, problem, theta0, tc);
            json out = report;
            out["sampling_overhead"] = prog.sampling_overhead();
            out["acceleration"] = param_fragment_index(prog).acceleration;
            out["reference"] = problem.reference;
            emit(out.dump(2) + "\n", trn_out);
            if (!trn_history.empty()) {
                std::ostringstream csv;
                csv.precision(17);
                csv << "iter,loss\n";
                for (std::size_t i = 0; i < report.loss_history.size(); ++i) {
                    csv << i << ',' << report.loss_history[i] << '\n';
                }
                emit(csv.str(), trn_history);
            }
        } else if (*bnch) {
            ExperimentConfig cfg;
            if (!bench_config.empty()) {
                cfg = json::parse(slurp(bench_config)).get<ExperimentConfig>();
            }
            // Flags given on the command line override the file.
            auto take = [](CLI::Option *opt, auto &dst, const auto &src) {
                if (opt->count() > 0) {
                    dst = src;
                }
            };
            take(o_study, cfg.study, flags.study);
            take(o_algo, cfg.algo, flags.algo);
            take(o_n, cfg.n, flags.n);
            take(o_d, cfg.d, flags.d);
            take(o_m, cfg.m, flags.m);
            take(o_layers, cfg.layers, flags.layers);
            take(o_seeds, cfg.seeds, flags.seeds);
            take(o_ham, cfg.hamiltonian, flags.hamiltonian);
            take(o_pop, cfg.population, flags.population);
            take(o_iter, cfg.iterations, flags.iterations);
            take(o_itr, cfg.train_iterations, flags.train_iterations);
            take(o_step, cfg.step, flags.step);
            take(o_mode, cfg.mode, flags.mode);
            take(o_shots, cfg.shots, flags.shots);
            take(o_p, cfg.noise_p, flags.noise_p);
            if (!bench_out.empty()) {
                cfg.output = bench_out;
            }
            cfg.validate();
            if (!bench_dump.empty()) {
                emit(json(cfg).dump(2) + "\n", bench_dump);
            }
            const auto rows = run_benchmark(cfg);
            emit(format_csv(rows), cfg.output);
            if (!bench_figs.empty()) {
                for (const auto &path : write_figure_files(rows, bench_figs)) {
                    std::cerr << "wrote " << path << '\n';
                }
            }
        } else if (*gen) {
            emit(format_edge_list(gen_regular_graph(gen_n, gen_d, gen_seed)), gen_out);
        }
    } catch (const std::exception &e) {
        std::cerr << "knitvqa: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
