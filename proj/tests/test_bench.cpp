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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "knitvqa/bench.hpp"
#include "oracles.hpp"

using namespace knitvqa;

namespace {

std::string temp_file(const std::string &name, const std::string &text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path.string();
}

ExperimentConfig quick(const std::string &study) {
    ExperimentConfig c;
    c.study = study;
    c.n = 4;
    c.d = 2;
    c.m = 2;
    c.layers = 1;
    c.seeds = {0, 1};
    c.population = 4;
    c.iterations = 2;
    c.subset = 4;
    c.train_iterations = 20;
    return c;
}

} // namespace

TEST_CASE("gen_regular_graph: small cases") {
    const auto g = gen_regular_graph(4, 1, 0);
    CHECK(g.edges().size() == 2);
    CHECK(g.degrees() == std::vector<std::size_t>(4, 1));
    const auto h = gen_regular_graph(6, 3, 0);
    CHECK(h.edges().size() == 9);
    CHECK(h.degrees() == std::vector<std::size_t>(6, 3));
    CHECK(format_edge_list(gen_regular_graph(8, 3, 5)) ==
          format_edge_list(gen_regular_graph(8, 3, 5)));
    CHECK_THROWS_AS((void)gen_regular_graph(5, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)gen_regular_graph(4, 4, 0), std::invalid_argument);
}

TEST_CASE("gen_regular_graph: simple and regular over 100 seeds") {
    for (auto [n, d] : {std::pair<std::size_t, std::size_t>{6, 3}, {8, 3}, {10, 4}, {9, 2}}) {
        std::set<std::string> distinct;
        for (std::uint64_t seed = 0; seed < 100; ++seed) {
            const auto g = gen_regular_graph(n, d, seed);
            CHECK(g.degrees() == std::vector<std::size_t>(n, d));
            std::set<std::pair<std::size_t, std::size_t>> seen;
            for (const auto &e : g.edges()) {
                CHECK(e.u != e.v);
                CHECK(e.weight == 1.0);
                CHECK(seen.insert(std::minmax(e.u, e.v)).second);
            }
            distinct.insert(format_edge_list(g));
        }
        CHECK(distinct.size() > 10);
    }
}

TEST_CASE("load_hamiltonian: format and merging") {
    const auto one = load_hamiltonian(temp_file("kv_one.txt", "1.0 Z\n"));
    CHECK(one.num_qubits() == 1);
    REQUIRE(one.terms().size() == 1);
    CHECK(one.terms()[0].coefficient == 1.0);

    const auto dup = load_hamiltonian(temp_file("kv_dup.txt", "0.5 ZZ\n0.5 ZZ\n"));
    REQUIRE(dup.terms().size() == 1);
    CHECK(dup.terms()[0].coefficient == doctest::Approx(1.0));

    const auto bad = temp_file("kv_bad.txt", "0.5 ZZ\n0.5 ZZZ\n");
    CHECK_THROWS_AS((void)load_hamiltonian(bad), std::invalid_argument);
    try {
        (void)load_hamiltonian(temp_file("kv_bad2.txt", "0.5 ZZ\nnot a line\n"));
        FAIL("expected a parse error");
    } catch (const std::exception &e) {
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
    CHECK_THROWS((void)load_hamiltonian("/nonexistent/h.txt"));
}

TEST_CASE("load_hamiltonian: shipped H2 reference") {
    const auto h2 = load_hamiltonian(std::string(KNITVQA_DATA_DIR) + "/h2.txt");
    CHECK(h2.num_qubits() == 4);
    const double jacobi = oracle::min_eigenvalue(oracle::observable_matrix(h2));
    const auto problem = ProblemInstance::vqe(h2);
    CHECK(problem.reference == doctest::Approx(jacobi).epsilon(1e-10));
    CHECK(jacobi == doctest::Approx(-1.857275).epsilon(1e-6));
}

TEST_CASE("experiment config: json round trip and validation") {
    ExperimentConfig c = quick("weights");
    c.weights = FitnessWeights::with_locality();
    c.noise_kinds = {"DEP", "THE"};
    c.mode = "sampled";
    const nlohmann::json j = c;
    const auto back = j.get<ExperimentConfig>();
    CHECK(nlohmann::json(back) == j);
    CHECK(nlohmann::json(back).dump() == j.dump());

    CHECK(nlohmann::json::object().get<ExperimentConfig>().n == ExperimentConfig{}.n);
    CHECK_THROWS(nlohmann::json{{"bogus", 1}}.get<ExperimentConfig>());

    ExperimentConfig bad = quick("search");
    bad.study = "nope";
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = quick("search");
    bad.algo = "vqe";
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = quick("search");
    bad.seeds.clear();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = quick("search");
    bad.n = 5;
    bad.d = 3;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("csv: header and byte reproducibility") {
    CHECK(csv_header() ==
          "study,algo,n,m,layers,seed,performance,overhead,fragment_executions,wall_time_s,"
          "status");
    CHECK(csv_header(false).find("wall_time_s") == std::string::npos);
    for (const char *study : {"search", "train", "capacity", "layers", "weights", "noise"}) {
        CAPTURE(study);
        ExperimentConfig c = quick(study);
        c.capacities = {1, 2, 4};
        c.layer_counts = {1, 2};
        c.wg_values = {0.2, 0.8};
        const auto a = run_benchmark(c);
        const auto b = run_benchmark(c);
        CHECK(!a.empty());
        CHECK(format_csv(a, false) == format_csv(b, false));
        for (const auto &r : a) {
            CHECK(r.status == "ok");
        }
    }
}

TEST_CASE("csv: every row re-validates from its seed") {
    ExperimentConfig c = quick("search");
    c.seeds = {0, 1, 2};
    const auto rows = run_benchmark(c);
    REQUIRE(rows.size() == 3);
    for (const auto &r : rows) {
        ExperimentConfig one = c;
        one.seeds = {r.seed};
        const auto again = run_benchmark(one);
        REQUIRE(again.size() == 1);
        CHECK(std::abs(again[0].performance - r.performance) <= 1e-9);
        CHECK(again[0].overhead == r.overhead);
    }
}

TEST_CASE("bench: errors are recorded per row") {
    ExperimentConfig c = quick("search");
    c.algo = "vqe";
    c.hamiltonian = "/nonexistent/h.txt";
    const auto rows = run_benchmark(c);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].status.rfind("error:", 0) == 0);
    CHECK(format_csv(rows).find("error:") != std::string::npos);
}

TEST_CASE("bench: capacity sweep overhead is non-increasing") {
    ExperimentConfig c = quick("capacity");
    c.n = 6;
    c.d = 3;
    c.layers = 2;
    c.capacities = {1, 2, 3, 6};
    const auto rows = run_benchmark(c);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].seed == rows[i - 1].seed) {
            CHECK(rows[i].overhead <= rows[i - 1].overhead);
        }
    }
    CHECK(rows.back().overhead == 1.0);
}

TEST_CASE("bench: figure files") {
    ExperimentConfig c = quick("weights");
    c.wg_values = {0.2, 0.8};
    const auto rows = run_benchmark(c);
    const auto dir = std::filesystem::temp_directory_path() / "kv_figs";
    std::filesystem::create_directories(dir);
    const auto written = write_figure_files(rows, dir.string());
    REQUIRE(written.size() == 1);
    std::ifstream in(written[0]);
    std::string header;
    std::getline(in, header);
    CHECK(header == "x,performance_mean,overhead_mean,fragment_executions_mean,count");
    int lines = 0;
    for (std::string line; std::getline(in, line);) {
        ++lines;
    }
    CHECK(lines == 2);
}
