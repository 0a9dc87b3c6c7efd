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
#include <numbers>
#include <random>

#include "knitvqa/vqa.hpp"
#include "oracles.hpp"

using namespace knitvqa;

namespace {

constexpr double kPi = std::numbers::pi;

KnitProgram whole(const Circuit &c) {
    PartitionPlan p;
    p.blocks.emplace_back();
    for (std::size_t q = 0; q < c.num_qubits(); ++q) {
        p.blocks.back().push_back(q);
    }
    return cut_circuit(c, attach_circuit(p, c));
}

KnitProgram with_blocks(const Circuit &c, std::vector<std::vector<Qubit>> blocks) {
    PartitionPlan p;
    p.blocks = std::move(blocks);
    return cut_circuit(c, attach_circuit(p, c));
}

WeightedGraph prism() {
    return WeightedGraph(6, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1},
                             {3, 5, 1}, {0, 3, 1}, {1, 4, 1}, {2, 5, 1}});
}

// Two weakly coupled 4-qubit chains: blocks {0..3} and {4..7} share one CX.
Circuit two_chain_ansatz(std::size_t layers, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> pick(0, 2);
    AnsatzSpec spec;
    for (std::size_t l = 0; l < layers; ++l) {
        AnsatzLayer layer;
        for (int q = 0; q < 8; ++q) {
            layer.singles.push_back(static_cast<GateKind>(pick(rng)));
        }
        for (Qubit q = 0; q + 1 < 8; ++q) {
            if (q != 3 || l == 0) {
                layer.placements.push_back({GateKind::CX, q, q + 1});
            }
        }
        spec.layers.push_back(layer);
    }
    return build_ansatz(spec, 8);
}

} // namespace

TEST_CASE("maxcut observable") {
    const auto one = maxcut_observable(WeightedGraph(2, {{0, 1, 1}}));
    CHECK(one.offset() == 0.5);
    REQUIRE(one.terms().size() == 1);
    CHECK(one.terms()[0] == PauliTerm{-0.5, "ZZ"});
    const auto tri = maxcut_observable(WeightedGraph(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}));
    CHECK(tri.offset() == 1.5);
    CHECK(tri.terms().size() == 3);
    const BoundCircuit plus(2, {{GateKind::H, {0, 0}, 0.0}, {GateKind::H, {1, 0}, 0.0}});
    CHECK(expectation(run_statevector(plus), one) == doctest::Approx(0.5));
}

TEST_CASE("max cut and approximation ratio") {
    CHECK(approximation_ratio(3.0, 3.0) == 1.0);
    CHECK(approximation_ratio(0.5, 1.0) == 0.5);
    CHECK_THROWS_AS((void)approximation_ratio(0.5, 0.0), std::invalid_argument);
    // Independent enumeration over all 2^6 labellings.
    const auto g = prism();
    double best = 0.0;
    for (unsigned mask = 0; mask < 64; ++mask) {
        double cut = 0.0;
        for (const auto &e : g.edges()) {
            cut += ((mask >> e.u) & 1U) != ((mask >> e.v) & 1U) ? e.weight : 0.0;
        }
        best = std::max(best, cut);
    }
    CHECK(best == 7.0);
    CHECK(max_cut_value(g) == best);
    CHECK(ProblemInstance::maxcut(g).reference == best);
}

TEST_CASE("loss examples") {
    const Circuit rx(1, {Gate::rotation(GateKind::RX, 0, Slot{0})}, 1);
    const auto vqe = ProblemInstance::vqe(Observable(1, {{1.0, "Z"}}));
    CHECK(loss(whole(rx), vqe, {kPi}) == doctest::Approx(-1.0).epsilon(1e-12));

    const WeightedGraph edge(2, {{0, 1, 1}});
    const auto qaoa = ProblemInstance::maxcut(edge);
    const Circuit c = qaoa_circuit(edge, 1);
    CHECK(c.num_params() == 2);
    CHECK(loss(whole(c), qaoa, {0.0, 0.0}) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(loss(with_blocks(c, {{0}, {1}}), qaoa, {0.0, 0.0}) ==
          doctest::Approx(-0.5).epsilon(1e-10));
}

TEST_CASE("knit loss matches the uncut circuit") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        const Circuit c = oracle::random_circuit(5, 14, rng);
        const auto plan = partition_circuit(c, 3, 0, Partitioner::Heuristic, trial);
        if (plan.cut_gates.size() > 4) {
            continue;
        }
        const auto problem = ProblemInstance::vqe(oracle::random_observable(5, 4, rng));
        const auto theta = oracle::random_theta(c.num_params(), rng);
        CHECK(std::abs(loss(cut_circuit(c, plan), problem, theta) -
                       oracle::dense_expectation(knitvqa::bind(c, theta), problem.hamiltonian)) <=
              1e-8);
    }
}

TEST_CASE("qaoa template evolves the expected cut") {
    const auto g = prism();
    const auto problem = ProblemInstance::maxcut(g);
    const Circuit c = qaoa_circuit(g, 2);
    const std::vector<double> theta{0.4, -0.3, 0.9, 0.2};
    const double dense = oracle::dense_expectation(knitvqa::bind(c, theta), problem.hamiltonian);
    CHECK(loss(whole(c), problem, theta) == doctest::Approx(-dense).epsilon(1e-12));
    CHECK(dense > 0.0);
    CHECK(dense <= problem.reference);
}

TEST_CASE("parameter shift examples") {
    const Circuit rx(1, {Gate::rotation(GateKind::RX, 0, Slot{0})}, 1);
    const auto z = ProblemInstance::vqe(Observable(1, {{1.0, "Z"}}));
    const auto grad = parameter_shift_grad(whole(rx), z, {kPi / 2});
    CHECK(grad[0] == doctest::Approx(-1.0).epsilon(1e-12));

    const Circuit idle(2,
                       {Gate::rotation(GateKind::RX, 0, Slot{0}),
                        Gate::rotation(GateKind::RY, 1, Slot{1})},
                       2);
    const auto zi = ProblemInstance::vqe(Observable(2, {{1.0, "ZI"}}));
    CHECK(parameter_shift_grad(whole(idle), zi, {0.3, 1.2})[1] == 0.0);
}

TEST_CASE("parameter shift matches central finite differences") {
    std::mt19937_64 rng(57);
    double worst = 0.0;
    int done = 0;
    while (done < 50) {
        const std::size_t n = 2 + done % 5;
        const Circuit c = oracle::random_circuit(n, 12, rng, false);
        if (c.num_params() == 0) {
            continue;
        }
        const auto plan = partition_circuit(c, 1 + done % 3, 0, Partitioner::Heuristic, done);
        if (plan.cut_gates.size() > 3) {
            continue;
        }
        const auto prog = cut_circuit(c, plan);
        const auto problem = ProblemInstance::vqe(oracle::random_observable(n, 3, rng));
        const auto theta = oracle::random_theta(c.num_params(), rng);
        const auto grad = parameter_shift_grad(prog, problem, theta);
        const double h = 1e-5;
        for (std::size_t j = 0; j < theta.size(); ++j) {
            auto up = theta;
            auto down = theta;
            up[j] += h;
            down[j] -= h;
            const double fd = (loss(prog, problem, up) - loss(prog, problem, down)) / (2 * h);
            worst = std::max(worst, std::abs(fd - grad[j]));
        }
        ++done;
    }
    CHECK(worst <= 1e-6);
}

TEST_CASE("parameter shift handles shared and scaled slots") {
    const auto g = prism();
    const auto problem = ProblemInstance::maxcut(g);
    const auto prog = with_blocks(qaoa_circuit(g, 1), {{0, 1, 2}, {3, 4, 5}});
    const std::vector<double> theta{0.7, -0.2};
    const auto grad = parameter_shift_grad(prog, problem, theta);
    const double h = 1e-5;
    for (std::size_t j = 0; j < 2; ++j) {
        auto up = theta;
        auto down = theta;
        up[j] += h;
        down[j] -= h;
        const double dense_up = -oracle::dense_expectation(knitvqa::bind(qaoa_circuit(g, 1), up),
                                                           problem.hamiltonian);
        const double dense_down = -oracle::dense_expectation(
            knitvqa::bind(qaoa_circuit(g, 1), down), problem.hamiltonian);
        CHECK(grad[j] == doctest::Approx((dense_up - dense_down) / (2 * h)).epsilon(1e-6));
    }
}

TEST_CASE("parameter shift rejects non-rotation slots") {
    Gate bad = Gate::single(GateKind::H, 0);
    bad.angle = Slot{0};
    CHECK_THROWS((void)Circuit(1, {bad}, 1));
}

TEST_CASE("fragment index") {
    const Circuit shared(2,
                         {Gate::rotation(GateKind::RX, 0, Slot{0}),
                          Gate::rotation(GateKind::RX, 1, Slot{0})},
                         1);
    CHECK(param_fragment_index(with_blocks(shared, {{0}, {1}})).acceleration == 1.0);

    std::vector<Gate> gates;
    for (Qubit q = 0; q < 4; ++q) {
        gates.push_back(Gate::rotation(GateKind::RY, q, Slot{q}));
    }
    const Circuit four(4, gates, 4);
    const auto idx = param_fragment_index(with_blocks(four, {{0}, {1}, {2}, {3}}));
    CHECK(idx.acceleration == 0.25);
    CHECK(idx.counts == std::vector<std::size_t>{1, 1, 1, 1});

    gates.push_back(Gate::rotation(GateKind::RZ, 3, Slot{0}));
    const Circuit mixed(4, gates, 4);
    // Slot 0 sits in two of four fragments, the rest in one.
    CHECK(param_fragment_index(with_blocks(mixed, {{0}, {1}, {2}, {3}})).acceleration ==
          doctest::Approx((0.5 + 0.25 * 3) / 4));

    CHECK(param_fragment_index(whole(Circuit(1, {}, 0))).acceleration == 0.0);
}

TEST_CASE("training examples") {
    const Circuit rx(1, {Gate::rotation(GateKind::RX, 0, Slot{0})}, 1);
    const auto z = ProblemInstance::vqe(Observable(1, {{1.0, "Z"}}));
    SUBCASE("zero iterations") {
        TrainConfig cfg;
        cfg.max_iterations = 0;
        const auto r = train_full(whole(rx), z, {0.4}, cfg);
        CHECK(r.theta_star == std::vector<double>{0.4});
        CHECK(r.loss_history.size() == 1);
        CHECK(r.fragment_executions == 1);
    }
    SUBCASE("convex case converges to pi") {
        TrainConfig cfg;
        cfg.step = 0.5;
        cfg.threshold = 1e-14;
        cfg.max_iterations = 2000;
        const auto r = train_full(whole(rx), z, {0.4}, cfg);
        CHECK(std::abs(r.final_loss + 1.0) <= 1e-6);
        CHECK(std::abs(r.theta_star[0] - kPi) <= 1e-3);
        CHECK(r.performance == doctest::Approx(std::abs(r.final_loss + 1.0)));
    }
    SUBCASE("performance matches re-evaluation") {
        const auto r = train_subcircuit(whole(rx), z, {0.4});
        CHECK(std::abs(loss(whole(rx), z, r.theta_star) - r.final_loss) <= 1e-9);
        CHECK(r.loss_history.back() == r.final_loss);
    }
    SUBCASE("divergence guard") {
        CHECK_THROWS_AS((void)train_full(whole(rx), z, {std::nan("")}), std::runtime_error);
    }
}

TEST_CASE("single fragment programs train identically") {
    const auto g = prism();
    const auto problem = ProblemInstance::maxcut(g);
    const auto prog = whole(qaoa_circuit(g, 1));
    TrainConfig cfg;
    cfg.max_iterations = 30;
    const auto a = train_subcircuit(prog, problem, {0.1, 0.2}, cfg);
    const auto b = train_full(prog, problem, {0.1, 0.2}, cfg);
    CHECK(a.loss_history == b.loss_history);
    CHECK(a.theta_star == b.theta_star);
    CHECK(a.fragment_executions == b.fragment_executions);
}

TEST_CASE("subcircuit training saves executions in proportion to K_i / L") {
    std::mt19937_64 rng(5);
    WeightedGraph g(8);
    for (auto [u, v] : oracle::random_regular(8, 3, rng)) {
        g.add_edge(u, v);
    }
    const auto problem = ProblemInstance::maxcut(g);
    const Circuit c = two_chain_ansatz(2, 3);
    const auto prog = with_blocks(c, {{0, 1, 2, 3}, {4, 5, 6, 7}});
    REQUIRE(prog.cut_points.size() == 1);
    const auto idx = param_fragment_index(prog);
    CHECK(idx.acceleration == 0.5);
    TrainConfig cfg;
    cfg.max_iterations = 5;
    const auto theta0 = random_parameters(c.num_params(), 9);
    const auto sub = train_subcircuit(prog, problem, theta0, cfg);
    const auto full = train_full(prog, problem, theta0, cfg);
    CHECK(sub.loss_history == full.loss_history);
    CHECK(sub.fragment_executions < full.fragment_executions);
    for (std::size_t i = 0; i < c.num_params(); ++i) {
        CHECK(sub.slot_executions[i] * idx.fragment_count == full.slot_executions[i] * idx.counts[i]);
    }
}

TEST_CASE("train report serializes") {
    const Circuit rx(1, {Gate::rotation(GateKind::RX, 0, Slot{0})}, 1);
    TrainConfig cfg;
    cfg.max_iterations = 2;
    const auto r = train_full(whole(rx), ProblemInstance::vqe(Observable(1, {{1.0, "Z"}})),
                              {0.1}, cfg);
    const nlohmann::json j = r;
    CHECK(j.at("loss_history").size() == r.loss_history.size());
    CHECK(j.at("fragment_executions").get<std::size_t>() == r.fragment_executions);
}

TEST_CASE("random parameters are reproducible") {
    CHECK(random_parameters(5, 1) == random_parameters(5, 1));
    CHECK(random_parameters(5, 1) != random_parameters(5, 2));
    for (double t : random_parameters(100, 3)) {
        CHECK(t >= -kPi);
        CHECK(t < kPi);
    }
}
