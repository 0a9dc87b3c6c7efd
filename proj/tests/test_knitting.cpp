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
#include <random>
#include <string>

#include "knitvqa/knitting.hpp"
#include "oracles.hpp"

using namespace knitvqa;

namespace {

WeightedGraph path4() { return WeightedGraph(4, {{0, 1, 1}, {1, 2, 1}, {2, 3, 1}}); }

WeightedGraph k4() {
    WeightedGraph g(4);
    for (std::size_t u = 0; u < 4; ++u) {
        for (std::size_t v = u + 1; v < 4; ++v) {
            g.add_edge(u, v);
        }
    }
    return g;
}

WeightedGraph prism() {
    return WeightedGraph(6, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1},
                             {3, 5, 1}, {0, 3, 1}, {1, 4, 1}, {2, 5, 1}});
}

oracle::Dense dense(const Mat2 &m) { return oracle::Dense::of2(m[0], m[1], m[2], m[3]); }

// Applies the signed local maps of one term to a two-qubit operator.
oracle::Dense apply_term(const QpdTerm &t, const oracle::Dense &rho) {
    oracle::Dense out(4);
    for (const auto &ba : t.a.branches) {
        for (const auto &bb : t.b.branches) {
            const oracle::Dense k = oracle::kron(dense(ba.op), dense(bb.op));
            out = out + oracle::scale(k * rho * oracle::dagger(k),
                                      static_cast<double>(ba.sign * bb.sign));
        }
    }
    return out;
}

oracle::Dense gate4(GateKind kind) {
    return oracle::gate_unitary(2, BoundGate{kind, {0, 1}, 0.0});
}

void check_channel(GateKind kind, const oracle::Dense &rho) {
    const oracle::Dense u = gate4(kind);
    const oracle::Dense want = u * rho * oracle::dagger(u);
    oracle::Dense got(4);
    for (const auto &t : qpd_terms(kind)) {
        got = got + oracle::scale(apply_term(t, rho), t.coefficient);
    }
    CHECK(oracle::max_abs_diff(got, want) <= 1e-10);
}

} // namespace

TEST_CASE("weighted graph invariants") {
    WeightedGraph g(3);
    g.add_edge(2, 0, 1.5);
    g.add_edge(0, 2, 0.5);
    REQUIRE(g.edges().size() == 1);
    CHECK(g.edges()[0] == Edge{0, 2, 2.0});
    CHECK_THROWS((void)g.add_edge(1, 1));
    CHECK_THROWS((void)g.add_edge(0, 1, -1.0));
    CHECK_THROWS((void)g.add_edge(0, 3));
    CHECK(g.total_weight() == 2.0);
}

TEST_CASE("edge list round trip") {
    const WeightedGraph g = parse_edge_list("# nodes 5\n0 1 2.5\n3 4\n# note\n");
    CHECK(g.num_nodes() == 5);
    REQUIRE(g.edges().size() == 2);
    CHECK(g.edges()[1].weight == 1.0);
    const WeightedGraph back = parse_edge_list(format_edge_list(g));
    CHECK(back.num_nodes() == 5);
    CHECK(back.edges() == g.edges());
    CHECK_THROWS((void)parse_edge_list("0 x\n"));
}

TEST_CASE("interaction graph counts two-qubit gates") {
    CHECK(interaction_graph(Circuit(2, {Gate::single(GateKind::H, 0)}, 0)).edges().empty());
    const Circuit twice(2, {Gate::two(GateKind::CX, 0, 1), Gate::two(GateKind::CX, 1, 0)}, 0);
    const auto g2 = interaction_graph(twice);
    REQUIRE(g2.edges().size() == 1);
    CHECK(g2.edges()[0] == Edge{0, 1, 2.0});
    const Circuit path(3, {Gate::two(GateKind::CX, 0, 1), Gate::two(GateKind::CZ, 1, 2)}, 0);
    CHECK(interaction_graph(path).edges() == std::vector<Edge>{{0, 1, 1.0}, {1, 2, 1.0}});
}

TEST_CASE("kway_min_cut examples") {
    const auto p = kway_min_cut(path4(), 2, 2, 1);
    CHECK(p.cut_weight == 1.0);
    CHECK(p.blocks == std::vector<std::vector<Qubit>>{{0, 1}, {2, 3}});
    CHECK(kway_min_cut(k4(), 2, 2, 1).cut_weight == 4.0);
    CHECK(kway_min_cut(prism(), 2, 3, 1).cut_weight == 3.0);
    CHECK_THROWS_AS((void)kway_min_cut(path4(), 1, 3, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)kway_min_cut(path4(), 0, 4, 0), std::invalid_argument);
}

TEST_CASE("kway_min_cut is deterministic given a seed") {
    std::mt19937_64 rng(2);
    const auto edges = oracle::random_regular(10, 3, rng);
    WeightedGraph g(10);
    for (auto [u, v] : edges) {
        g.add_edge(u, v);
    }
    const auto a = kway_min_cut(g, 4, 3, 99);
    const auto b = kway_min_cut(g, 4, 3, 99);
    CHECK(a.blocks == b.blocks);
    CHECK(a.cut_weight == b.cut_weight);
}

TEST_CASE("brute_force_min_cut examples") {
    CHECK(brute_force_min_cut(WeightedGraph(4), 2, 2).cut_weight == 0.0);
    CHECK(brute_force_min_cut(WeightedGraph(2, {{0, 1, 1}}), 2, 1).cut_weight == 1.0);
    const auto p = brute_force_min_cut(prism(), 2, 3);
    CHECK(p.cut_weight == 3.0);
    CHECK(p.blocks == std::vector<std::vector<Qubit>>{{0, 1, 2}, {3, 4, 5}});
    CHECK_THROWS_AS((void)brute_force_min_cut(WeightedGraph(13), 13, 1), std::length_error);
}

TEST_CASE("brute force matches an independent enumeration") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> w(0.0, 2.0);
    for (int trial = 0; trial < 15; ++trial) {
        const std::size_t n = 4 + trial % 4;
        WeightedGraph g(n);
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = u + 1; v < n; ++v) {
                if (w(rng) < 1.0) {
                    g.add_edge(u, v, w(rng));
                }
            }
        }
        const std::size_t m = 2 + trial % 2;
        const std::size_t k = (n + m - 1) / m + 1;
        // Every labelling in [0,k)^n, filtered by capacity.
        double best = 1e300;
        std::vector<std::size_t> a(n, 0);
        for (;;) {
            std::vector<std::size_t> size(k, 0);
            bool ok = true;
            for (auto b : a) {
                ok = ok && ++size[b] <= m;
            }
            if (ok) {
                best = std::min(best, cut_value(g, a));
            }
            std::size_t i = 0;
            while (i < n && ++a[i] == k) {
                a[i++] = 0;
            }
            if (i == n) {
                break;
            }
        }
        CHECK(brute_force_min_cut(g, k, m).cut_weight == doctest::Approx(best).epsilon(1e-12));
    }
}

TEST_CASE("heuristic matches brute force on regular graphs") {
    std::size_t misses = 0;
    std::size_t total = 0;
    for (std::size_t d : {2, 3}) {
        for (std::size_t n = 4; n <= 10; n += 2) {
            for (std::size_t m : {2, 3, 4}) {
                for (std::uint64_t seed = 0; seed < 30; ++seed) {
                    std::mt19937_64 rng(seed * 1000 + n * 10 + d);
                    WeightedGraph g(n);
                    for (auto [u, v] : oracle::random_regular(n, d, rng)) {
                        g.add_edge(u, v);
                    }
                    const std::size_t k = (n + m - 1) / m;
                    const double h = kway_min_cut(g, k, m, seed).cut_weight;
                    const double b = brute_force_min_cut(g, k, m).cut_weight;
                    ++total;
                    if (std::abs(h - b) > 1e-9) {
                        ++misses;
                    }
                }
            }
        }
    }
    INFO("misses " << misses << " of " << total);
    CHECK(misses == 0);
}

TEST_CASE("plans are feasible partitions") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 20; ++trial) {
        const Circuit c = oracle::random_circuit(7, 30, rng);
        const auto plan = partition_circuit(c, 3, 0, Partitioner::Heuristic, trial);
        std::vector<int> seen(7, 0);
        for (const auto &b : plan.blocks) {
            CHECK(b.size() <= 3);
            for (auto q : b) {
                ++seen[q];
            }
        }
        for (int s : seen) {
            CHECK(s == 1);
        }
        const auto a = plan.assignment(7);
        double weight = 0.0;
        std::size_t idx = 0;
        for (std::size_t pos = 0; pos < c.gates().size(); ++pos) {
            const auto &g = c.gates()[pos];
            if (g.arity() == 2 && a[g.qubits[0]] != a[g.qubits[1]]) {
                REQUIRE(idx < plan.cut_gates.size());
                CHECK(plan.cut_gates[idx++] == pos);
                weight += g.kind == GateKind::Identity2 ? 0.0 : 1.0;
            }
        }
        CHECK(idx == plan.cut_gates.size());
        CHECK(plan.cut_weight == weight);
        CHECK(sampling_overhead(plan) == std::pow(9.0, weight));
    }
}

TEST_CASE("sampling overhead") {
    PartitionPlan p;
    CHECK(sampling_overhead(p) == 1.0);
    p.cut_kinds = {GateKind::CZ};
    CHECK(sampling_overhead(p) == 9.0);
    p.cut_kinds = {GateKind::CZ, GateKind::CX, GateKind::CX};
    CHECK(sampling_overhead(p) == 729.0);
    p.cut_kinds.push_back(GateKind::Identity2);
    CHECK(sampling_overhead(p) == 729.0);
}

TEST_CASE("overhead is non-increasing in capacity with the exact partitioner") {
    std::mt19937_64 rng(19);
    for (int trial = 0; trial < 10; ++trial) {
        const Circuit c = oracle::random_circuit(6, 20, rng);
        double last = std::numeric_limits<double>::infinity();
        for (std::size_t m = 1; m <= 6; ++m) {
            const double h = sampling_overhead(partition_circuit(c, m, 0, Partitioner::BruteForce));
            CHECK(h <= last);
            last = h;
        }
        CHECK(last == 1.0);
    }
}

TEST_CASE("qpd term structure") {
    const auto id = qpd_terms(GateKind::Identity2);
    REQUIRE(id.size() == 1);
    CHECK(id[0].coefficient == 1.0);
    for (auto kind : {GateKind::CZ, GateKind::CX}) {
        const auto terms = qpd_terms(kind);
        CHECK(terms.size() == 6);
        CHECK(one_norm(terms) == doctest::Approx(3.0).epsilon(1e-15));
        for (const auto &t : terms) {
            CHECK(std::abs(t.coefficient) > 0.0);
        }
    }
    CHECK_THROWS_AS((void)qpd_terms(GateKind::H), std::invalid_argument);
}

TEST_CASE("local operations are trace non-increasing") {
    for (auto kind : {GateKind::CZ, GateKind::CX, GateKind::Identity2}) {
        for (const auto &t : qpd_terms(kind)) {
            for (const LocalOp *op : {&t.a, &t.b}) {
                Mat2 sum{};
                for (const auto &br : op->branches) {
                    CHECK((br.sign == 1 || br.sign == -1));
                    const Mat2 kk = matmul(adjoint(br.op), br.op);
                    for (int i = 0; i < 4; ++i) {
                        sum[i] += kk[i];
                    }
                }
                // I - sum must be positive semidefinite.
                const double a = 1.0 - sum[0].real();
                const double d = 1.0 - sum[3].real();
                CHECK(a >= -1e-12);
                CHECK(d >= -1e-12);
                CHECK(a * d - std::norm(sum[1]) >= -1e-12);
            }
        }
    }
}

TEST_CASE("qpd reproduces the gate channel on all Pauli-basis inputs") {
    const std::string letters = "IXYZ";
    for (auto kind : {GateKind::CZ, GateKind::CX, GateKind::Identity2}) {
        for (char p : letters) {
            for (char q : letters) {
                check_channel(kind, oracle::pauli_string(std::string{p, q}));
            }
        }
    }
}

TEST_CASE("qpd reproduces CZ on |++>") {
    oracle::Dense rho(4);
    for (auto &v : rho.a) {
        v = 0.25;
    }
    check_channel(GateKind::CZ, rho);
    check_channel(GateKind::CX, rho);
}

TEST_CASE("cut_circuit structure") {
    SUBCASE("no cut gates") {
        const Circuit c(4,
                        {Gate::rotation(GateKind::RX, 0, Slot{0}), Gate::two(GateKind::CX, 0, 1),
                         Gate::rotation(GateKind::RY, 3, Slot{1}), Gate::two(GateKind::CZ, 2, 3)},
                        2);
        const auto prog = cut_circuit(c, partition_circuit(c, 2));
        CHECK(prog.fragments.size() == 2);
        CHECK(prog.term_table.empty());
        CHECK(prog.combination_count() == 1);
        CHECK(prog.sampling_overhead() == 1.0);
        CHECK(prog.fragments[0].circuit.gates().size() == 2);
    }
    SUBCASE("one cut") {
        const Circuit c(2, {Gate::single(GateKind::H, 0), Gate::two(GateKind::CX, 0, 1)}, 0);
        const auto prog = cut_circuit(c, partition_circuit(c, 1));
        REQUIRE(prog.fragments.size() == 2);
        CHECK(prog.fragments[0].qubits.size() == 1);
        CHECK(prog.fragments[1].qubits.size() == 1);
        REQUIRE(prog.cut_points.size() == 1);
        CHECK(prog.cut_points[0].gate_position == 1);
        CHECK(prog.term_table[0].size() == 6);
        CHECK(prog.one_norm() == doctest::Approx(3.0));
        CHECK(prog.sampling_overhead() == doctest::Approx(9.0));
    }
    SUBCASE("two cuts") {
        const Circuit c(2, {Gate::two(GateKind::CZ, 0, 1), Gate::two(GateKind::CX, 1, 0)}, 0);
        const auto prog = cut_circuit(c, partition_circuit(c, 1));
        CHECK(prog.combination_count() == 36);
    }
    SUBCASE("capacity violation") {
        const Circuit c(3, {Gate::two(GateKind::CZ, 0, 1)}, 0);
        PartitionPlan plan;
        plan.blocks = {{0, 1, 2}};
        plan.capacity = 2;
        CHECK_THROWS_AS((void)cut_circuit(c, plan), std::invalid_argument);
    }
}

TEST_CASE("param_map agrees with parameter_table") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        const Circuit c = oracle::random_circuit(6, 30, rng);
        const auto prog = cut_circuit(c, partition_circuit(c, 3, 0, Partitioner::Heuristic, trial));
        const auto table = parameter_table(c);
        REQUIRE(prog.param_map.size() == table.size());
        for (std::size_t s = 0; s < table.size(); ++s) {
            std::vector<std::size_t> want;
            for (auto pos : table[s]) {
                want.push_back(prog.gate_home[pos].first);
            }
            std::sort(want.begin(), want.end());
            want.erase(std::unique(want.begin(), want.end()), want.end());
            CHECK(prog.param_map[s] == want);
        }
        for (const auto &f : prog.fragments) {
            CHECK(f.qubits.size() <= 3);
        }
    }
}

TEST_CASE("plan json round trip") {
    const auto plan = partition_circuit(
        Circuit(3, {Gate::two(GateKind::CZ, 0, 1), Gate::two(GateKind::CX, 1, 2)}, 0), 2);
    const nlohmann::json j = plan;
    const auto back = j.get<PartitionPlan>();
    CHECK(back.blocks == plan.blocks);
    CHECK(back.cut_weight == plan.cut_weight);
    CHECK(back.cut_gates == plan.cut_gates);
    CHECK(back.cut_kinds == plan.cut_kinds);
    CHECK(back.capacity == plan.capacity);
}
