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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "knitvqa/circuit.hpp"
#include "knitvqa/simulator.hpp"

namespace knitvqa {

struct Edge {
    std::size_t u = 0;
    std::size_t v = 0;
    double weight = 0.0;

    friend bool operator==(const Edge &, const Edge &) = default;
};

/// Undirected graph with non-negative weights. Edges are stored with u < v,
/// parallel edges merged, sorted by (u, v).
class WeightedGraph {
  public:
    WeightedGraph() = default;
    explicit WeightedGraph(std::size_t nodes) : nodes_(nodes) {}
    WeightedGraph(std::size_t nodes, const std::vector<Edge> &edges);

    void add_edge(std::size_t u, std::size_t v, double weight = 1.0);

    [[nodiscard]] std::size_t num_nodes() const noexcept { return nodes_; }
    [[nodiscard]] const std::vector<Edge> &edges() const noexcept {
        return edges_;
    }
    [[nodiscard]] double total_weight() const noexcept;
    [[nodiscard]] std::vector<std::size_t> degrees() const;

  private:
    std::size_t nodes_ = 0;
    std::vector<Edge> edges_;
};

/// Reads `u v weight` lines (weight optional, default 1). `#` comments.
[[nodiscard]] WeightedGraph parse_edge_list(std::string_view text);
[[nodiscard]] std::string format_edge_list(const WeightedGraph &graph);

/// Block index per node.
using Assignment = std::vector<std::size_t>;

struct PartitionPlan {
    std::vector<std::vector<Qubit>> blocks;
    std::size_t capacity = 0;
    double cut_weight = 0.0;
    /// Positions of cross-block two-qubit gates, filled by `attach_circuit`.
    std::vector<std::size_t> cut_gates;
    std::vector<GateKind> cut_kinds;

    [[nodiscard]] Assignment assignment(std::size_t num_nodes) const;
};

/// Edge weight = number of CX/CZ gates on the pair. IDENTITY2 carries no
/// entangling cost and adds no weight.
[[nodiscard]] WeightedGraph interaction_graph(const Circuit &circuit);

[[nodiscard]] double cut_value(const WeightedGraph &graph, const Assignment &a);

/// Canonical plan from an assignment: blocks relabelled by first occurrence,
/// empty blocks dropped.
[[nodiscard]] PartitionPlan make_plan(const WeightedGraph &graph,
                                      const Assignment &a, std::size_t capacity);

/// Local-search k-way min-cut with block capacity m: greedy and random
/// starts refined by single-node moves and pairwise swaps until no move
/// improves. At most `k` non-empty blocks.
[[nodiscard]] PartitionPlan kway_min_cut(const WeightedGraph &graph, std::size_t k,
                                         std::size_t m, std::uint64_t seed = 0,
                                         std::size_t restarts = 20);

/// Exhaustive search over set partitions with at most k blocks of size <= m.
/// Ties resolve to the lexicographically smallest canonical assignment.
[[nodiscard]] PartitionPlan brute_force_min_cut(const WeightedGraph &graph,
                                                std::size_t k, std::size_t m);

/// Fills cut_gates / cut_kinds for `circuit` and recomputes cut_weight.
[[nodiscard]] PartitionPlan attach_circuit(PartitionPlan plan,
                                           const Circuit &circuit);

/// 9^(number of cut CX/CZ gates).
[[nodiscard]] double sampling_overhead(const PartitionPlan &plan);
[[nodiscard]] std::size_t entangling_cuts(const PartitionPlan &plan);

enum class Partitioner { Heuristic, BruteForce };

/// Partitions the circuit's interaction graph for capacity m and attaches
/// cut gates. `k == 0` means no limit on the number of blocks.
[[nodiscard]] PartitionPlan partition_circuit(const Circuit &circuit, std::size_t m,
                                              std::size_t k = 0,
                                              Partitioner partitioner =
                                                  Partitioner::Heuristic,
                                              std::uint64_t seed = 0);

// ---------------------------------------------------------------------------
// Quasiprobability decomposition

/// One Kraus operator of a local map with the sign folded into the
/// measured value.
struct KrausBranch {
    Mat2 op;
    int sign = 1;
};

struct LocalOp {
    std::string label;
    std::vector<KrausBranch> branches;
};

struct QpdTerm {
    double coefficient = 0.0;
    LocalOp a; ///< acts on the first operand (control for CX)
    LocalOp b; ///< acts on the second operand
};

/// Signed local decomposition of a cross-block gate channel. CZ and CX give
/// six terms with one-norm 3; IDENTITY2 gives the identity term.
[[nodiscard]] std::vector<QpdTerm> qpd_terms(GateKind kind);
[[nodiscard]] double one_norm(const std::vector<QpdTerm> &terms) noexcept;

// ---------------------------------------------------------------------------
// Knit programs

/// Location where a cut gate's local operation is inserted in a fragment.
struct Insertion {
    std::size_t cut = 0;
    bool first_operand = true;
    std::size_t before_gate = 0; ///< index into the fragment circuit's gates
    Qubit local_qubit = 0;
};

struct Fragment {
    std::vector<Qubit> qubits; ///< global qubit ids, ascending
    /// Local-qubit circuit; slots keep the original numbering.
    Circuit circuit;
    std::vector<std::size_t> origin; ///< original gate position per gate
    std::vector<Insertion> insertions; ///< in original gate order
    std::vector<std::size_t> cuts; ///< distinct cut indices touching this fragment
};

struct CutPoint {
    std::size_t gate_position = 0;
    GateKind kind = GateKind::CZ;
    std::size_t fragment_a = 0;
    std::size_t fragment_b = 0;
};

struct KnitProgram {
    std::size_t num_qubits = 0;
    std::size_t num_params = 0;
    std::vector<Fragment> fragments;
    std::vector<CutPoint> cut_points;
    std::vector<std::vector<QpdTerm>> term_table;
    /// slot -> ascending fragment indices whose circuit uses the slot
    std::vector<std::vector<std::size_t>> param_map;
    /// original gate position -> (fragment, local gate index); cut gates map
    /// to (npos, npos)
    std::vector<std::pair<std::size_t, std::size_t>> gate_home;

    [[nodiscard]] double one_norm() const noexcept;
    [[nodiscard]] double sampling_overhead() const noexcept;
    /// Number of term combinations, product of per-cut term counts.
    [[nodiscard]] std::size_t combination_count() const noexcept;
};

[[nodiscard]] KnitProgram cut_circuit(const Circuit &circuit,
                                      const PartitionPlan &plan);

void to_json(nlohmann::json &j, const PartitionPlan &plan);
void from_json(const nlohmann::json &j, PartitionPlan &plan);
[[nodiscard]] nlohmann::json describe(const KnitProgram &program);

} // namespace knitvqa
