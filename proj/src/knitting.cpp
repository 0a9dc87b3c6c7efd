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

#include "knitvqa/knitting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <optional>
#include <tuple>
#include <random>
#include <sstream>
#include <stdexcept>

namespace knitvqa {

namespace {

constexpr double kEps = 1e-12;

using WeightMatrix = std::vector<std::vector<double>>;

WeightMatrix dense_weights(const WeightedGraph &g) {
    WeightMatrix w(g.num_nodes(), std::vector<double>(g.num_nodes(), 0.0));
    for (const auto &e : g.edges()) {
        w[e.u][e.v] += e.weight;
        w[e.v][e.u] += e.weight;
    }
    return w;
}

void check_feasible(std::size_t n, std::size_t k, std::size_t m) {
    if (k == 0 || m == 0) {
        throw std::invalid_argument("partition needs k >= 1 and m >= 1");
    }
    if (k * m < n) {
        throw std::invalid_argument("infeasible capacity: k*m = " +
                                    std::to_string(k * m) + " < " +
                                    std::to_string(n) + " nodes");
    }
}

Assignment canonical(const Assignment &a) {
    Assignment out(a.size());
    std::vector<std::size_t> relabel;
    std::vector<std::size_t> seen_labels;
    for (std::size_t i = 0; i < a.size(); ++i) {
        auto it = std::find(seen_labels.begin(), seen_labels.end(), a[i]);
        if (it == seen_labels.end()) {
            seen_labels.push_back(a[i]);
            out[i] = seen_labels.size() - 1;
        } else {
            out[i] = static_cast<std::size_t>(it - seen_labels.begin());
        }
    }
    return out;
}

// Connection weight from node v into each block.
std::vector<double> block_links(const WeightMatrix &w, const Assignment &a,
                                std::size_t v, std::size_t k) {
    std::vector<double> links(k, 0.0);
    for (std::size_t u = 0; u < a.size(); ++u) {
        if (u != v) {
            links[a[u]] += w[v][u];
        }
    }
    return links;
}

// Best-improvement descent over single moves and pairwise swaps.
void refine(const WeightMatrix &w, Assignment &a, std::size_t k, std::size_t m) {
    const std::size_t n = a.size();
    std::vector<std::size_t> size(k, 0);
    for (auto b : a) {
        ++size[b];
    }
    while (true) {
        double best_gain = kEps;
        std::size_t best_u = n;
        std::size_t best_v = n;
        std::size_t best_block = k;
        std::vector<std::vector<double>> links(n);
        for (std::size_t v = 0; v < n; ++v) {
            links[v] = block_links(w, a, v, k);
        }
        for (std::size_t v = 0; v < n; ++v) {
            for (std::size_t b = 0; b < k; ++b) {
                if (b == a[v] || size[b] >= m) {
                    continue;
                }
                const double gain = links[v][b] - links[v][a[v]];
                if (gain > best_gain) {
                    best_gain = gain;
                    best_u = v;
                    best_v = n;
                    best_block = b;
                }
            }
        }
        for (std::size_t u = 0; u < n; ++u) {
            for (std::size_t v = u + 1; v < n; ++v) {
                const auto bu = a[u];
                const auto bv = a[v];
                if (bu == bv) {
                    continue;
                }
                const double gain = links[u][bv] - links[u][bu] +
                                    links[v][bu] - links[v][bv] - 2.0 * w[u][v];
                if (gain > best_gain) {
                    best_gain = gain;
                    best_u = u;
                    best_v = v;
                }
            }
        }
        if (best_u == n) {
            return;
        }
        if (best_v == n) {
            --size[a[best_u]];
            ++size[best_block];
            a[best_u] = best_block;
        } else {
            std::swap(a[best_u], a[best_v]);
        }
    }
}

// Fill blocks one at a time, always pulling in the unassigned node most
// strongly linked to the current block.
Assignment greedy_start(const WeightMatrix &w, std::size_t k, std::size_t m) {
    const std::size_t n = w.size();
    constexpr auto kNone = std::numeric_limits<std::size_t>::max();
    Assignment a(n, kNone);
    std::size_t placed = 0;
    for (std::size_t b = 0; b < k && placed < n; ++b) {
        std::vector<std::size_t> members;
        while (members.size() < m && placed < n) {
            std::size_t pick = kNone;
            double best = -1.0;
            for (std::size_t v = 0; v < n; ++v) {
                if (a[v] != kNone) {
                    continue;
                }
                double link = 0.0;
                for (auto u : members) {
                    link += w[v][u];
                }
                if (link > best) {
                    best = link;
                    pick = v;
                }
            }
            a[pick] = b;
            members.push_back(pick);
            ++placed;
        }
    }
    return a;
}

Assignment random_start(std::size_t n, std::size_t k, std::size_t m,
                        std::mt19937_64 &rng) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    Assignment a(n, 0);
    std::vector<std::size_t> size(k, 0);
    for (auto v : order) {
        std::vector<std::size_t> open;
        for (std::size_t b = 0; b < k; ++b) {
            if (size[b] < m) {
                open.push_back(b);
            }
        }
        std::uniform_int_distribution<std::size_t> pick(0, open.size() - 1);
        const auto b = open[pick(rng)];
        a[v] = b;
        ++size[b];
    }
    return a;
}

bool better(double cut, const Assignment &a, double best_cut,
            const Assignment &best) {
    if (cut < best_cut - kEps) {
        return true;
    }
    return std::abs(cut - best_cut) <= kEps && a < best;
}

const Mat2 kId{1.0, 0.0, 0.0, 1.0};
const Mat2 kProj0{1.0, 0.0, 0.0, 0.0};
const Mat2 kProj1{0.0, 0.0, 0.0, 1.0};

LocalOp unitary(std::string label, const Mat2 &u) {
    return LocalOp{std::move(label), {KrausBranch{u, 1}}};
}

LocalOp signed_z_measure() {
    return LocalOp{"MZ", {KrausBranch{kProj0, 1}, KrausBranch{kProj1, -1}}};
}

LocalOp hadamard_frame(const LocalOp &op) {
    const Mat2 h = gate_matrix(GateKind::H);
    LocalOp out{op.label == "MZ" ? "MX" : "H." + op.label + ".H", {}};
    for (const auto &b : op.branches) {
        out.branches.push_back(KrausBranch{matmul(h, matmul(b.op, h)), b.sign});
    }
    return out;
}

std::vector<QpdTerm> cz_terms() {
    const Mat2 s = gate_matrix(GateKind::RZ, std::numbers::pi / 2.0);
    const Mat2 sdg = gate_matrix(GateKind::RZ, -std::numbers::pi / 2.0);
    const Mat2 z = gate_matrix(GateKind::Z);
    return {
        {0.5, unitary("RZ(+pi/2)", s), unitary("RZ(+pi/2)", s)},
        {0.5, unitary("RZ(-pi/2)", sdg), unitary("RZ(-pi/2)", sdg)},
        {0.5, signed_z_measure(), unitary("I", kId)},
        {-0.5, signed_z_measure(), unitary("Z", z)},
        {0.5, unitary("I", kId), signed_z_measure()},
        {-0.5, unitary("Z", z), signed_z_measure()},
    };
}

} // namespace

// ---------------------------------------------------------------------------

WeightedGraph::WeightedGraph(std::size_t nodes, const std::vector<Edge> &edges)
    : nodes_(nodes) {
    for (const auto &e : edges) {
        add_edge(e.u, e.v, e.weight);
    }
}

void WeightedGraph::add_edge(std::size_t u, std::size_t v, double weight) {
    if (u >= nodes_ || v >= nodes_) {
        throw std::out_of_range("edge endpoint out of range");
    }
    if (u == v) {
        throw std::invalid_argument("self-loop on node " + std::to_string(u));
    }
    if (!(weight >= 0.0) || !std::isfinite(weight)) {
        throw std::invalid_argument("edge weights must be finite and >= 0");
    }
    if (u > v) {
        std::swap(u, v);
    }
    auto it = std::lower_bound(edges_.begin(), edges_.end(), Edge{u, v, 0.0},
                               [](const Edge &x, const Edge &y) {
                                   return std::tie(x.u, x.v) < std::tie(y.u, y.v);
                               });
    if (it != edges_.end() && it->u == u && it->v == v) {
        it->weight += weight;
    } else {
        edges_.insert(it, Edge{u, v, weight});
    }
}

double WeightedGraph::total_weight() const noexcept {
    double s = 0.0;
    for (const auto &e : edges_) {
        s += e.weight;
    }
    return s;
}

std::vector<std::size_t> WeightedGraph::degrees() const {
    std::vector<std::size_t> d(nodes_, 0);
    for (const auto &e : edges_) {
        ++d[e.u];
        ++d[e.v];
    }
    return d;
}

WeightedGraph parse_edge_list(std::string_view text) {
    std::istringstream lines{std::string(text)};
    std::string raw;
    std::vector<Edge> edges;
    std::size_t max_node = 0;
    bool any = false;
    std::size_t line_no = 0;
    std::optional<std::size_t> declared;
    while (std::getline(lines, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) {
            // "# nodes N" declares isolated trailing nodes
            std::istringstream hs(raw.substr(hash + 1));
            std::string word;
            std::size_t count = 0;
            if ((hs >> word >> count) && word == "nodes") {
                declared = count;
            }
            raw.resize(hash);
        }
        std::istringstream is(raw);
        long long u = 0;
        long long v = 0;
        if (!(is >> u)) {
            continue;
        }
        if (!(is >> v) || u < 0 || v < 0) {
            throw std::invalid_argument("line " + std::to_string(line_no) +
                                        ": expected 'u v [weight]'");
        }
        double w = 1.0;
        if (!(is >> w)) {
            w = 1.0;
        }
        edges.push_back(Edge{static_cast<std::size_t>(u),
                             static_cast<std::size_t>(v), w});
        max_node = std::max({max_node, edges.back().u, edges.back().v});
        any = true;
    }
    std::size_t nodes = any ? max_node + 1 : 0;
    if (declared) {
        nodes = std::max(nodes, *declared);
    }
    return WeightedGraph(nodes, edges);
}

std::string format_edge_list(const WeightedGraph &graph) {
    std::ostringstream os;
    os.precision(17);
    os << "# nodes " << graph.num_nodes() << '\n';
    for (const auto &e : graph.edges()) {
        os << e.u << ' ' << e.v << ' ' << e.weight << '\n';
    }
    return os.str();
}

Assignment PartitionPlan::assignment(std::size_t num_nodes) const {
    constexpr auto kNone = std::numeric_limits<std::size_t>::max();
    Assignment a(num_nodes, kNone);
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (auto q : blocks[b]) {
            if (q >= num_nodes || a[q] != kNone) {
                throw std::invalid_argument(
                    "partition blocks are not disjoint or exceed the qubit range");
            }
            a[q] = b;
        }
    }
    if (std::find(a.begin(), a.end(), kNone) != a.end()) {
        throw std::invalid_argument("partition blocks do not cover every qubit");
    }
    return a;
}

WeightedGraph interaction_graph(const Circuit &circuit) {
    WeightedGraph g(circuit.num_qubits());
    for (const auto &gate : circuit.gates()) {
        if (gate.kind == GateKind::CX || gate.kind == GateKind::CZ) {
            g.add_edge(gate.qubits[0], gate.qubits[1], 1.0);
        }
    }
    return g;
}

double cut_value(const WeightedGraph &graph, const Assignment &a) {
    double cut = 0.0;
    for (const auto &e : graph.edges()) {
        if (a[e.u] != a[e.v]) {
            cut += e.weight;
        }
    }
    return cut;
}

PartitionPlan make_plan(const WeightedGraph &graph, const Assignment &a,
                        std::size_t capacity) {
    const auto c = canonical(a);
    PartitionPlan plan;
    plan.capacity = capacity;
    for (std::size_t v = 0; v < c.size(); ++v) {
        if (c[v] >= plan.blocks.size()) {
            plan.blocks.resize(c[v] + 1);
        }
        plan.blocks[c[v]].push_back(v);
    }
    plan.cut_weight = cut_value(graph, c);
    return plan;
}

PartitionPlan kway_min_cut(const WeightedGraph &graph, std::size_t k,
                           std::size_t m, std::uint64_t seed,
                           std::size_t restarts) {
    const std::size_t n = graph.num_nodes();
    check_feasible(n, k, m);
    k = std::min(k, std::max<std::size_t>(n, 1));
    const auto w = dense_weights(graph);
    std::mt19937_64 rng(seed);

    Assignment best;
    double best_cut = std::numeric_limits<double>::infinity();
    auto consider = [&](Assignment a) {
        refine(w, a, k, m);
        a = canonical(a);
        const double cut = cut_value(graph, a);
        if (best.empty() || better(cut, a, best_cut, best)) {
            best = std::move(a);
            best_cut = cut;
        }
    };
    consider(greedy_start(w, k, m));
    for (std::size_t r = 0; r < restarts; ++r) {
        consider(random_start(n, k, m, rng));
    }
    return make_plan(graph, best, m);
}

PartitionPlan brute_force_min_cut(const WeightedGraph &graph, std::size_t k,
                                  std::size_t m) {
    const std::size_t n = graph.num_nodes();
    if (n > 12) {
        throw std::length_error("brute_force_min_cut limited to 12 nodes");
    }
    check_feasible(n, k, m);
    const auto w = dense_weights(graph);

    Assignment cur(n, 0);
    Assignment best;
    double best_cut = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> size(std::min(k, std::max<std::size_t>(n, 1)), 0);

    // Restricted-growth strings in lexicographic order; the first optimum
    // found is the lexicographically smallest.
    auto dfs = [&](auto &&self, std::size_t i, std::size_t used,
                   double partial) -> void {
        if (partial >= best_cut - kEps) {
            return;
        }
        if (i == n) {
            best = cur;
            best_cut = partial;
            return;
        }
        const std::size_t limit = std::min(used + 1, size.size());
        for (std::size_t b = 0; b < limit; ++b) {
            if (size[b] >= m) {
                continue;
            }
            double add = 0.0;
            for (std::size_t j = 0; j < i; ++j) {
                if (cur[j] != b) {
                    add += w[i][j];
                }
            }
            cur[i] = b;
            ++size[b];
            self(self, i + 1, std::max(used, b + 1), partial + add);
            --size[b];
        }
    };
    dfs(dfs, 0, 0, 0.0);
    return make_plan(graph, best, m);
}

PartitionPlan attach_circuit(PartitionPlan plan, const Circuit &circuit) {
    const auto a = plan.assignment(circuit.num_qubits());
    plan.cut_gates.clear();
    plan.cut_kinds.clear();
    plan.cut_weight = 0.0;
    const auto &gates = circuit.gates();
    for (std::size_t pos = 0; pos < gates.size(); ++pos) {
        const auto &g = gates[pos];
        if (g.arity() == 2 && a[g.qubits[0]] != a[g.qubits[1]]) {
            plan.cut_gates.push_back(pos);
            plan.cut_kinds.push_back(g.kind);
            if (g.kind != GateKind::Identity2) {
                plan.cut_weight += 1.0;
            }
        }
    }
    return plan;
}

std::size_t entangling_cuts(const PartitionPlan &plan) {
    return static_cast<std::size_t>(
        std::count_if(plan.cut_kinds.begin(), plan.cut_kinds.end(),
                      [](GateKind k) { return k != GateKind::Identity2; }));
}

double sampling_overhead(const PartitionPlan &plan) {
    return std::pow(9.0, static_cast<double>(entangling_cuts(plan)));
}

PartitionPlan partition_circuit(const Circuit &circuit, std::size_t m,
                                std::size_t k, Partitioner partitioner,
                                std::uint64_t seed) {
    const auto graph = interaction_graph(circuit);
    const std::size_t blocks = k == 0 ? std::max<std::size_t>(circuit.num_qubits(), 1) : k;
    auto plan = partitioner == Partitioner::BruteForce
                    ? brute_force_min_cut(graph, blocks, m)
                    : kway_min_cut(graph, blocks, m, seed);
    return attach_circuit(std::move(plan), circuit);
}

// ---------------------------------------------------------------------------

std::vector<QpdTerm> qpd_terms(GateKind kind) {
    switch (kind) {
    case GateKind::Identity2:
        return {{1.0, unitary("I", kId), unitary("I", kId)}};
    case GateKind::CZ:
        return cz_terms();
    case GateKind::CX: {
        auto terms = cz_terms();
        for (auto &t : terms) {
            t.b = hadamard_frame(t.b);
        }
        return terms;
    }
    default:
        throw std::invalid_argument("qpd_terms: " + std::string(to_string(kind)) +
                                    " cannot be cut (allowed: CX, CZ, IDENTITY2)");
    }
}

double one_norm(const std::vector<QpdTerm> &terms) noexcept {
    double s = 0.0;
    for (const auto &t : terms) {
        s += std::abs(t.coefficient);
    }
    return s;
}

double KnitProgram::one_norm() const noexcept {
    double c = 1.0;
    for (const auto &terms : term_table) {
        c *= knitvqa::one_norm(terms);
    }
    return c;
}

double KnitProgram::sampling_overhead() const noexcept {
    const double c = one_norm();
    return c * c;
}

std::size_t KnitProgram::combination_count() const noexcept {
    std::size_t count = 1;
    for (const auto &terms : term_table) {
        count *= terms.size();
    }
    return count;
}

KnitProgram cut_circuit(const Circuit &circuit, const PartitionPlan &plan) {
    const std::size_t n = circuit.num_qubits();
    const auto a = plan.assignment(n);
    if (plan.capacity > 0) {
        for (const auto &b : plan.blocks) {
            if (b.size() > plan.capacity) {
                throw std::invalid_argument("block of size " +
                                            std::to_string(b.size()) +
                                            " exceeds capacity " +
                                            std::to_string(plan.capacity));
            }
        }
    }

    KnitProgram prog;
    prog.num_qubits = n;
    prog.num_params = circuit.num_params();
    const std::size_t nf = plan.blocks.size();
    std::vector<std::size_t> local(n);
    std::vector<std::vector<Gate>> frag_gates(nf);
    prog.fragments.resize(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        auto qs = plan.blocks[f];
        std::sort(qs.begin(), qs.end());
        for (std::size_t i = 0; i < qs.size(); ++i) {
            local[qs[i]] = i;
        }
        prog.fragments[f].qubits = std::move(qs);
    }

    constexpr auto kNone = std::numeric_limits<std::size_t>::max();
    const auto &gates = circuit.gates();
    prog.gate_home.assign(gates.size(), {kNone, kNone});
    for (std::size_t pos = 0; pos < gates.size(); ++pos) {
        Gate g = gates[pos];
        const auto fa = a[g.qubits[0]];
        if (g.arity() == 2 && a[g.qubits[1]] != fa) {
            const auto fb = a[g.qubits[1]];
            const std::size_t cut = prog.cut_points.size();
            prog.cut_points.push_back(CutPoint{pos, g.kind, fa, fb});
            prog.term_table.push_back(qpd_terms(g.kind));
            prog.fragments[fa].insertions.push_back(
                Insertion{cut, true, frag_gates[fa].size(), local[g.qubits[0]]});
            prog.fragments[fb].insertions.push_back(
                Insertion{cut, false, frag_gates[fb].size(), local[g.qubits[1]]});
            prog.fragments[fa].cuts.push_back(cut);
            if (fb != fa) {
                prog.fragments[fb].cuts.push_back(cut);
            }
            continue;
        }
        for (std::size_t i = 0; i < g.arity(); ++i) {
            g.qubits[i] = local[g.qubits[i]];
        }
        prog.gate_home[pos] = {fa, frag_gates[fa].size()};
        prog.fragments[fa].origin.push_back(pos);
        frag_gates[fa].push_back(g);
    }
    if (!plan.cut_gates.empty()) {
        std::vector<std::size_t> found;
        for (const auto &cp : prog.cut_points) {
            found.push_back(cp.gate_position);
        }
        if (found != plan.cut_gates) {
            throw std::invalid_argument("plan cut_gates do not match the circuit");
        }
    }

    prog.param_map.assign(circuit.num_params(), {});
    for (std::size_t f = 0; f < nf; ++f) {
        auto &frag = prog.fragments[f];
        frag.circuit = Circuit(frag.qubits.size(), std::move(frag_gates[f]),
                               circuit.num_params());
        for (const auto &g : frag.circuit.gates()) {
            if (auto s = g.slot()) {
                auto &fs = prog.param_map[s->index];
                if (fs.empty() || fs.back() != f) {
                    fs.push_back(f);
                }
            }
        }
    }
    return prog;
}

void to_json(nlohmann::json &j, const PartitionPlan &plan) {
    j = nlohmann::json{{"blocks", plan.blocks},
                       {"capacity", plan.capacity},
                       {"cut_weight", plan.cut_weight},
                       {"cut_gates", plan.cut_gates}};
    nlohmann::json kinds = nlohmann::json::array();
    for (auto k : plan.cut_kinds) {
        kinds.push_back(to_string(k));
    }
    j["cut_kinds"] = std::move(kinds);
}

void from_json(const nlohmann::json &j, PartitionPlan &plan) {
    plan.blocks = j.at("blocks").get<std::vector<std::vector<Qubit>>>();
    plan.capacity = j.value("capacity", std::size_t{0});
    plan.cut_weight = j.value("cut_weight", 0.0);
    plan.cut_gates = j.value("cut_gates", std::vector<std::size_t>{});
    plan.cut_kinds.clear();
    if (j.contains("cut_kinds")) {
        for (const auto &k : j.at("cut_kinds")) {
            plan.cut_kinds.push_back(gate_kind_from_string(k.get<std::string>()));
        }
    }
}

nlohmann::json describe(const KnitProgram &program) {
    nlohmann::json j;
    j["num_qubits"] = program.num_qubits;
    j["num_params"] = program.num_params;
    j["one_norm"] = program.one_norm();
    j["sampling_overhead"] = program.sampling_overhead();
    j["combinations"] = program.combination_count();
    j["fragments"] = nlohmann::json::array();
    for (const auto &f : program.fragments) {
        nlohmann::json fj;
        fj["qubits"] = f.qubits;
        fj["circuit"] = f.circuit;
        fj["cuts"] = f.cuts;
        j["fragments"].push_back(std::move(fj));
    }
    j["cut_points"] = nlohmann::json::array();
    for (std::size_t c = 0; c < program.cut_points.size(); ++c) {
        const auto &cp = program.cut_points[c];
        nlohmann::json terms = nlohmann::json::array();
        for (const auto &t : program.term_table[c]) {
            terms.push_back({{"coefficient", t.coefficient},
                             {"a", t.a.label},
                             {"b", t.b.label}});
        }
        j["cut_points"].push_back({{"gate_position", cp.gate_position},
                                   {"kind", to_string(cp.kind)},
                                   {"fragments", {cp.fragment_a, cp.fragment_b}},
                                   {"terms", std::move(terms)}});
    }
    j["param_map"] = program.param_map;
    return j;
}

} // namespace knitvqa
