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

#include "knitvqa/circuit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace knitvqa {

namespace {

constexpr std::array<std::pair<GateKind, std::string_view>, 11> kGateNames{{
    {GateKind::RX, "RX"},
    {GateKind::RY, "RY"},
    {GateKind::RZ, "RZ"},
    {GateKind::H, "H"},
    {GateKind::X, "X"},
    {GateKind::Y, "Y"},
    {GateKind::Z, "Z"},
    {GateKind::S, "S"},
    {GateKind::CX, "CX"},
    {GateKind::CZ, "CZ"},
    {GateKind::Identity2, "IDENTITY2"},
}};

void validate_gate(const Gate &g, std::size_t n, std::size_t num_params) {
    for (std::size_t i = 0; i < g.arity(); ++i) {
        if (g.qubits[i] >= n) {
            throw std::out_of_range("gate " + std::string(to_string(g.kind)) +
                                    " uses qubit " +
                                    std::to_string(g.qubits[i]) +
                                    " on a " + std::to_string(n) +
                                    "-qubit circuit");
        }
    }
    if (g.arity() == 2 && g.qubits[0] == g.qubits[1]) {
        throw std::invalid_argument("two-qubit gate on identical qubits");
    }
    if (is_rotation(g.kind) != g.angle.has_value()) {
        throw std::invalid_argument(
            "rotation gates carry exactly one angle, other kinds none");
    }
    if (auto s = g.slot(); s && s->index >= num_params) {
        throw std::out_of_range("parameter slot " + std::to_string(s->index) +
                                " >= num_params " +
                                std::to_string(num_params));
    }
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

} // namespace

bool is_rotation(GateKind kind) noexcept {
    return kind == GateKind::RX || kind == GateKind::RY || kind == GateKind::RZ;
}

bool is_two_qubit(GateKind kind) noexcept {
    return kind == GateKind::CX || kind == GateKind::CZ ||
           kind == GateKind::Identity2;
}

std::string_view to_string(GateKind kind) noexcept {
    for (const auto &[k, name] : kGateNames) {
        if (k == kind) {
            return name;
        }
    }
    return "?";
}

GateKind gate_kind_from_string(std::string_view name) {
    for (const auto &[k, n] : kGateNames) {
        if (n == name) {
            return k;
        }
    }
    throw std::invalid_argument("unknown gate kind '" + std::string(name) +
                                "'");
}

Gate Gate::rotation(GateKind kind, Qubit q, Angle angle) {
    if (!is_rotation(kind)) {
        throw std::invalid_argument("not a rotation kind");
    }
    return Gate{kind, {q, 0}, angle};
}

Gate Gate::single(GateKind kind, Qubit q) {
    if (is_rotation(kind) || is_two_qubit(kind)) {
        throw std::invalid_argument("not a fixed single-qubit kind");
    }
    return Gate{kind, {q, 0}, std::nullopt};
}

Gate Gate::two(GateKind kind, Qubit a, Qubit b) {
    if (!is_two_qubit(kind)) {
        throw std::invalid_argument("not a two-qubit kind");
    }
    return Gate{kind, {a, b}, std::nullopt};
}

std::optional<Slot> Gate::slot() const noexcept {
    if (angle) {
        if (const auto *s = std::get_if<Slot>(&*angle)) {
            return *s;
        }
    }
    return std::nullopt;
}

Circuit::Circuit(std::size_t num_qubits, std::vector<Gate> gates,
                 std::size_t num_params)
    : n_(num_qubits), gates_(std::move(gates)), params_(num_params) {
    for (const auto &g : gates_) {
        validate_gate(g, n_, params_);
    }
}

BoundCircuit::BoundCircuit(std::size_t num_qubits, std::vector<BoundGate> gates)
    : n_(num_qubits), gates_(std::move(gates)) {
    for (const auto &g : gates_) {
        for (std::size_t i = 0; i < g.arity(); ++i) {
            if (g.qubits[i] >= n_) {
                throw std::out_of_range("bound gate qubit out of range");
            }
        }
    }
}

BoundCircuit BindFn::operator()(const Circuit &circuit,
                                const std::vector<double> &theta) const {
    if (theta.size() != circuit.num_params()) {
        throw std::invalid_argument(
            "bind: theta has " + std::to_string(theta.size()) +
            " entries, circuit has " + std::to_string(circuit.num_params()) +
            " slots");
    }
    std::vector<BoundGate> out;
    out.reserve(circuit.gates().size());
    for (const auto &g : circuit.gates()) {
        double angle = 0.0;
        if (g.angle) {
            angle = std::visit(
                [&](const auto &a) -> double {
                    if constexpr (std::is_same_v<std::decay_t<decltype(a)>,
                                                 Slot>) {
                        return a.scale * theta[a.index];
                    } else {
                        return a;
                    }
                },
                *g.angle);
        }
        out.push_back(BoundGate{g.kind, g.qubits, angle});
    }
    return BoundCircuit(circuit.num_qubits(), std::move(out));
}

ParameterTable parameter_table(const Circuit &circuit) {
    ParameterTable table(circuit.num_params());
    for (std::size_t pos = 0; pos < circuit.gates().size(); ++pos) {
        if (auto s = circuit.gates()[pos].slot()) {
            table[s->index].push_back(pos);
        }
    }
    return table;
}

std::string AnsatzSpec::key() const {
    std::ostringstream os;
    for (const auto &layer : layers) {
        os << '[';
        for (auto k : layer.singles) {
            os << to_string(k) << ',';
        }
        os << '|';
        for (const auto &p : layer.placements) {
            os << to_string(p.kind) << '(' << p.a << ',' << p.b << ')';
        }
        os << ']';
    }
    return os.str();
}

Circuit build_ansatz(const AnsatzSpec &spec, std::size_t n) {
    if (spec.layers.empty()) {
        throw std::invalid_argument("build_ansatz: empty layer list");
    }
    std::vector<Gate> gates;
    std::size_t slot = 0;
    for (const auto &layer : spec.layers) {
        if (layer.singles.size() > n) {
            throw std::out_of_range("build_ansatz: single-qubit row wider "
                                    "than the register");
        }
        for (std::size_t q = 0; q < layer.singles.size(); ++q) {
            const auto kind = layer.singles[q];
            if (is_rotation(kind)) {
                gates.push_back(Gate::rotation(kind, q, Slot{slot++}));
            } else {
                gates.push_back(Gate::single(kind, q));
            }
        }
        for (const auto &p : layer.placements) {
            if (p.a >= n || p.b >= n) {
                throw std::out_of_range("build_ansatz: placement qubit out "
                                        "of range");
            }
            gates.push_back(Gate::two(p.kind, p.a, p.b));
        }
    }
    return Circuit(n, std::move(gates), slot);
}

Observable::Observable(std::size_t num_qubits, std::vector<PauliTerm> terms,
                       double offset)
    : n_(num_qubits), offset_(offset) {
    if (!std::isfinite(offset)) {
        throw std::invalid_argument("observable offset must be finite");
    }
    std::unordered_map<std::string, std::size_t> seen;
    for (auto &t : terms) {
        if (t.pauli.size() != n_) {
            throw std::invalid_argument("pauli string '" + t.pauli +
                                        "' has length " +
                                        std::to_string(t.pauli.size()) +
                                        ", expected " + std::to_string(n_));
        }
        if (t.pauli.find_first_not_of("IXYZ") != std::string::npos) {
            throw std::invalid_argument("pauli string '" + t.pauli +
                                        "' has letters outside IXYZ");
        }
        if (!std::isfinite(t.coefficient)) {
            throw std::invalid_argument("non-finite coefficient");
        }
        auto [it, inserted] = seen.emplace(t.pauli, terms_.size());
        if (inserted) {
            terms_.push_back(std::move(t));
        } else {
            terms_[it->second].coefficient += t.coefficient;
        }
    }
}

Observable parse_observable(std::string_view text) {
    std::vector<PauliTerm> terms;
    std::optional<std::size_t> width;
    std::istringstream lines{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(lines, raw)) {
        ++line_no;
        if (auto hash = raw.find('#'); hash != std::string::npos) {
            raw.resize(hash);
        }
        const auto body = trim(raw);
        if (body.empty()) {
            continue;
        }
        const auto where = "line " + std::to_string(line_no) + ": ";
        std::istringstream is(body);
        std::string coeff_text;
        std::string pauli;
        std::string extra;
        is >> coeff_text >> pauli;
        if (pauli.empty() || (is >> extra)) {
            throw std::invalid_argument(where +
                                        "expected '<coefficient> <pauli>'");
        }
        double coeff = 0.0;
        const auto *first = coeff_text.data();
        const auto *last = first + coeff_text.size();
        if (*first == '+') {
            ++first;
        }
        if (auto [ptr, ec] = std::from_chars(first, last, coeff);
            ec != std::errc{} || ptr != last) {
            throw std::invalid_argument(where + "bad coefficient '" +
                                        coeff_text + "'");
        }
        if (pauli.find_first_not_of("IXYZ") != std::string::npos) {
            throw std::invalid_argument(where + "bad pauli string '" + pauli +
                                        "'");
        }
        if (width && *width != pauli.size()) {
            throw std::invalid_argument(
                where + "inconsistent pauli string length " +
                std::to_string(pauli.size()) + " (expected " +
                std::to_string(*width) + ")");
        }
        width = pauli.size();
        terms.push_back(PauliTerm{coeff, std::move(pauli)});
    }
    if (!width) {
        throw std::invalid_argument("observable has no terms");
    }
    return Observable(*width, std::move(terms));
}

std::string format_observable(const Observable &obs) {
    std::ostringstream os;
    os.precision(17);
    if (obs.offset() != 0.0) {
        os << obs.offset() << ' ' << std::string(obs.num_qubits(), 'I')
           << '\n';
    }
    for (const auto &t : obs.terms()) {
        os << t.coefficient << ' ' << t.pauli << '\n';
    }
    return os.str();
}

void to_json(nlohmann::json &j, const Gate &gate) {
    j = nlohmann::json{{"kind", to_string(gate.kind)}};
    if (gate.arity() == 2) {
        j["qubits"] = {gate.qubits[0], gate.qubits[1]};
    } else {
        j["qubits"] = {gate.qubits[0]};
    }
    if (gate.angle) {
        if (const auto *s = std::get_if<Slot>(&*gate.angle)) {
            j["slot"] = s->index;
            if (s->scale != 1.0) {
                j["scale"] = s->scale;
            }
        } else {
            j["angle"] = std::get<double>(*gate.angle);
        }
    }
}

void from_json(const nlohmann::json &j, Gate &gate) {
    gate.kind = gate_kind_from_string(j.at("kind").get<std::string>());
    const auto qubits = j.at("qubits").get<std::vector<Qubit>>();
    const std::size_t want = is_two_qubit(gate.kind) ? 2 : 1;
    if (qubits.size() != want) {
        throw std::invalid_argument("gate " + std::string(to_string(gate.kind)) +
                                    " expects " + std::to_string(want) +
                                    " qubits");
    }
    gate.qubits = {qubits[0], want == 2 ? qubits[1] : 0};
    gate.angle.reset();
    if (j.contains("slot")) {
        gate.angle = Slot{j.at("slot").get<std::size_t>(),
                          j.value("scale", 1.0)};
    } else if (j.contains("angle")) {
        gate.angle = j.at("angle").get<double>();
    }
}

void to_json(nlohmann::json &j, const Circuit &circuit) {
    j = nlohmann::json{{"n", circuit.num_qubits()},
                       {"num_params", circuit.num_params()},
                       {"gates", circuit.gates()}};
}

void from_json(const nlohmann::json &j, Circuit &circuit) {
    auto gates = j.at("gates").get<std::vector<Gate>>();
    std::size_t params = 0;
    for (const auto &g : gates) {
        if (auto s = g.slot()) {
            params = std::max(params, s->index + 1);
        }
    }
    params = j.value("num_params", params);
    circuit = Circuit(j.at("n").get<std::size_t>(), std::move(gates), params);
}

void to_json(nlohmann::json &j, const AnsatzSpec &spec) {
    j = nlohmann::json::array();
    for (const auto &layer : spec.layers) {
        nlohmann::json l;
        l["singles"] = nlohmann::json::array();
        for (auto k : layer.singles) {
            l["singles"].push_back(to_string(k));
        }
        l["placements"] = nlohmann::json::array();
        for (const auto &p : layer.placements) {
            l["placements"].push_back({to_string(p.kind), p.a, p.b});
        }
        j.push_back(std::move(l));
    }
}

void from_json(const nlohmann::json &j, AnsatzSpec &spec) {
    spec.layers.clear();
    for (const auto &l : j) {
        AnsatzLayer layer;
        for (const auto &k : l.at("singles")) {
            layer.singles.push_back(gate_kind_from_string(k.get<std::string>()));
        }
        for (const auto &p : l.at("placements")) {
            layer.placements.push_back(
                Placement{gate_kind_from_string(p.at(0).get<std::string>()),
                          p.at(1).get<Qubit>(), p.at(2).get<Qubit>()});
        }
        spec.layers.push_back(std::move(layer));
    }
}

} // namespace knitvqa
