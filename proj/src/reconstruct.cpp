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

#include "knitvqa/reconstruct.hpp"

#include <cmath>
#include <map>
#include <random>
#include <stdexcept>

namespace knitvqa {

namespace {

struct Branch {
    double sign;
    StateVector psi;
};

const LocalOp &local_op(const KnitProgram &prog, const Insertion &ins,
                        std::size_t term) {
    const auto &t = prog.term_table[ins.cut][term];
    return ins.first_operand ? t.a : t.b;
}

void apply_local(std::vector<Branch> &branches, const LocalOp &op, Qubit q) {
    if (op.branches.size() == 1 && op.branches[0].sign == 1) {
        for (auto &b : branches) {
            b.psi.apply(op.branches[0].op, q);
        }
        return;
    }
    std::vector<Branch> next;
    next.reserve(branches.size() * op.branches.size());
    for (const auto &b : branches) {
        for (const auto &k : op.branches) {
            Branch child{b.sign * k.sign, b.psi};
            child.psi.apply(k.op, q);
            next.push_back(std::move(child));
        }
    }
    branches = std::move(next);
}

void apply_local(DensityMatrix &rho, const LocalOp &op, Qubit q) {
    std::vector<Mat2> kraus;
    std::vector<int> signs;
    for (const auto &k : op.branches) {
        kraus.push_back(k.op);
        signs.push_back(k.sign);
    }
    rho.apply_map(kraus, signs, q);
}

} // namespace

KnitEvaluator::KnitEvaluator(const KnitProgram &program, const Observable &obs,
                             NoisePolicy noise)
    : prog_(program), obs_(obs), noise_(std::move(noise)) {
    if (obs.num_qubits() != prog_.num_qubits) {
        throw std::invalid_argument("observable has " +
                                    std::to_string(obs.num_qubits()) +
                                    " qubits, program has " +
                                    std::to_string(prog_.num_qubits));
    }
    const std::size_t nf = prog_.fragments.size();
    strings_.resize(nf);
    term_slot_.resize(nf);
    stride_.resize(nf);
    for (std::size_t f = 0; f < nf; ++f) {
        const auto &frag = prog_.fragments[f];
        std::map<std::string, std::size_t> index;
        for (const auto &term : obs_.terms()) {
            std::string sub;
            for (auto q : frag.qubits) {
                sub.push_back(term.pauli[q]);
            }
            auto [it, inserted] = index.emplace(sub, strings_[f].size());
            if (inserted) {
                strings_[f].push_back(sub);
            }
            term_slot_[f].push_back(it->second);
        }
        std::size_t stride = 1;
        for (auto c : frag.cuts) {
            stride_[f].push_back(stride);
            stride *= prog_.term_table[c].size();
        }
    }
}

std::size_t KnitEvaluator::variant_count(std::size_t fragment) const {
    std::size_t count = 1;
    for (auto c : prog_.fragments.at(fragment).cuts) {
        count *= prog_.term_table[c].size();
    }
    return count;
}

std::vector<std::size_t> KnitEvaluator::decode(std::size_t fragment,
                                               std::size_t variant) const {
    const auto &cuts = prog_.fragments[fragment].cuts;
    std::vector<std::size_t> terms(prog_.cut_points.size(), 0);
    for (std::size_t j = 0; j < cuts.size(); ++j) {
        const auto radix = prog_.term_table[cuts[j]].size();
        terms[cuts[j]] = (variant / stride_[fragment][j]) % radix;
    }
    return terms;
}

std::size_t KnitEvaluator::variant_of(std::size_t fragment,
                                      const std::vector<std::size_t> &combo) const {
    const auto &cuts = prog_.fragments[fragment].cuts;
    std::size_t v = 0;
    for (std::size_t j = 0; j < cuts.size(); ++j) {
        v += combo[cuts[j]] * stride_[fragment][j];
    }
    return v;
}

std::vector<double> KnitEvaluator::evaluate_variant(std::size_t fragment,
                                                    const BoundCircuit &bound,
                                                    std::size_t variant) const {
    const auto &frag = prog_.fragments.at(fragment);
    if (bound.num_qubits() != frag.qubits.size() ||
        bound.gates().size() != frag.circuit.gates().size()) {
        throw std::invalid_argument("bound circuit does not match fragment " +
                                    std::to_string(fragment));
    }
    const auto terms = decode(fragment, variant);
    const auto &gates = bound.gates();
    const std::size_t width = frag.qubits.size();
    std::vector<double> out(strings_[fragment].size(), 0.0);

    if (noise_) {
        DensityMatrix rho(width);
        const std::vector<int> signs(noise_->kraus.size(), 1);
        std::size_t next = 0;
        for (std::size_t i = 0; i <= gates.size(); ++i) {
            while (next < frag.insertions.size() &&
                   frag.insertions[next].before_gate == i) {
                const auto &ins = frag.insertions[next++];
                apply_local(rho, local_op(prog_, ins, terms[ins.cut]),
                            ins.local_qubit);
            }
            if (i == gates.size()) {
                break;
            }
            rho.apply(gates[i]);
            for (std::size_t k = 0; k < gates[i].arity(); ++k) {
                rho.apply_map(noise_->kraus, signs, gates[i].qubits[k]);
            }
        }
        for (std::size_t u = 0; u < out.size(); ++u) {
            out[u] = rho.pauli_expectation(strings_[fragment][u]).real();
        }
        return out;
    }

    std::vector<Branch> branches;
    branches.push_back(Branch{1.0, StateVector(width)});
    std::size_t next = 0;
    for (std::size_t i = 0; i <= gates.size(); ++i) {
        while (next < frag.insertions.size() &&
               frag.insertions[next].before_gate == i) {
            const auto &ins = frag.insertions[next++];
            apply_local(branches, local_op(prog_, ins, terms[ins.cut]),
                        ins.local_qubit);
        }
        if (i == gates.size()) {
            break;
        }
        for (auto &b : branches) {
            b.psi.apply(gates[i]);
        }
    }
    for (std::size_t u = 0; u < out.size(); ++u) {
        double acc = 0.0;
        for (const auto &b : branches) {
            acc += b.sign * b.psi.pauli_expectation(strings_[fragment][u]).real();
        }
        out[u] = acc;
    }
    return out;
}

FragmentTable KnitEvaluator::evaluate(std::size_t fragment,
                                      const BoundCircuit &bound) const {
    const std::size_t count = variant_count(fragment);
    FragmentTable table;
    table.reserve(count);
    for (std::size_t v = 0; v < count; ++v) {
        table.push_back(evaluate_variant(fragment, bound, v));
    }
    return table;
}

double KnitEvaluator::combination_value(
    const std::vector<const std::vector<double> *> &fragment_values) const {
    double value = 0.0;
    const auto &terms = obs_.terms();
    for (std::size_t t = 0; t < terms.size(); ++t) {
        double prod = terms[t].coefficient;
        for (std::size_t f = 0; f < fragment_values.size(); ++f) {
            prod *= (*fragment_values[f])[term_slot_[f][t]];
        }
        value += prod;
    }
    return value;
}

double KnitEvaluator::combine(const std::vector<const FragmentTable *> &tables) const {
    const std::size_t nf = prog_.fragments.size();
    if (tables.size() != nf) {
        throw std::invalid_argument("combine: one table per fragment required");
    }
    const std::size_t total = prog_.combination_count();
    if (total > kMaxExactCombinations) {
        throw std::length_error("exact reconstruction limited to " +
                                std::to_string(kMaxExactCombinations) +
                                " term combinations; use sampled mode");
    }
    const std::size_t ncuts = prog_.cut_points.size();
    std::vector<std::size_t> combo(ncuts, 0);
    std::vector<const std::vector<double> *> values(nf);
    double sum = 0.0;
    for (std::size_t idx = 0; idx < total; ++idx) {
        double coeff = 1.0;
        for (std::size_t c = 0; c < ncuts; ++c) {
            coeff *= prog_.term_table[c][combo[c]].coefficient;
        }
        for (std::size_t f = 0; f < nf; ++f) {
            values[f] = &(*tables[f])[variant_of(f, combo)];
        }
        sum += coeff * combination_value(values);
        for (std::size_t c = 0; c < ncuts; ++c) {
            if (++combo[c] < prog_.term_table[c].size()) {
                break;
            }
            combo[c] = 0;
        }
    }
    return obs_.offset() + sum;
}

double reconstruct_exact(const KnitProgram &program, const Observable &obs,
                         const std::vector<double> &theta,
                         const NoisePolicy &noise) {
    if (theta.size() != program.num_params) {
        throw std::invalid_argument("theta has " + std::to_string(theta.size()) +
                                    " entries, program expects " +
                                    std::to_string(program.num_params));
    }
    const KnitEvaluator eval(program, obs, noise);
    std::vector<FragmentTable> tables;
    std::vector<const FragmentTable *> ptrs;
    tables.reserve(program.fragments.size());
    for (std::size_t f = 0; f < program.fragments.size(); ++f) {
        tables.push_back(eval.evaluate(f, bind(program.fragments[f].circuit, theta)));
    }
    for (const auto &t : tables) {
        ptrs.push_back(&t);
    }
    return eval.combine(ptrs);
}

SampledEstimate reconstruct_sampled(const KnitProgram &program,
                                    const Observable &obs,
                                    const std::vector<double> &theta,
                                    std::size_t shots, std::uint64_t seed,
                                    const NoisePolicy &noise) {
    if (shots == 0) {
        throw std::invalid_argument("shots must be >= 1");
    }
    if (theta.size() != program.num_params) {
        throw std::invalid_argument("theta length does not match the program");
    }
    const KnitEvaluator eval(program, obs, noise);
    const std::size_t nf = program.fragments.size();
    const std::size_t ncuts = program.cut_points.size();

    std::vector<BoundCircuit> bound;
    for (const auto &f : program.fragments) {
        bound.push_back(bind(f.circuit, theta));
    }
    std::vector<std::map<std::size_t, std::vector<double>>> memo(nf);
    auto fragment_value = [&](std::size_t f, std::size_t variant)
        -> const std::vector<double> & {
        auto it = memo[f].find(variant);
        if (it == memo[f].end()) {
            it = memo[f].emplace(variant, eval.evaluate_variant(f, bound[f], variant))
                     .first;
        }
        return it->second;
    };

    std::vector<std::discrete_distribution<std::size_t>> pick;
    for (const auto &terms : program.term_table) {
        std::vector<double> w;
        for (const auto &t : terms) {
            w.push_back(std::abs(t.coefficient));
        }
        pick.emplace_back(w.begin(), w.end());
    }
    const double norm = program.one_norm();

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> combo(ncuts, 0);
    std::vector<const std::vector<double> *> values(nf);
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t s = 0; s < shots; ++s) {
        double sign = 1.0;
        for (std::size_t c = 0; c < ncuts; ++c) {
            combo[c] = pick[c](rng);
            if (program.term_table[c][combo[c]].coefficient < 0.0) {
                sign = -sign;
            }
        }
        for (std::size_t f = 0; f < nf; ++f) {
            values[f] = &fragment_value(f, eval.variant_of(f, combo));
        }
        const double x = obs.offset() + norm * sign * eval.combination_value(values);
        const double delta = x - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (x - mean);
    }
    SampledEstimate out;
    out.estimate = mean;
    if (shots > 1) {
        out.per_shot_variance = m2 / static_cast<double>(shots - 1);
        out.std_error = std::sqrt(out.per_shot_variance / static_cast<double>(shots));
    }
    return out;
}

} // namespace knitvqa
