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

#include "knitvqa/knitting.hpp"
#include "knitvqa/simulator.hpp"

namespace knitvqa {

/// Sub-expectations of one fragment: [variant][restricted pauli string].
/// A variant fixes one QPD term for every cut touching the fragment.
using FragmentTable = std::vector<std::vector<double>>;

/// Evaluates fragments of a knit program against an observable and sums the
/// signed term combinations. Stateless after construction; safe to share
/// across threads.
class KnitEvaluator {
  public:
    static constexpr std::size_t kMaxExactCombinations = 46656; // 6^6

    KnitEvaluator(const KnitProgram &program, const Observable &obs,
                  NoisePolicy noise = std::nullopt);

    [[nodiscard]] const KnitProgram &program() const noexcept { return prog_; }
    [[nodiscard]] std::size_t variant_count(std::size_t fragment) const;

    /// Full table for the fragment's bound circuit.
    [[nodiscard]] FragmentTable evaluate(std::size_t fragment,
                                         const BoundCircuit &bound) const;
    [[nodiscard]] std::vector<double>
    evaluate_variant(std::size_t fragment, const BoundCircuit &bound,
                     std::size_t variant) const;

    /// Exact signed sum over every term combination. `tables[f]` must be the
    /// full table of fragment f.
    [[nodiscard]] double combine(const std::vector<const FragmentTable *> &tables) const;

    /// Variant index of fragment f under a full combination (one term index
    /// per cut).
    [[nodiscard]] std::size_t variant_of(std::size_t fragment,
                                         const std::vector<std::size_t> &combo) const;

    /// Observable value of one combination, without the coefficient product.
    [[nodiscard]] double combination_value(
        const std::vector<const std::vector<double> *> &fragment_values) const;

  private:
    KnitProgram prog_;
    Observable obs_;
    NoisePolicy noise_;
    std::vector<std::vector<std::string>> strings_;   // [fragment][unique]
    std::vector<std::vector<std::size_t>> term_slot_; // [fragment][term]
    std::vector<std::vector<std::size_t>> stride_;    // [fragment][local cut]

    [[nodiscard]] std::vector<std::size_t>
    decode(std::size_t fragment, std::size_t variant) const;
};

[[nodiscard]] double reconstruct_exact(const KnitProgram &program,
                                       const Observable &obs,
                                       const std::vector<double> &theta,
                                       const NoisePolicy &noise = std::nullopt);

struct SampledEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    double per_shot_variance = 0.0;
};

/// Monte Carlo over term combinations: each shot draws one term per cut with
/// probability |p|/sum|p| and records C * prod(sign) * value.
[[nodiscard]] SampledEstimate reconstruct_sampled(const KnitProgram &program,
                                                  const Observable &obs,
                                                  const std::vector<double> &theta,
                                                  std::size_t shots,
                                                  std::uint64_t seed,
                                                  const NoisePolicy &noise = std::nullopt);

} // namespace knitvqa
