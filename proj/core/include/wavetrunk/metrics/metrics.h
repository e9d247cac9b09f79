// Copyright 2026 The WaveTrunk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Rank-based classification metrics. Ties between logits are broken by the
// lower class index, so results are exact and reproducible.

#ifndef WAVETRUNK_METRICS_METRICS_H_
#define WAVETRUNK_METRICS_METRICS_H_

#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "wavetrunk/ndgrad/array.h"

namespace wavetrunk::metrics {

// 1-based rank of `label` within one row of logits.
template <typename T>
std::size_t label_rank(std::span<const T> row, std::size_t label);

// `logits` is row-major [labels.size(), classes].
template <typename T>
double top_k_accuracy(std::span<const T> logits, std::size_t classes,
                      std::span<const std::size_t> labels, std::size_t k);

// Mean of 1/rank when rank <= 3, else 0. Requires classes >= 3.
template <typename T>
double map_at_3(std::span<const T> logits, std::size_t classes,
                std::span<const std::size_t> labels);

template <typename T>
double top_k_accuracy(const ndgrad::Array<T>& logits,
                      std::span<const std::size_t> labels, std::size_t k);
template <typename T>
double map_at_3(const ndgrad::Array<T>& logits,
                std::span<const std::size_t> labels);

struct EvalResult {
  std::string task;
  double map_at_3 = 0.0;
  double top1 = 0.0;
  double top5 = 0.0;
  std::size_t num_examples = 0;
};

// Top-5 uses min(5, classes); MAP@3 with fewer than 3 classes scores the
// ranks that exist.
template <typename T>
EvalResult evaluate_logits(std::string task, std::span<const T> logits,
                           std::size_t classes,
                           std::span<const std::size_t> labels);

// CSV with header `task,map_at_3,top1,top5,num_examples`.
void write_eval_csv(std::ostream& out, const std::vector<EvalResult>& results);
// Aligned plain-text table for terminals.
std::string format_eval_table(const std::vector<EvalResult>& results);

}  // namespace wavetrunk::metrics

#endif  // WAVETRUNK_METRICS_METRICS_H_
