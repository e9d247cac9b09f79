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


#include "wavetrunk/metrics/metrics.h"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace wavetrunk::metrics {
namespace {

void check_inputs(std::size_t logits_size, std::size_t classes,
                  std::span<const std::size_t> labels, const char* op) {
  if (classes == 0) throw std::invalid_argument(std::string(op) + ": zero classes");
  if (labels.empty()) throw std::invalid_argument(std::string(op) + ": no examples");
  if (logits_size != labels.size() * classes) {
    throw std::invalid_argument(std::string(op) + ": " + std::to_string(logits_size) +
                                " logits do not form " + std::to_string(labels.size()) +
                                " rows of " + std::to_string(classes));
  }
  for (std::size_t y : labels) {
    if (y >= classes) {
      throw std::invalid_argument(std::string(op) + ": label " + std::to_string(y) +
                                  " out of range for " + std::to_string(classes) +
                                  " classes");
    }
  }
}

template <typename T>
std::size_t logit_classes(const ndgrad::Array<T>& logits) {
  if (logits.rank() != 2) {
    throw std::invalid_argument("metrics: logits must be [B,C], got " +
                                ndgrad::shape_string(logits.shape()));
  }
  return logits.dim(1);
}

template <typename T>
double mean_reciprocal_rank_at_3(std::span<const T> logits, std::size_t classes,
                                 std::span<const std::size_t> labels) {
  double sum = 0.0;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    const std::size_t r = label_rank(logits.subspan(b * classes, classes), labels[b]);
    if (r <= 3) sum += 1.0 / static_cast<double>(r);
  }
  return sum / static_cast<double>(labels.size());
}

}  // namespace

template <typename T>
std::size_t label_rank(std::span<const T> row, std::size_t label) {
  const T target = row[label];
  std::size_t rank = 1;
  for (std::size_t j = 0; j < row.size(); ++j) {
    if (row[j] > target || (row[j] == target && j < label)) ++rank;
  }
  return rank;
}

template <typename T>
double top_k_accuracy(std::span<const T> logits, std::size_t classes,
                      std::span<const std::size_t> labels, std::size_t k) {
  check_inputs(logits.size(), classes, labels, "top_k_accuracy");
  if (k == 0 || k > classes) {
    throw std::invalid_argument("top_k_accuracy: k=" + std::to_string(k) +
                                " must be in [1, " + std::to_string(classes) + "]");
  }
  std::size_t hits = 0;
  for (std::size_t b = 0; b < labels.size(); ++b) {
    if (label_rank(logits.subspan(b * classes, classes), labels[b]) <= k) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

template <typename T>
double map_at_3(std::span<const T> logits, std::size_t classes,
                std::span<const std::size_t> labels) {
  check_inputs(logits.size(), classes, labels, "map_at_3");
  if (classes < 3) {
    throw std::invalid_argument("map_at_3: needs at least 3 classes, got " +
                                std::to_string(classes));
  }
  return mean_reciprocal_rank_at_3(logits, classes, labels);
}

template <typename T>
double top_k_accuracy(const ndgrad::Array<T>& logits,
                      std::span<const std::size_t> labels, std::size_t k) {
  return top_k_accuracy(logits.data(), logit_classes(logits), labels, k);
}

template <typename T>
double map_at_3(const ndgrad::Array<T>& logits,
                std::span<const std::size_t> labels) {
  return map_at_3(logits.data(), logit_classes(logits), labels);
}

template <typename T>
EvalResult evaluate_logits(std::string task, std::span<const T> logits,
                           std::size_t classes,
                           std::span<const std::size_t> labels) {
  check_inputs(logits.size(), classes, labels, "evaluate_logits");
  EvalResult r;
  r.task = std::move(task);
  r.num_examples = labels.size();
  r.top1 = top_k_accuracy(logits, classes, labels, 1);
  r.top5 = top_k_accuracy(logits, classes, labels, std::min<std::size_t>(5, classes));
  r.map_at_3 = mean_reciprocal_rank_at_3(logits, classes, labels);
  return r;
}

void write_eval_csv(std::ostream& out, const std::vector<EvalResult>& results) {
  out << "task,map_at_3,top1,top5,num_examples\n";
  char buf[128];
  for (const auto& r : results) {
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.6f,%zu\n", r.map_at_3, r.top1,
                  r.top5, r.num_examples);
    out << r.task << buf;
  }
}

std::string format_eval_table(const std::vector<EvalResult>& results) {
  std::size_t width = 4;
  for (const auto& r : results) width = std::max(width, r.task.size());
  const int w = static_cast<int>(width);
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-*s  %8s  %8s  %8s  %8s\n", w, "task", "MAP@3",
                "top-1", "top-5", "examples");
  std::string out = buf;
  for (const auto& r : results) {
    std::snprintf(buf, sizeof(buf), "%-*s  %8.4f  %7.2f%%  %7.2f%%  %8zu\n", w,
                  r.task.c_str(), r.map_at_3, 100.0 * r.top1, 100.0 * r.top5,
                  r.num_examples);
    out += buf;
  }
  return out;
}

#define WAVETRUNK_INSTANTIATE_METRICS(T)                                        \
  template std::size_t label_rank(std::span<const T>, std::size_t);             \
  template double top_k_accuracy(std::span<const T>, std::size_t,               \
                                 std::span<const std::size_t>, std::size_t);    \
  template double map_at_3(std::span<const T>, std::size_t,                     \
                           std::span<const std::size_t>);                       \
  template double top_k_accuracy(const ndgrad::Array<T>&,                       \
                                 std::span<const std::size_t>, std::size_t);    \
  template double map_at_3(const ndgrad::Array<T>&,                             \
                           std::span<const std::size_t>);                       \
  template EvalResult evaluate_logits(std::string, std::span<const T>,          \
                                      std::size_t, std::span<const std::size_t>);

WAVETRUNK_INSTANTIATE_METRICS(float)
WAVETRUNK_INSTANTIATE_METRICS(double)

#undef WAVETRUNK_INSTANTIATE_METRICS

}  // namespace wavetrunk::metrics
