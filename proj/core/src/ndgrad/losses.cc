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

#include "wavetrunk/ndgrad/losses.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "wavetrunk/ndgrad/tape.h"

namespace wavetrunk::ndgrad {
namespace {

template <typename T>
void require_same_shape(const Array<T>& a, const Array<T>& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                shape_string(a.shape()) + " vs " +
                                shape_string(b.shape()));
  }
}

}  // namespace

template <typename T>
std::vector<T> softmax(const Array<T>& logits) {
  if (logits.rank() != 2) {
    throw std::invalid_argument("softmax: logits must be [B,C], got " +
                                shape_string(logits.shape()));
  }
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  std::vector<T> probs(batch * classes);
  auto z = logits.data();
  for (std::size_t b = 0; b < batch; ++b) {
    const T* row = z.data() + b * classes;
    T* p = probs.data() + b * classes;
    const T peak = *std::max_element(row, row + classes);
    T total = 0;
    for (std::size_t c = 0; c < classes; ++c) {
      p[c] = std::exp(row[c] - peak);
      total += p[c];
    }
    for (std::size_t c = 0; c < classes; ++c) p[c] /= total;
  }
  return probs;
}

template <typename T>
Array<T> softmax_cross_entropy(const Array<T>& logits,
                               std::span<const std::size_t> labels) {
  if (logits.rank() != 2) {
    throw std::invalid_argument(
        "softmax_cross_entropy: logits must be [B,C], got " +
        shape_string(logits.shape()));
  }
  const std::size_t batch = logits.dim(0), classes = logits.dim(1);
  if (labels.size() != batch) {
    throw std::invalid_argument("softmax_cross_entropy: " +
                                std::to_string(labels.size()) +
                                " labels for a batch of " +
                                std::to_string(batch));
  }
  for (std::size_t label : labels) {
    if (label >= classes) {
      throw std::invalid_argument("softmax_cross_entropy: label " +
                                  std::to_string(label) + " out of range for " +
                                  std::to_string(classes) + " classes");
    }
  }
  auto z = logits.data();
  double total = 0.0;
  for (std::size_t b = 0; b < batch; ++b) {
    const T* row = z.data() + b * classes;
    const T peak = *std::max_element(row, row + classes);
    double sum = 0.0;
    for (std::size_t c = 0; c < classes; ++c) sum += std::exp(row[c] - peak);
    // -log softmax = log(sum exp(z - peak)) - (z_label - peak)
    total += std::log(sum) - static_cast<double>(row[labels[b]] - peak);
  }
  Array<T> out = Array<T>::scalar(static_cast<T>(total / static_cast<double>(batch)));
  if (should_record<T>({&logits})) {
    std::vector<std::size_t> label_copy(labels.begin(), labels.end());
    Tape<T>::current()->record(
        out, [logits, out, label_copy = std::move(label_copy), batch,
              classes]() mutable {
          const T g = out.grad()[0] / static_cast<T>(batch);
          std::vector<T> probs = softmax(logits);
          auto dz = logits.grad_buffer();
          for (std::size_t b = 0; b < batch; ++b) {
            for (std::size_t c = 0; c < classes; ++c) {
              const T onehot = c == label_copy[b] ? T(1) : T(0);
              dz[b * classes + c] += g * (probs[b * classes + c] - onehot);
            }
          }
        });
  }
  return out;
}

template <typename T>
Array<T> mse_loss(const Array<T>& pred, const Array<T>& target) {
  require_same_shape(pred, target, "mse_loss");
  const std::size_t n = pred.size();
  auto p = pred.data();
  auto y = target.data();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(p[i]) - static_cast<double>(y[i]);
    total += d * d;
  }
  Array<T> out = Array<T>::scalar(static_cast<T>(total / static_cast<double>(n)));
  if (should_record<T>({&pred, &target})) {
    Tape<T>::current()->record(out, [pred, target, out, n]() mutable {
      const T g = out.grad()[0] * T(2) / static_cast<T>(n);
      auto p = pred.data();
      auto y = target.data();
      if (pred.requires_grad()) {
        auto dp = pred.grad_buffer();
        for (std::size_t i = 0; i < n; ++i) dp[i] += g * (p[i] - y[i]);
      }
      if (target.requires_grad()) {
        auto dy = target.grad_buffer();
        for (std::size_t i = 0; i < n; ++i) dy[i] -= g * (p[i] - y[i]);
      }
    });
  }
  return out;
}

template <typename T>
T smooth_l1(T d) {
  const T a = std::abs(d);
  return a < T(1) ? T(0.5) * d * d : a - T(0.5);
}

template <typename T>
Array<T> smooth_l1_loss(const Array<T>& pred, const Array<T>& target) {
  require_same_shape(pred, target, "smooth_l1_loss");
  const std::size_t n = pred.size();
  auto p = pred.data();
  auto y = target.data();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += smooth_l1(p[i] - y[i]);
  Array<T> out = Array<T>::scalar(static_cast<T>(total / static_cast<double>(n)));
  if (should_record<T>({&pred, &target})) {
    Tape<T>::current()->record(out, [pred, target, out, n]() mutable {
      const T g = out.grad()[0] / static_cast<T>(n);
      auto p = pred.data();
      auto y = target.data();
      auto slope = [](T d) { return std::abs(d) < T(1) ? d : (d > 0 ? T(1) : T(-1)); };
      if (pred.requires_grad()) {
        auto dp = pred.grad_buffer();
        for (std::size_t i = 0; i < n; ++i) dp[i] += g * slope(p[i] - y[i]);
      }
      if (target.requires_grad()) {
        auto dy = target.grad_buffer();
        for (std::size_t i = 0; i < n; ++i) dy[i] -= g * slope(p[i] - y[i]);
      }
    });
  }
  return out;
}

#define WAVETRUNK_INSTANTIATE_LOSSES(T)                                        \
  template Array<T> softmax_cross_entropy(const Array<T>&,                     \
                                          std::span<const std::size_t>);       \
  template std::vector<T> softmax(const Array<T>&);                            \
  template Array<T> mse_loss(const Array<T>&, const Array<T>&);                \
  template Array<T> smooth_l1_loss(const Array<T>&, const Array<T>&);          \
  template T smooth_l1(T);

WAVETRUNK_INSTANTIATE_LOSSES(float)
WAVETRUNK_INSTANTIATE_LOSSES(double)

#undef WAVETRUNK_INSTANTIATE_LOSSES

}  // namespace wavetrunk::ndgrad
