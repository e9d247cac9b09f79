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

#ifndef WAVETRUNK_NDGRAD_LOSSES_H_
#define WAVETRUNK_NDGRAD_LOSSES_H_

#include <cstddef>
#include <span>
#include <vector>

#include "wavetrunk/ndgrad/array.h"

namespace wavetrunk::ndgrad {

// Mean over the batch of -log softmax(logits)[label]. logits is [B, C].
template <typename T>
Array<T> softmax_cross_entropy(const Array<T>& logits,
                               std::span<const std::size_t> labels);

// Row-wise softmax of [B, C] logits, max-subtracted. Not differentiable.
template <typename T>
std::vector<T> softmax(const Array<T>& logits);

// Mean of (pred - target)^2 over all elements.
template <typename T>
Array<T> mse_loss(const Array<T>& pred, const Array<T>& target);

// Mean of 0.5 d^2 for |d| < 1, |d| - 0.5 otherwise, d = pred - target.
template <typename T>
Array<T> smooth_l1_loss(const Array<T>& pred, const Array<T>& target);

// Per-element smooth-L1 value.
template <typename T>
T smooth_l1(T d);

}  // namespace wavetrunk::ndgrad

#endif  // WAVETRUNK_NDGRAD_LOSSES_H_
