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

#include "wavetrunk/ndgrad/array.h"

#include <algorithm>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace wavetrunk::ndgrad {

std::size_t shape_size(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

template <typename T>
Array<T>::Array(Shape shape, bool requires_grad)
    : impl_(std::make_shared<Impl>()) {
  for (std::size_t d : shape) {
    if (d == 0) {
      throw std::invalid_argument("array dimensions must be positive, got " +
                                  shape_string(shape));
    }
  }
  impl_->data.assign(shape_size(shape), T{0});
  impl_->shape = std::move(shape);
  impl_->requires_grad = requires_grad;
}

template <typename T>
Array<T>::Array(Shape shape, std::vector<T> values, bool requires_grad)
    : impl_(std::make_shared<Impl>()) {
  for (std::size_t d : shape) {
    if (d == 0) {
      throw std::invalid_argument("array dimensions must be positive, got " +
                                  shape_string(shape));
    }
  }
  if (shape_size(shape) != values.size()) {
    throw std::invalid_argument("shape " + shape_string(shape) + " needs " +
                                std::to_string(shape_size(shape)) +
                                " values, got " +
                                std::to_string(values.size()));
  }
  impl_->shape = std::move(shape);
  impl_->data.assign(values.begin(), values.end());
  impl_->requires_grad = requires_grad;
}

template <typename T>
Array<T> Array<T>::scalar(T value, bool requires_grad) {
  return Array(Shape{1}, std::vector<T>{value}, requires_grad);
}

template <typename T>
Array<T> Array<T>::full(Shape shape, T value, bool requires_grad) {
  Array out(std::move(shape), requires_grad);
  std::fill(out.impl_->data.begin(), out.impl_->data.end(), value);
  return out;
}

template <typename T>
const Shape& Array<T>::shape() const {
  static const Shape kEmpty;
  return impl_ ? impl_->shape : kEmpty;
}

template <typename T>
std::size_t Array<T>::dim(std::size_t axis) const {
  if (axis >= rank()) {
    throw std::out_of_range("axis " + std::to_string(axis) +
                            " out of range for shape " +
                            shape_string(shape()));
  }
  return impl_->shape[axis];
}

template <typename T>
std::size_t Array<T>::size() const {
  return impl_ ? impl_->data.size() : 0;
}

template <typename T>
std::span<T> Array<T>::data() {
  if (!impl_) return {};
  return impl_->data;
}

template <typename T>
std::span<const T> Array<T>::data() const {
  if (!impl_) return {};
  return impl_->data;
}

template <typename T>
T Array<T>::item() const {
  if (size() != 1) {
    throw std::invalid_argument("item() needs a single-element array, got " +
                                shape_string(shape()));
  }
  return impl_->data[0];
}

template <typename T>
bool Array<T>::requires_grad() const {
  return impl_ && impl_->requires_grad;
}

template <typename T>
void Array<T>::set_requires_grad(bool value) {
  if (!impl_) throw std::logic_error("set_requires_grad on empty array");
  impl_->requires_grad = value;
}

template <typename T>
bool Array<T>::is_leaf() const {
  return !impl_ || impl_->leaf;
}

template <typename T>
bool Array<T>::has_grad() const {
  return impl_ && !impl_->grad.empty();
}

template <typename T>
std::span<const T> Array<T>::grad() const {
  if (!impl_) return {};
  return impl_->grad;
}

template <typename T>
std::span<T> Array<T>::grad_buffer() const {
  if (!impl_) throw std::logic_error("grad_buffer on empty array");
  if (impl_->grad.empty()) impl_->grad.assign(impl_->data.size(), T{0});
  return impl_->grad;
}

template <typename T>
void Array<T>::zero_grad() {
  if (impl_ && !impl_->grad.empty()) {
    std::fill(impl_->grad.begin(), impl_->grad.end(), T{0});
  }
}

template <typename T>
void Array<T>::release_grad() {
  if (impl_) {
    impl_->grad.clear();
    impl_->grad.shrink_to_fit();
  }
}

template <typename T>
Array<T> Array<T>::clone() const {
  if (!impl_) return {};
  Array out;
  out.impl_ = std::make_shared<Impl>(*impl_);
  out.impl_->leaf = true;
  return out;
}

template <typename T>
Array<T> Array<T>::detach() const {
  if (!impl_) return {};
  return Array(impl_->shape,
               std::vector<T>(impl_->data.begin(), impl_->data.end()), false);
}

template class Array<float>;
template class Array<double>;

}  // namespace wavetrunk::ndgrad
