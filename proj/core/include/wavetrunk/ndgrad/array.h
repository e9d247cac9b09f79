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

#ifndef WAVETRUNK_NDGRAD_ARRAY_H_
#define WAVETRUNK_NDGRAD_ARRAY_H_

#include <cstddef>
#include <memory>
#include <new>
#include <span>
#include <string>
#include <vector>

namespace wavetrunk::ndgrad {

using Shape = std::vector<std::size_t>;

std::size_t shape_size(const Shape& shape);

// 64-byte aligned storage. Vectorized reductions peel according to the
// address alignment, so a fixed alignment keeps results identical across
// runs.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), kAlignment));
  }
  void deallocate(T* p, std::size_t) { ::operator delete(p, kAlignment); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const { return true; }
};

template <typename T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

std::string shape_string(const Shape& shape);

// Dense row-major n-dimensional array with an optional gradient buffer.
//
// Array is a handle: copies share storage, the same way a parameter and the
// closures on a Tape refer to one buffer. Use clone() for a deep copy.
// T is float for training and double for gradient checking.
template <typename T>
class Array {
 public:
  using value_type = T;

  Array() = default;
  // Zero-filled array.
  explicit Array(Shape shape, bool requires_grad = false);
  Array(Shape shape, std::vector<T> values, bool requires_grad = false);

  static Array scalar(T value, bool requires_grad = false);
  static Array full(Shape shape, T value, bool requires_grad = false);

  bool defined() const { return impl_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t dim(std::size_t axis) const;
  std::size_t size() const;

  std::span<T> data();
  std::span<const T> data() const;
  T item() const;  // requires size() == 1

  bool requires_grad() const;
  void set_requires_grad(bool value);
  // True for arrays created by the user; false for outputs of recorded ops.
  bool is_leaf() const;

  bool has_grad() const;
  // Empty span when no gradient has been accumulated.
  std::span<const T> grad() const;
  // Allocates a zero gradient on first use. Const because the gradient is
  // shared bookkeeping of the handle, not part of the array's value.
  std::span<T> grad_buffer() const;
  void zero_grad();
  void release_grad();

  Array clone() const;
  // Deep copy without gradient or tape participation.
  Array detach() const;
  bool shares_storage(const Array& other) const { return impl_ == other.impl_; }

 private:
  template <typename U>
  friend class Tape;
  template <typename U>
  friend void mark_recorded(Array<U>& out);

  struct Impl {
    Shape shape;
    AlignedVector<T> data;
    AlignedVector<T> grad;
    bool requires_grad = false;
    bool leaf = true;
  };
  std::shared_ptr<Impl> impl_;
};

extern template class Array<float>;
extern template class Array<double>;

}  // namespace wavetrunk::ndgrad

#endif  // WAVETRUNK_NDGRAD_ARRAY_H_
