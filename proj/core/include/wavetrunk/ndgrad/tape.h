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

#ifndef WAVETRUNK_NDGRAD_TAPE_H_
#define WAVETRUNK_NDGRAD_TAPE_H_

#include <cstddef>
#include <functional>
#include <memory>
#include <vector>

#include "wavetrunk/ndgrad/array.h"

namespace wavetrunk::ndgrad {

// Execution-ordered record of differentiable operations.
//
// Ops record onto the tape installed by the innermost TapeScope of the calling
// thread, and only when at least one operand requires a gradient. Because the
// record is in execution order, walking it backwards is a reverse topological
// traversal of the graph.
//
// Gradients of intermediate (non-leaf) arrays are released as soon as they
// have been propagated; only leaves keep their accumulated gradient.
template <typename T>
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  // Marks `out` as produced by a recorded op and appends its backward step.
  // The step runs only if `out` received a gradient.
  void record(Array<T>& out, std::function<void()> backward_fn);

  // Seeds d(loss)/d(loss) = 1 and runs every recorded step in reverse.
  // Throws std::invalid_argument for a non-scalar loss and std::logic_error
  // when called a second time without reset().
  void backward(const Array<T>& loss);

  // Drops every recorded step and the activations they hold.
  void reset();

  std::size_t size() const { return nodes_.size(); }
  bool consumed() const { return consumed_; }

  // Innermost tape installed on this thread, or nullptr.
  static Tape* current();

 private:
  template <typename U>
  friend class TapeScope;

  struct Node {
    std::shared_ptr<typename Array<T>::Impl> out;
    std::function<void()> backward_fn;
  };
  std::vector<Node> nodes_;
  bool consumed_ = false;
};

// Installs a tape as the recording target for the current thread.
template <typename T>
class TapeScope {
 public:
  explicit TapeScope(Tape<T>& tape);
  ~TapeScope();
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;

 private:
  Tape<T>* previous_;
};

// Runs the backward pass of the current thread's tape.
template <typename T>
void backward(const Array<T>& loss);

// True when an op on these operands must be recorded.
template <typename T>
bool should_record(std::initializer_list<const Array<T>*> inputs);

extern template class Tape<float>;
extern template class Tape<double>;
extern template class TapeScope<float>;
extern template class TapeScope<double>;

}  // namespace wavetrunk::ndgrad

#endif  // WAVETRUNK_NDGRAD_TAPE_H_
