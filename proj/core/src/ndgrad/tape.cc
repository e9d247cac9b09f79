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

#include "wavetrunk/ndgrad/tape.h"

#include <stdexcept>

namespace wavetrunk::ndgrad {
namespace {

template <typename T>
Tape<T>*& current_slot() {
  thread_local Tape<T>* tape = nullptr;
  return tape;
}

}  // namespace

template <typename T>
void mark_recorded(Array<T>& out) {
  out.impl_->leaf = false;
  out.impl_->requires_grad = true;
}

template <typename T>
void Tape<T>::record(Array<T>& out, std::function<void()> backward_fn) {
  if (consumed_) {
    throw std::logic_error("recording onto a tape that already ran backward; "
                           "call reset() first");
  }
  mark_recorded(out);
  nodes_.push_back(Node{out.impl_, std::move(backward_fn)});
}

template <typename T>
void Tape<T>::backward(const Array<T>& loss) {
  if (consumed_) {
    throw std::logic_error("backward called twice without reset()");
  }
  if (loss.size() != 1) {
    throw std::invalid_argument("backward needs a scalar loss, got shape " +
                                shape_string(loss.shape()));
  }
  consumed_ = true;
  if (!loss.requires_grad()) return;
  Array<T> seed = loss;
  seed.grad_buffer()[0] += T{1};
  for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
    if (it->out->grad.empty()) continue;
    it->backward_fn();
    it->out->grad.clear();
    it->out->grad.shrink_to_fit();
  }
}

template <typename T>
void Tape<T>::reset() {
  nodes_.clear();
  nodes_.shrink_to_fit();
  consumed_ = false;
}

template <typename T>
Tape<T>* Tape<T>::current() {
  return current_slot<T>();
}

template <typename T>
TapeScope<T>::TapeScope(Tape<T>& tape) : previous_(current_slot<T>()) {
  current_slot<T>() = &tape;
}

template <typename T>
TapeScope<T>::~TapeScope() {
  current_slot<T>() = previous_;
}

template <typename T>
void backward(const Array<T>& loss) {
  Tape<T>* tape = Tape<T>::current();
  if (tape == nullptr) {
    throw std::logic_error("backward called with no active tape");
  }
  tape->backward(loss);
}

template <typename T>
bool should_record(std::initializer_list<const Array<T>*> inputs) {
  if (Tape<T>::current() == nullptr) return false;
  for (const Array<T>* a : inputs) {
    if (a != nullptr && a->requires_grad()) return true;
  }
  return false;
}

template class Tape<float>;
template class Tape<double>;
template class TapeScope<float>;
template class TapeScope<double>;
template void mark_recorded(Array<float>&);
template void mark_recorded(Array<double>&);
template void backward(const Array<float>&);
template void backward(const Array<double>&);
template bool should_record(std::initializer_list<const Array<float>*>);
template bool should_record(std::initializer_list<const Array<double>*>);

}  // namespace wavetrunk::ndgrad
