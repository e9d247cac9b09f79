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

#ifndef WAVETRUNK_SRC_NDGRAD_EIGEN_MAPS_H_
#define WAVETRUNK_SRC_NDGRAD_EIGEN_MAPS_H_

#include <cstddef>

#include <Eigen/Core>

namespace wavetrunk::ndgrad::internal {

template <typename T>
using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename T>
using MatMap = Eigen::Map<RowMat<T>>;
template <typename T>
using ConstMatMap = Eigen::Map<const RowMat<T>>;
template <typename T>
using ArrMap = Eigen::Map<Eigen::Array<T, Eigen::Dynamic, 1>>;
template <typename T>
using ConstArrMap = Eigen::Map<const Eigen::Array<T, Eigen::Dynamic, 1>>;

template <typename T>
ArrMap<T> as_array(T* p, std::size_t n) {
  return ArrMap<T>(p, static_cast<Eigen::Index>(n));
}
template <typename T>
ConstArrMap<T> as_array(const T* p, std::size_t n) {
  return ConstArrMap<T>(p, static_cast<Eigen::Index>(n));
}
template <typename T>
MatMap<T> as_matrix(T* p, std::size_t rows, std::size_t cols) {
  return MatMap<T>(p, static_cast<Eigen::Index>(rows),
                   static_cast<Eigen::Index>(cols));
}
template <typename T>
ConstMatMap<T> as_matrix(const T* p, std::size_t rows, std::size_t cols) {
  return ConstMatMap<T>(p, static_cast<Eigen::Index>(rows),
                        static_cast<Eigen::Index>(cols));
}

}  // namespace wavetrunk::ndgrad::internal

#endif  // WAVETRUNK_SRC_NDGRAD_EIGEN_MAPS_H_
