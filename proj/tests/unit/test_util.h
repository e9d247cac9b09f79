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


// Helpers shared by the unit tests: a central-difference gradient oracle
// and scratch directories.

#ifndef WAVETRUNK_TESTS_UNIT_TEST_UTIL_H_
#define WAVETRUNK_TESTS_UNIT_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <unistd.h>

#include "gtest/gtest.h"
#include "wavetrunk/ndgrad/array.h"
#include "wavetrunk/ndgrad/random.h"
#include "wavetrunk/ndgrad/tape.h"

namespace wavetrunk::testing {

inline ndgrad::Array<double> random_array(ndgrad::Shape shape, Rng& rng,
                                          double lo = -1.0, double hi = 1.0) {
  ndgrad::Array<double> a(std::move(shape));
  for (double& v : a.data()) v = lo + (hi - lo) * uniform01(rng);
  return a;
}

// Tape gradients of `loss` w.r.t. `leaves`.
inline std::vector<std::vector<double>> tape_gradients(
    std::vector<ndgrad::Array<double>>& leaves,
    const std::function<ndgrad::Array<double>()>& loss) {
  for (auto& l : leaves) {
    l.set_requires_grad(true);
    l.release_grad();
  }
  ndgrad::Tape<double> tape;
  {
    ndgrad::TapeScope<double> scope(tape);
    tape.backward(loss());
  }
  std::vector<std::vector<double>> out;
  for (const auto& l : leaves) {
    std::vector<double> g(l.size(), 0.0);
    if (l.has_grad()) std::copy(l.grad().begin(), l.grad().end(), g.begin());
    out.push_back(std::move(g));
  }
  return out;
}

// Central differences of `loss` w.r.t. every leaf element.
inline std::vector<std::vector<double>> numeric_gradients(
    std::vector<ndgrad::Array<double>>& leaves,
    const std::function<ndgrad::Array<double>()>& loss, double h = 1e-5) {
  std::vector<std::vector<double>> out;
  for (auto& l : leaves) {
    std::vector<double> g(l.size());
    auto v = l.data();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double saved = v[i];
      v[i] = saved + h;
      const double up = loss().item();
      v[i] = saved - h;
      const double down = loss().item();
      v[i] = saved;
      g[i] = (up - down) / (2.0 * h);
    }
    out.push_back(std::move(g));
  }
  return out;
}

inline double max_relative_error(const std::vector<std::vector<double>>& a,
                                 const std::vector<std::vector<double>>& b) {
  double worst = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    for (std::size_t i = 0; i < a[l].size(); ++i) {
      const double denom = std::max({std::abs(a[l][i]), std::abs(b[l][i]), 1e-6});
      worst = std::max(worst, std::abs(a[l][i] - b[l][i]) / denom);
    }
  }
  return worst;
}

// Fresh empty directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name)
      : path_(std::filesystem::temp_directory_path() /
              ("wavetrunk_test_" + name + "_" + std::to_string(::getpid()))) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& child = "") const {
    return child.empty() ? path_.string() : (path_ / child).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace wavetrunk::testing

#endif  // WAVETRUNK_TESTS_UNIT_TEST_UTIL_H_
