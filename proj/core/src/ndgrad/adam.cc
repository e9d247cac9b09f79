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

#include "wavetrunk/ndgrad/adam.h"

#include <cmath>
#include <stdexcept>

namespace wavetrunk::ndgrad {

void AdamConfig::validate() const {
  if (!(lr > 0.0)) throw std::invalid_argument("adam: lr must be positive");
  if (!(beta0 >= 0.0 && beta0 < 1.0)) {
    throw std::invalid_argument("adam: beta0 must be in [0, 1)");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0)) {
    throw std::invalid_argument("adam: beta1 must be in [0, 1)");
  }
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("adam: epsilon must be positive");
  }
}

void LrSchedule::validate() const {
  if (epochs_per_step == 0) {
    throw std::invalid_argument("schedule: epochs_per_step must be positive");
  }
  if (!(multiplier > 0.0 && multiplier <= 1.0)) {
    throw std::invalid_argument("schedule: multiplier must be in (0, 1]");
  }
}

double LrSchedule::effective_lr(double base_lr, std::uint64_t epoch) const {
  const std::uint64_t decays = epoch / epochs_per_step;
  return base_lr * std::pow(multiplier, static_cast<double>(decays));
}

namespace {

template <typename T>
void update_one(std::span<T> param, std::span<const T> grad,
                AdamMoments<T>& m, const AdamConfig& cfg, double lr) {
  const std::size_t n = param.size();
  if (m.first.empty()) {
    m.first.assign(n, T(0));
    m.second.assign(n, T(0));
  }
  const T b0 = static_cast<T>(cfg.beta0);
  const T b1 = static_cast<T>(cfg.beta1);
  const double t = static_cast<double>(cfg.step_count);
  const T correction0 = static_cast<T>(1.0 - std::pow(cfg.beta0, t));
  const T correction1 = static_cast<T>(1.0 - std::pow(cfg.beta1, t));
  const T step = static_cast<T>(lr);
  const T eps = static_cast<T>(cfg.epsilon);
  for (std::size_t i = 0; i < n; ++i) {
    const T g = grad.empty() ? T(0) : grad[i];
    m.first[i] = b0 * m.first[i] + (T(1) - b0) * g;
    m.second[i] = b1 * m.second[i] + (T(1) - b1) * g * g;
    const T m_hat = m.first[i] / correction0;
    const T v_hat = m.second[i] / correction1;
    param[i] -= step * m_hat / (std::sqrt(v_hat) + eps);
  }
}

}  // namespace

template <typename T>
void adam_step(std::span<Array<T>> params, std::span<const Array<T>> grads,
               std::vector<AdamMoments<T>>& state, AdamConfig& cfg,
               double lr) {
  if (params.size() != grads.size()) {
    throw std::invalid_argument("adam_step: " + std::to_string(params.size()) +
                                " parameters but " +
                                std::to_string(grads.size()) + " gradients");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].shape() != grads[i].shape()) {
      throw std::invalid_argument(
          "adam_step: gradient " + std::to_string(i) + " has shape " +
          shape_string(grads[i].shape()) + ", parameter has " +
          shape_string(params[i].shape()));
    }
  }
  if (state.size() != params.size()) state.resize(params.size());
  ++cfg.step_count;
  for (std::size_t i = 0; i < params.size(); ++i) {
    update_one(params[i].data(), grads[i].data(), state[i], cfg, lr);
  }
}

template <typename T>
AdamOptimizer<T>::AdamOptimizer(std::vector<NamedParameter<T>> params,
                                AdamConfig cfg)
    : params_(std::move(params)), moments_(params_.size()), cfg_(cfg) {
  cfg_.validate();
}

template <typename T>
void AdamOptimizer<T>::step(double lr) {
  ++cfg_.step_count;
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Array<T>& p = params_[i].value;
    update_one(p.data(), p.grad(), moments_[i], cfg_, lr);
  }
}

template <typename T>
void AdamOptimizer<T>::zero_grad() {
  for (auto& p : params_) p.value.zero_grad();
}

template <typename T>
void AdamOptimizer<T>::set_state(std::vector<AdamMoments<T>> moments,
                                 std::uint64_t step_count) {
  if (moments.size() != params_.size()) {
    throw std::invalid_argument("optimizer state has " +
                                std::to_string(moments.size()) +
                                " entries for " +
                                std::to_string(params_.size()) + " parameters");
  }
  for (std::size_t i = 0; i < moments.size(); ++i) {
    const std::size_t n = params_[i].value.size();
    const bool empty = moments[i].first.empty() && moments[i].second.empty();
    if (!empty &&
        (moments[i].first.size() != n || moments[i].second.size() != n)) {
      throw std::invalid_argument("optimizer state for " + params_[i].name +
                                  " has the wrong size");
    }
  }
  moments_ = std::move(moments);
  cfg_.step_count = step_count;
}

template void adam_step(std::span<Array<float>>, std::span<const Array<float>>,
                        std::vector<AdamMoments<float>>&, AdamConfig&, double);
template void adam_step(std::span<Array<double>>,
                        std::span<const Array<double>>,
                        std::vector<AdamMoments<double>>&, AdamConfig&, double);
template class AdamOptimizer<float>;
template class AdamOptimizer<double>;

}  // namespace wavetrunk::ndgrad
