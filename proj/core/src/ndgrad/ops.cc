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

#include "wavetrunk/ndgrad/ops.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "ndgrad/eigen_maps.h"
#include "wavetrunk/ndgrad/tape.h"

namespace wavetrunk::ndgrad {
namespace {

using internal::as_array;
using internal::as_matrix;
using internal::RowMat;

template <typename T>
void require_same_shape(const Array<T>& a, const Array<T>& b,
                        const char* op) {
  if (a.shape() != b.shape()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch " +
                                shape_string(a.shape()) + " vs " +
                                shape_string(b.shape()));
  }
}

template <typename T>
void require_rank(const Array<T>& a, std::size_t rank, const char* op,
                  const char* what) {
  if (!a.defined() || a.rank() != rank) {
    throw std::invalid_argument(std::string(op) + ": " + what + " must have rank " +
                                std::to_string(rank) + ", got " +
                                shape_string(a.shape()));
  }
}

template <typename T>
void record(Array<T>& out, std::function<void()> fn) {
  Tape<T>::current()->record(out, std::move(fn));
}

// Copies tap k of a [C_out, C_in, K] weight into a contiguous C_out x C_in
// matrix.
template <typename T>
RowMat<T> weight_tap(const Array<T>& weight, std::size_t k) {
  const std::size_t c_out = weight.dim(0), c_in = weight.dim(1),
                    width = weight.dim(2);
  RowMat<T> tap(c_out, c_in);
  auto w = weight.data();
  for (std::size_t o = 0; o < c_out; ++o) {
    for (std::size_t i = 0; i < c_in; ++i) {
      tap(o, i) = w[(o * c_in + i) * width + k];
    }
  }
  return tap;
}

template <typename T>
void scatter_tap(const RowMat<T>& tap, std::span<T> weight_grad,
                 std::size_t c_in, std::size_t width, std::size_t k) {
  for (Eigen::Index o = 0; o < tap.rows(); ++o) {
    for (Eigen::Index i = 0; i < tap.cols(); ++i) {
      weight_grad[(o * c_in + i) * width + k] += tap(o, i);
    }
  }
}

template <typename T>
void validate_conv(const Array<T>& input, const Array<T>& weight,
                   const Array<T>& bias, const char* op) {
  require_rank(input, 3, op, "input");
  require_rank(weight, 3, op, "weight");
  require_rank(bias, 1, op, "bias");
  if (weight.dim(1) != input.dim(1)) {
    throw std::invalid_argument(
        std::string(op) + ": weight expects " + std::to_string(weight.dim(1)) +
        " input channels, input has " + std::to_string(input.dim(1)));
  }
  if (bias.dim(0) != weight.dim(0)) {
    throw std::invalid_argument(std::string(op) + ": bias has " +
                                std::to_string(bias.dim(0)) + " entries for " +
                                std::to_string(weight.dim(0)) +
                                " output channels");
  }
}

}  // namespace

template <typename T>
Array<T> add(const Array<T>& a, const Array<T>& b) {
  require_same_shape(a, b, "add");
  Array<T> out(a.shape());
  as_array(out.data().data(), out.size()) =
      as_array(a.data().data(), a.size()) + as_array(b.data().data(), b.size());
  if (should_record<T>({&a, &b})) {
    record(out, [a, b, out]() mutable {
      auto g = as_array(out.grad().data(), out.size());
      if (a.requires_grad()) as_array(a.grad_buffer().data(), a.size()) += g;
      if (b.requires_grad()) as_array(b.grad_buffer().data(), b.size()) += g;
    });
  }
  return out;
}

template <typename T>
Array<T> mul(const Array<T>& a, const Array<T>& b) {
  require_same_shape(a, b, "mul");
  Array<T> out(a.shape());
  const std::size_t n = a.size();
  as_array(out.data().data(), n) =
      as_array(a.data().data(), n) * as_array(b.data().data(), n);
  if (should_record<T>({&a, &b})) {
    record(out, [a, b, out, n]() mutable {
      auto g = as_array(out.grad().data(), n);
      if (a.requires_grad()) {
        as_array(a.grad_buffer().data(), n) += g * as_array(b.data().data(), n);
      }
      if (b.requires_grad()) {
        as_array(b.grad_buffer().data(), n) += g * as_array(a.data().data(), n);
      }
    });
  }
  return out;
}

template <typename T>
Array<T> scale(const Array<T>& a, T factor) {
  Array<T> out(a.shape());
  const std::size_t n = a.size();
  as_array(out.data().data(), n) = as_array(a.data().data(), n) * factor;
  if (should_record<T>({&a})) {
    record(out, [a, out, n, factor]() mutable {
      as_array(a.grad_buffer().data(), n) +=
          as_array(out.grad().data(), n) * factor;
    });
  }
  return out;
}

template <typename T>
Array<T> sigmoid(const Array<T>& a) {
  Array<T> out(a.shape());
  const std::size_t n = a.size();
  as_array(out.data().data(), n) = as_array(a.data().data(), n).logistic();
  if (should_record<T>({&a})) {
    record(out, [a, out, n]() mutable {
      auto s = as_array(out.data().data(), n);
      as_array(a.grad_buffer().data(), n) +=
          as_array(out.grad().data(), n) * s * (T(1) - s);
    });
  }
  return out;
}

template <typename T>
Array<T> tanh(const Array<T>& a) {
  Array<T> out(a.shape());
  const std::size_t n = a.size();
  as_array(out.data().data(), n) = as_array(a.data().data(), n).tanh();
  if (should_record<T>({&a})) {
    record(out, [a, out, n]() mutable {
      auto t = as_array(out.data().data(), n);
      as_array(a.grad_buffer().data(), n) +=
          as_array(out.grad().data(), n) * (T(1) - t.square());
    });
  }
  return out;
}

template <typename T>
Array<T> relu(const Array<T>& a) {
  Array<T> out(a.shape());
  const std::size_t n = a.size();
  as_array(out.data().data(), n) = as_array(a.data().data(), n).max(T(0));
  if (should_record<T>({&a})) {
    record(out, [a, out, n]() mutable {
      auto x = as_array(a.data().data(), n);
      as_array(a.grad_buffer().data(), n) +=
          (x > T(0)).select(as_array(out.grad().data(), n), T(0));
    });
  }
  return out;
}

template <typename T>
Array<T> gated_activation(const Array<T>& gate, const Array<T>& filter) {
  require_same_shape(gate, filter, "gated_activation");
  Array<T> out(gate.shape());
  const std::size_t n = gate.size();
  as_array(out.data().data(), n) =
      as_array(gate.data().data(), n).logistic() *
      as_array(filter.data().data(), n).tanh();
  if (should_record<T>({&gate, &filter})) {
    record(out, [gate, filter, out, n]() mutable {
      // Recomputed rather than stored: the pre-activations are alive anyway.
      Eigen::Array<T, Eigen::Dynamic, 1> s =
          as_array(gate.data().data(), n).logistic();
      Eigen::Array<T, Eigen::Dynamic, 1> t =
          as_array(filter.data().data(), n).tanh();
      auto g = as_array(out.grad().data(), n);
      if (gate.requires_grad()) {
        as_array(gate.grad_buffer().data(), n) += g * t * s * (T(1) - s);
      }
      if (filter.requires_grad()) {
        as_array(filter.grad_buffer().data(), n) += g * s * (T(1) - t.square());
      }
    });
  }
  return out;
}

template <typename T>
Array<T> causal_dilated_conv1d(const Array<T>& input, const Array<T>& weight,
                               const Array<T>& bias, std::size_t dilation) {
  validate_conv(input, weight, bias, "causal_dilated_conv1d");
  if (dilation == 0) {
    throw std::invalid_argument("causal_dilated_conv1d: dilation must be >= 1");
  }
  const std::size_t batch = input.dim(0), c_in = input.dim(1),
                    len = input.dim(2), c_out = weight.dim(0),
                    width = weight.dim(2);
  Array<T> out(Shape{batch, c_out, len});

  std::vector<RowMat<T>> taps;
  taps.reserve(width);
  for (std::size_t k = 0; k < width; ++k) taps.push_back(weight_tap(weight, k));
  auto b = as_array(bias.data().data(), c_out).matrix();

  for (std::size_t n = 0; n < batch; ++n) {
    auto x = as_matrix(input.data().data() + n * c_in * len, c_in, len);
    auto y = as_matrix(out.data().data() + n * c_out * len, c_out, len);
    y.colwise() = b;
    for (std::size_t k = 0; k < width; ++k) {
      const std::size_t shift = (width - 1 - k) * dilation;
      if (shift >= len) continue;
      const auto span = static_cast<Eigen::Index>(len - shift);
      y.rightCols(span).noalias() += taps[k] * x.leftCols(span);
    }
  }

  if (should_record<T>({&input, &weight, &bias})) {
    record(out, [input, weight, bias, out, taps = std::move(taps), batch, c_in,
                 c_out, len, width, dilation]() mutable {
      const T* dy_all = out.grad().data();
      std::vector<RowMat<T>> tap_grads;
      if (weight.requires_grad()) {
        tap_grads.assign(width, RowMat<T>::Zero(c_out, c_in));
      }
      for (std::size_t n = 0; n < batch; ++n) {
        auto dy = as_matrix(dy_all + n * c_out * len, c_out, len);
        auto x = as_matrix(input.data().data() + n * c_in * len, c_in, len);
        for (std::size_t k = 0; k < width; ++k) {
          const std::size_t shift = (width - 1 - k) * dilation;
          if (shift >= len) continue;
          const auto span = static_cast<Eigen::Index>(len - shift);
          if (input.requires_grad()) {
            auto dx = as_matrix(input.grad_buffer().data() + n * c_in * len,
                                c_in, len);
            dx.leftCols(span).noalias() +=
                taps[k].transpose() * dy.rightCols(span);
          }
          if (weight.requires_grad()) {
            tap_grads[k].noalias() +=
                dy.rightCols(span) * x.leftCols(span).transpose();
          }
        }
        if (bias.requires_grad()) {
          as_array(bias.grad_buffer().data(), c_out) +=
              dy.rowwise().sum().array();
        }
      }
      if (weight.requires_grad()) {
        auto wg = weight.grad_buffer();
        for (std::size_t k = 0; k < width; ++k) {
          scatter_tap(tap_grads[k], wg, c_in, width, k);
        }
      }
    });
  }
  return out;
}

std::size_t strided_output_length(std::size_t length, std::size_t width,
                                  std::size_t stride) {
  if (stride == 0) throw std::invalid_argument("stride must be >= 1");
  if (length < width) {
    throw std::invalid_argument("strided_conv1d: input length " +
                                std::to_string(length) +
                                " is shorter than kernel width " +
                                std::to_string(width));
  }
  return (length - width) / stride + 1;
}

namespace {

// Gathers the receptive window of every output frame into a
// [C_in * K, T_out] column matrix.
template <typename T>
RowMat<T> im2col(const T* x, std::size_t c_in, std::size_t len,
                 std::size_t width, std::size_t stride, std::size_t out_len) {
  RowMat<T> cols(c_in * width, out_len);
  for (std::size_t c = 0; c < c_in; ++c) {
    const T* row = x + c * len;
    for (std::size_t k = 0; k < width; ++k) {
      T* dst = cols.data() + (c * width + k) * out_len;
      for (std::size_t j = 0; j < out_len; ++j) dst[j] = row[j * stride + k];
    }
  }
  return cols;
}

}  // namespace

template <typename T>
Array<T> strided_conv1d(const Array<T>& input, const Array<T>& weight,
                        const Array<T>& bias, std::size_t stride) {
  validate_conv(input, weight, bias, "strided_conv1d");
  const std::size_t batch = input.dim(0), c_in = input.dim(1),
                    len = input.dim(2), c_out = weight.dim(0),
                    width = weight.dim(2);
  const std::size_t out_len = strided_output_length(len, width, stride);
  Array<T> out(Shape{batch, c_out, out_len});
  // [C_out, C_in, K] is already a row-major C_out x (C_in * K) matrix.
  auto w = as_matrix(weight.data().data(), c_out, c_in * width);
  auto b = as_array(bias.data().data(), c_out).matrix();
  for (std::size_t n = 0; n < batch; ++n) {
    RowMat<T> cols =
        im2col(input.data().data() + n * c_in * len, c_in, len, width, stride,
               out_len);
    auto y = as_matrix(out.data().data() + n * c_out * out_len, c_out, out_len);
    y.colwise() = b;
    y.noalias() += w * cols;
  }
  if (should_record<T>({&input, &weight, &bias})) {
    record(out, [input, weight, bias, out, batch, c_in, c_out, len, width,
                 stride, out_len]() mutable {
      auto w = as_matrix(weight.data().data(), c_out, c_in * width);
      for (std::size_t n = 0; n < batch; ++n) {
        auto dy = as_matrix(out.grad().data() + n * c_out * out_len, c_out,
                            out_len);
        if (weight.requires_grad()) {
          RowMat<T> cols = im2col(input.data().data() + n * c_in * len, c_in,
                                  len, width, stride, out_len);
          as_matrix(weight.grad_buffer().data(), c_out, c_in * width)
              .noalias() += dy * cols.transpose();
        }
        if (input.requires_grad()) {
          RowMat<T> dcols = w.transpose() * dy;
          T* dx = input.grad_buffer().data() + n * c_in * len;
          for (std::size_t c = 0; c < c_in; ++c) {
            for (std::size_t k = 0; k < width; ++k) {
              const T* src = dcols.data() + (c * width + k) * out_len;
              T* row = dx + c * len;
              for (std::size_t j = 0; j < out_len; ++j) {
                row[j * stride + k] += src[j];
              }
            }
          }
        }
        if (bias.requires_grad()) {
          as_array(bias.grad_buffer().data(), c_out) +=
              dy.rowwise().sum().array();
        }
      }
    });
  }
  return out;
}

template <typename T>
Array<T> global_avg_pool_time(const Array<T>& input) {
  require_rank(input, 3, "global_avg_pool_time", "input");
  const std::size_t batch = input.dim(0), channels = input.dim(1),
                    len = input.dim(2);
  Array<T> out(Shape{batch, channels});
  auto x = as_matrix(input.data().data(), batch * channels, len);
  as_array(out.data().data(), batch * channels) =
      x.rowwise().sum().array() / static_cast<T>(len);
  if (should_record<T>({&input})) {
    record(out, [input, out, batch, channels, len]() mutable {
      auto dx = as_matrix(input.grad_buffer().data(), batch * channels, len);
      auto g = as_array(out.grad().data(), batch * channels).matrix();
      dx.colwise() += g / static_cast<T>(len);
    });
  }
  return out;
}

template <typename T>
Array<T> dense(const Array<T>& input, const Array<T>& weight,
               const Array<T>& bias) {
  require_rank(input, 2, "dense", "input");
  require_rank(weight, 2, "dense", "weight");
  require_rank(bias, 1, "dense", "bias");
  const std::size_t batch = input.dim(0), features = input.dim(1),
                    units = weight.dim(1);
  if (weight.dim(0) != features) {
    throw std::invalid_argument("dense: input has " + std::to_string(features) +
                                " features, weight expects " +
                                std::to_string(weight.dim(0)));
  }
  if (bias.dim(0) != units) {
    throw std::invalid_argument("dense: bias has " +
                                std::to_string(bias.dim(0)) + " entries for " +
                                std::to_string(units) + " units");
  }
  Array<T> out(Shape{batch, units});
  auto x = as_matrix(input.data().data(), batch, features);
  auto w = as_matrix(weight.data().data(), features, units);
  auto y = as_matrix(out.data().data(), batch, units);
  y.rowwise() = as_array(bias.data().data(), units).matrix().transpose();
  y.noalias() += x * w;
  if (should_record<T>({&input, &weight, &bias})) {
    record(out, [input, weight, bias, out, batch, features, units]() mutable {
      auto dy = as_matrix(out.grad().data(), batch, units);
      if (input.requires_grad()) {
        as_matrix(input.grad_buffer().data(), batch, features).noalias() +=
            dy * as_matrix(weight.data().data(), features, units).transpose();
      }
      if (weight.requires_grad()) {
        as_matrix(weight.grad_buffer().data(), features, units).noalias() +=
            as_matrix(input.data().data(), batch, features).transpose() * dy;
      }
      if (bias.requires_grad()) {
        as_array(bias.grad_buffer().data(), units) +=
            dy.colwise().sum().array().transpose();
      }
    });
  }
  return out;
}

template <typename T>
BatchNormState<T>::BatchNormState(std::size_t channels)
    : running_mean(Shape{channels}),
      running_var(Array<T>::full(Shape{channels}, T(1))) {}

template <typename T>
Array<T> batch_norm(const Array<T>& input, const Array<T>& gamma,
                    const Array<T>& beta, BatchNormState<T>& state, Mode mode) {
  if (!input.defined() || (input.rank() != 2 && input.rank() != 3)) {
    throw std::invalid_argument("batch_norm: input must be [B,C] or [B,C,T], got " +
                                shape_string(input.shape()));
  }
  const std::size_t batch = input.dim(0), channels = input.dim(1),
                    len = input.rank() == 3 ? input.dim(2) : 1;
  if (gamma.shape() != Shape{channels} || beta.shape() != Shape{channels} ||
      state.running_mean.shape() != Shape{channels} ||
      state.running_var.shape() != Shape{channels}) {
    throw std::invalid_argument("batch_norm: parameters must have shape [" +
                                std::to_string(channels) + "]");
  }
  if (mode == Mode::kTrain && batch < 2) {
    throw std::invalid_argument(
        "batch_norm: train mode needs a batch of at least 2, got " +
        std::to_string(batch));
  }
  const std::size_t count = batch * len;
  std::vector<T> mean(channels), inv_std(channels);
  auto x = input.data();
  if (mode == Mode::kTrain) {
    for (std::size_t c = 0; c < channels; ++c) {
      double sum = 0.0;
      for (std::size_t n = 0; n < batch; ++n) {
        const T* row = x.data() + (n * channels + c) * len;
        for (std::size_t t = 0; t < len; ++t) sum += row[t];
      }
      const double mu = sum / static_cast<double>(count);
      double sq = 0.0;
      for (std::size_t n = 0; n < batch; ++n) {
        const T* row = x.data() + (n * channels + c) * len;
        for (std::size_t t = 0; t < len; ++t) {
          const double d = row[t] - mu;
          sq += d * d;
        }
      }
      const double var = sq / static_cast<double>(count);
      mean[c] = static_cast<T>(mu);
      inv_std[c] = static_cast<T>(1.0 / std::sqrt(var + state.epsilon));
      const T m = state.momentum;
      auto rm = state.running_mean.data();
      auto rv = state.running_var.data();
      rm[c] = (T(1) - m) * rm[c] + m * static_cast<T>(mu);
      rv[c] = (T(1) - m) * rv[c] +
              m * static_cast<T>(var * static_cast<double>(count) /
                                 static_cast<double>(count - 1));
    }
  } else {
    auto rm = state.running_mean.data();
    auto rv = state.running_var.data();
    for (std::size_t c = 0; c < channels; ++c) {
      mean[c] = rm[c];
      inv_std[c] = T(1) / std::sqrt(rv[c] + state.epsilon);
    }
  }

  Array<T> out(input.shape());
  Array<T> normalized(input.shape());
  auto g = gamma.data();
  auto bt = beta.data();
  auto y = out.data();
  auto xh = normalized.data();
  for (std::size_t n = 0; n < batch; ++n) {
    for (std::size_t c = 0; c < channels; ++c) {
      const std::size_t base = (n * channels + c) * len;
      for (std::size_t t = 0; t < len; ++t) {
        xh[base + t] = (x[base + t] - mean[c]) * inv_std[c];
        y[base + t] = g[c] * xh[base + t] + bt[c];
      }
    }
  }

  if (should_record<T>({&input, &gamma, &beta})) {
    record(out, [input, gamma, beta, out, normalized, inv_std, batch, channels,
                 len, count, mode]() mutable {
      auto dy = out.grad();
      auto xh = normalized.data();
      auto g = gamma.data();
      for (std::size_t c = 0; c < channels; ++c) {
        double sum_dy = 0.0, sum_dy_xh = 0.0;
        for (std::size_t n = 0; n < batch; ++n) {
          const std::size_t base = (n * channels + c) * len;
          for (std::size_t t = 0; t < len; ++t) {
            sum_dy += dy[base + t];
            sum_dy_xh += dy[base + t] * xh[base + t];
          }
        }
        if (gamma.requires_grad()) {
          gamma.grad_buffer()[c] += static_cast<T>(sum_dy_xh);
        }
        if (beta.requires_grad()) beta.grad_buffer()[c] += static_cast<T>(sum_dy);
        if (!input.requires_grad()) continue;
        auto dx = input.grad_buffer();
        const T scale_c = g[c] * inv_std[c];
        if (mode == Mode::kEval) {
          for (std::size_t n = 0; n < batch; ++n) {
            const std::size_t base = (n * channels + c) * len;
            for (std::size_t t = 0; t < len; ++t) dx[base + t] += scale_c * dy[base + t];
          }
          continue;
        }
        const T mean_dy = static_cast<T>(sum_dy / static_cast<double>(count));
        const T mean_dy_xh =
            static_cast<T>(sum_dy_xh / static_cast<double>(count));
        for (std::size_t n = 0; n < batch; ++n) {
          const std::size_t base = (n * channels + c) * len;
          for (std::size_t t = 0; t < len; ++t) {
            dx[base + t] +=
                scale_c * (dy[base + t] - mean_dy - xh[base + t] * mean_dy_xh);
          }
        }
      }
    });
  }
  return out;
}

template <typename T>
Array<T> dropout(const Array<T>& input, double rate, Mode mode, Rng& rng) {
  if (!(rate >= 0.0) || rate >= 1.0) {
    throw std::invalid_argument("dropout: rate must be in [0, 1), got " +
                                std::to_string(rate));
  }
  if (mode == Mode::kEval || rate == 0.0) return input;
  const std::size_t n = input.size();
  const T keep_scale = static_cast<T>(1.0 / (1.0 - rate));
  std::vector<T> mask(n);
  for (std::size_t i = 0; i < n; ++i) {
    mask[i] = uniform01(rng) < rate ? T(0) : keep_scale;
  }
  Array<T> out(input.shape());
  as_array(out.data().data(), n) =
      as_array(input.data().data(), n) * as_array(mask.data(), n);
  if (should_record<T>({&input})) {
    record(out, [input, out, mask = std::move(mask), n]() mutable {
      as_array(input.grad_buffer().data(), n) +=
          as_array(out.grad().data(), n) * as_array(mask.data(), n);
    });
  }
  return out;
}

template <typename T>
Array<T> slice_time(const Array<T>& input, std::size_t start,
                    std::size_t length) {
  require_rank(input, 3, "slice_time", "input");
  const std::size_t rows = input.dim(0) * input.dim(1), len = input.dim(2);
  if (length == 0 || start + length > len) {
    throw std::invalid_argument("slice_time: frames [" + std::to_string(start) +
                                ", " + std::to_string(start + length) +
                                ") outside length " + std::to_string(len));
  }
  Array<T> out(Shape{input.dim(0), input.dim(1), length});
  auto x = as_matrix(input.data().data(), rows, len);
  as_matrix(out.data().data(), rows, length) =
      x.middleCols(static_cast<Eigen::Index>(start),
                   static_cast<Eigen::Index>(length));
  if (should_record<T>({&input})) {
    record(out, [input, out, rows, len, start, length]() mutable {
      as_matrix(input.grad_buffer().data(), rows, len)
          .middleCols(static_cast<Eigen::Index>(start),
                      static_cast<Eigen::Index>(length)) +=
          as_matrix(out.grad().data(), rows, length);
    });
  }
  return out;
}

#define WAVETRUNK_INSTANTIATE_OPS(T)                                          \
  template Array<T> add(const Array<T>&, const Array<T>&);                    \
  template Array<T> mul(const Array<T>&, const Array<T>&);                    \
  template Array<T> scale(const Array<T>&, T);                                \
  template Array<T> sigmoid(const Array<T>&);                                 \
  template Array<T> tanh(const Array<T>&);                                    \
  template Array<T> relu(const Array<T>&);                                    \
  template Array<T> gated_activation(const Array<T>&, const Array<T>&);       \
  template Array<T> causal_dilated_conv1d(const Array<T>&, const Array<T>&,   \
                                          const Array<T>&, std::size_t);      \
  template Array<T> strided_conv1d(const Array<T>&, const Array<T>&,          \
                                   const Array<T>&, std::size_t);             \
  template Array<T> global_avg_pool_time(const Array<T>&);                    \
  template Array<T> dense(const Array<T>&, const Array<T>&, const Array<T>&); \
  template struct BatchNormState<T>;                                          \
  template Array<T> batch_norm(const Array<T>&, const Array<T>&,              \
                               const Array<T>&, BatchNormState<T>&, Mode);    \
  template Array<T> dropout(const Array<T>&, double, Mode, Rng&);             \
  template Array<T> slice_time(const Array<T>&, std::size_t, std::size_t);

WAVETRUNK_INSTANTIATE_OPS(float)
WAVETRUNK_INSTANTIATE_OPS(double)

#undef WAVETRUNK_INSTANTIATE_OPS

}  // namespace wavetrunk::ndgrad
