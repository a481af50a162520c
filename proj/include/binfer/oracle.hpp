#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "binfer/layers.hpp"
#include "binfer/network.hpp"

namespace binfer::oracle {

/// Real-valued 3D feature map used by the reference pipeline.
struct RealTensor {
  int width = 0, height = 0, depth = 0;
  std::vector<double> v;  // (h, w, d) order, depth fastest

  RealTensor() = default;
  RealTensor(int w, int h, int d)
      : width(w), height(h), depth(d), v(std::size_t(w) * h * d, 0.0) {}

  double at(int w, int h, int d) const {
    return v[(std::size_t(h) * width + w) * depth + d];
  }
  double& at(int w, int h, int d) {
    return v[(std::size_t(h) * width + w) * depth + d];
  }
};

/// Naive triple-sum convolution with same-padding (odd filter dims) and a
/// configurable pad value: 0 for the first layer, -1 for binary layers.
RealTensor conv_real(const RealTensor& fmap, std::span<const RealTensor> filters,
                     double pad_value);

/// (y - mu) / sqrt(sigma2 + epsilon) * gamma + beta.
double batchnorm_real(double y, const BatchNormParams& p);

/// 1 if z >= 0 else 0.
int binarize_real(double z);

/// Dot product of two ±1 vectors in plain integer arithmetic.
int xnor_dot_pm1(std::span<const std::int8_t> a, std::span<const std::int8_t> w);

/// Thresholding mode of the reference pipeline. kExact evaluates the
/// normalization at every accumulator value; kRounded derives an integer
/// threshold (by root-finding on the affine normalization, with the shared
/// rounding rule) so that both pipelines quantize identically.
enum class ThresholdMode { kExact, kRounded };

/// Recovers the folded threshold numerically: one secant step on the affine
/// z(y) = batchnorm(2y - cnum) (or z(y) = batchnorm(y) for the first layer)
/// locates the real boundary, which is then rounded half away from zero.
/// Independent of the closed-form fold path.
FoldedThreshold threshold_by_root(const BatchNormParams& p, int cnum,
                                  bool first_layer);

/// 2x2 stride-2 max pooling.
RealTensor max_pool_real(const RealTensor& y);

/// Intermediates of a reference run: post-pool accumulators per layer in the
/// paper's ±1 domain (first layer: direct dot products) and activation bits.
struct ReferenceTrace {
  std::vector<RealTensor> accum;
  std::vector<std::vector<std::uint8_t>> activations;  // (h, w, d) order
  InferenceResult result;
};

/// Runs the whole network in real ±1 arithmetic from the batch-norm
/// constants, never touching the bit-packed path or the folded thresholds.
ReferenceTrace run_reference(const NetworkSpec& spec,
                             const NetworkWeights& weights, const Model& model,
                             const FixedTensor& input, ThresholdMode mode);

}  // namespace binfer::oracle
