#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "binfer/network.hpp"

namespace binfer {

/// Integer accumulator outputs of one layer, before binarization.
/// First layer: true dot products in [-31*cnum, 31*cnum]. Binary layers:
/// match counts in [0, cnum].
struct IntFeatureMap {
  int width = 0, height = 0, depth = 0;
  std::vector<std::int32_t> v;  // (h, w, d) order, depth fastest

  IntFeatureMap() = default;
  IntFeatureMap(int w, int h, int d)
      : width(w), height(h), depth(d), v(std::size_t(w) * h * d, 0) {}

  std::int32_t at(int w, int h, int d) const {
    return v[(std::size_t(h) * width + w) * depth + d];
  }
  std::int32_t& at(int w, int h, int d) {
    return v[(std::size_t(h) * width + w) * depth + d];
  }

  friend bool operator==(const IntFeatureMap&, const IntFeatureMap&) = default;
};

/// First-layer convolution: exact fixed-point dot products over 3x3xD
/// receptive fields with zero padding of 1. Output spatial dims equal the
/// input's.
IntFeatureMap conv_first(const FixedTensor& input,
                         std::span<const FixedTensor> filters);

/// Binary convolution: per-pixel XNOR match counts over same-padded
/// receptive fields. Padding contributes encoded 0 bits (-1 in the ±1
/// domain), so every output stays in [0, FW*FH*FD].
IntFeatureMap conv_binary(const BitTensor& input,
                          std::span<const BitTensor> filters);

/// 2x2 stride-2 max pooling on integer accumulators (applied before
/// binarization). Requires even spatial dims.
IntFeatureMap max_pool(const IntFeatureMap& y);

/// Applies the folded per-channel thresholds, producing the next layer's
/// packed activation bits.
BitTensor norm_binarize(const IntFeatureMap& y,
                        std::span<const FoldedThreshold> thresholds);

/// Fully-connected binary layer: one xnor_dot per output neuron over the
/// flattened input, followed by norm_binarize. cnum equals the input length.
BitTensor fc_binary(const BitTensor& input, std::span<const BitTensor> weights,
                    std::span<const FoldedThreshold> thresholds);

struct InferenceResult {
  int prediction = 0;
  std::vector<double> scores;
};

/// Output layer: per-class affine normalization of the compensated dot
/// products, argmax with ties broken toward the lowest index. A null `bn`
/// scores the raw compensated values.
InferenceResult classify(const BitTensor& input,
                         std::span<const BitTensor> weights,
                         const LayerBatchNorm* bn);

/// Captured intermediates of one forward pass: per layer the post-pool
/// accumulators and (for all but the output layer) the activation bits.
struct InferenceTrace {
  std::vector<IntFeatureMap> accum;
  std::vector<BitTensor> activations;
};

/// Runs the whole network on one image: conv_first, then the hidden binary
/// layers with optional pooling, then the fc layers and the final
/// classification. `output_bn` supplies the output layer's normalization
/// (may be null). `trace`, when non-null, receives every intermediate.
InferenceResult run_network(const NetworkSpec& spec,
                            const NetworkWeights& weights,
                            const ThresholdTable& thresholds,
                            const LayerBatchNorm* output_bn,
                            const FixedTensor& input,
                            InferenceTrace* trace = nullptr);

}  // namespace binfer
