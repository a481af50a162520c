#pragma once

#include <optional>
#include <string>
#include <vector>

#include "binfer/bit_tensor.hpp"
#include "binfer/fold.hpp"

namespace binfer {

enum class LayerKind { kConvFirst, kConvBinary, kFcBinary, kFcOutput };

const char* to_string(LayerKind kind);

/// Declarative description of one layer. Convolutional layers are 3x3 with
/// stride 1 and zero padding of 1; fully-connected layers are modelled as
/// 1x1 spatial filters spanning the whole (flattened) input.
struct LayerSpec {
  LayerKind kind = LayerKind::kConvBinary;
  std::string name;
  int filter_w = 1;
  int filter_h = 1;
  int filter_d = 0;   // input depth (conv) or input length (fc)
  int n_filters = 0;  // output channels, fc outputs, or classes
  bool pool_after = false;

  bool is_conv() const {
    return kind == LayerKind::kConvFirst || kind == LayerKind::kConvBinary;
  }
  bool is_fc() const { return !is_conv(); }
  /// Receptive-field tap count FW*FH*FD.
  int cnum() const { return filter_w * filter_h * filter_d; }
};

struct Dims {
  int w = 0, h = 0, d = 0;
  friend bool operator==(const Dims&, const Dims&) = default;
};

struct NetworkSpec {
  std::string name;
  Dims input;
  std::vector<LayerSpec> layers;
};

/// Thrown when a network description or a set of artifacts is inconsistent;
/// carries the offending layer index for diagnostics.
class LayerError : public std::invalid_argument {
 public:
  LayerError(std::size_t layer, const std::string& what)
      : std::invalid_argument("layer " + std::to_string(layer) + ": " + what),
        layer_(layer) {}
  std::size_t layer() const { return layer_; }

 private:
  std::size_t layer_;
};

/// Output dims of layer i before pooling (conv: same-padded spatial dims of
/// its input; fc: 1x1xN).
Dims pre_pool_dims(const NetworkSpec& spec, std::size_t i);
/// Output dims of layer i after any pooling.
Dims post_pool_dims(const NetworkSpec& spec, std::size_t i);

/// Checks dimension chaining only (enough for the performance model, which
/// also accepts conv-only fragments).
void validate_dims(const NetworkSpec& spec);

/// Full inference-topology validation: dimension chaining, 3x3 conv filters,
/// exactly one first layer at position 0, exactly one output layer at the
/// end, no conv after fc, even dims wherever pooling is requested.
void validate_network(const NetworkSpec& spec);

/// Per-layer batch-norm constants, one entry per output channel.
struct LayerBatchNorm {
  double epsilon = 1e-5;
  std::vector<double> mu, sigma2, gamma, beta;

  std::size_t channels() const { return mu.size(); }
  BatchNormParams channel(std::size_t c) const {
    return {mu[c], sigma2[c], gamma[c], beta[c], epsilon};
  }
};

/// A network spec plus optional per-layer batch-norm blocks (indexed in
/// parallel with spec.layers).
struct Model {
  NetworkSpec spec;
  std::vector<std::optional<LayerBatchNorm>> bn;

  const LayerBatchNorm* bn_for(std::size_t layer) const {
    if (layer < bn.size() && bn[layer].has_value()) return &*bn[layer];
    return nullptr;
  }
};

/// Weights for every layer: ±1 fixed-point filters for the first layer,
/// bit-packed filters for all binary layers (fc rows are 1x1xN filters).
struct LayerWeights {
  std::vector<FixedTensor> fixed;  // first layer only
  std::vector<BitTensor> bits;     // binary conv / fc layers
};

struct NetworkWeights {
  std::vector<LayerWeights> layers;
};

/// Folded thresholds for every layer that ends in a binarization, i.e. all
/// layers except the last. layers[i] has one entry per output channel.
struct ThresholdTable {
  std::vector<std::vector<FoldedThreshold>> layers;
};

/// Throws LayerError if weights or thresholds do not match the spec.
void validate_artifacts(const NetworkSpec& spec, const NetworkWeights& weights,
                        const ThresholdTable& thresholds);

}  // namespace binfer
