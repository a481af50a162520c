#include "binfer/network.hpp"

#include <stdexcept>

namespace binfer {

const char* to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kConvFirst: return "conv_first";
    case LayerKind::kConvBinary: return "conv_binary";
    case LayerKind::kFcBinary: return "fc_binary";
    default: return "fc_output";
  }
}

namespace {

Dims input_dims(const NetworkSpec& spec, std::size_t i) {
  return i == 0 ? spec.input : post_pool_dims(spec, i - 1);
}

}  // namespace

Dims pre_pool_dims(const NetworkSpec& spec, std::size_t i) {
  const LayerSpec& l = spec.layers.at(i);
  if (l.is_conv()) {
    const Dims in = input_dims(spec, i);
    return {in.w, in.h, l.n_filters};  // same-padding, stride 1
  }
  return {1, 1, l.n_filters};
}

Dims post_pool_dims(const NetworkSpec& spec, std::size_t i) {
  Dims d = pre_pool_dims(spec, i);
  if (spec.layers[i].pool_after) {
    d.w /= 2;
    d.h /= 2;
  }
  return d;
}

void validate_dims(const NetworkSpec& spec) {
  if (spec.layers.empty()) throw std::invalid_argument("network has no layers");
  if (spec.input.w <= 0 || spec.input.h <= 0 || spec.input.d <= 0)
    throw std::invalid_argument("network input dims must be positive");
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    if (l.filter_w <= 0 || l.filter_h <= 0 || l.filter_d <= 0 ||
        l.n_filters <= 0)
      throw LayerError(i, "filter dims and filter count must be positive");
    const Dims in = input_dims(spec, i);
    const int expect = l.is_conv() ? in.d : in.w * in.h * in.d;
    if (l.filter_d != expect)
      throw LayerError(i, "filter depth " + std::to_string(l.filter_d) +
                              " does not match input (" +
                              std::to_string(expect) + ")");
    if (l.pool_after) {
      const Dims pre = pre_pool_dims(spec, i);
      if (pre.w % 2 != 0 || pre.h % 2 != 0)
        throw LayerError(i, "pooling requires even feature-map dims");
      if (l.is_fc()) throw LayerError(i, "pooling after an fc layer");
    }
  }
}

void validate_network(const NetworkSpec& spec) {
  validate_dims(spec);
  bool seen_fc = false;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    switch (l.kind) {
      case LayerKind::kConvFirst:
        if (i != 0) throw LayerError(i, "conv_first must be the first layer");
        break;
      case LayerKind::kConvBinary:
        if (i == 0) throw LayerError(i, "network must start with conv_first");
        if (seen_fc) throw LayerError(i, "conv layer after an fc layer");
        break;
      case LayerKind::kFcBinary:
      case LayerKind::kFcOutput:
        seen_fc = true;
        if (l.filter_w != 1 || l.filter_h != 1)
          throw LayerError(i, "fc layers have no spatial dims");
        break;
    }
    if (l.is_conv() && (l.filter_w != 3 || l.filter_h != 3))
      throw LayerError(i, "conv filters are fixed at 3x3");
    const bool last = i + 1 == spec.layers.size();
    if ((l.kind == LayerKind::kFcOutput) != last)
      throw LayerError(i, last ? "last layer must be fc_output"
                               : "fc_output must be the last layer");
  }
}

void validate_artifacts(const NetworkSpec& spec, const NetworkWeights& weights,
                        const ThresholdTable& thresholds) {
  if (weights.layers.size() != spec.layers.size())
    throw std::invalid_argument("weights cover " +
                                std::to_string(weights.layers.size()) +
                                " layers, network has " +
                                std::to_string(spec.layers.size()));
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    const LayerWeights& w = weights.layers[i];
    if (l.kind == LayerKind::kConvFirst) {
      if (int(w.fixed.size()) != l.n_filters)
        throw LayerError(i, "expected " + std::to_string(l.n_filters) +
                                " fixed-point filters, found " +
                                std::to_string(w.fixed.size()));
      for (const FixedTensor& f : w.fixed) {
        if (f.width() != l.filter_w || f.height() != l.filter_h ||
            f.depth() != l.filter_d)
          throw LayerError(i, "fixed-point filter dims mismatch");
        for (std::int8_t v : f.values())
          if (v != 1 && v != -1)
            throw LayerError(i, "first-layer weight is not +1 or -1");
      }
    } else {
      if (int(w.bits.size()) != l.n_filters)
        throw LayerError(i, "expected " + std::to_string(l.n_filters) +
                                " binary filters, found " +
                                std::to_string(w.bits.size()));
      for (const BitTensor& f : w.bits)
        if (f.width() != l.filter_w || f.height() != l.filter_h ||
            f.depth() != l.filter_d)
          throw LayerError(i, "binary filter dims mismatch");
    }
  }
  const std::size_t binarized = spec.layers.size() - 1;
  if (thresholds.layers.size() != binarized)
    throw std::invalid_argument(
        "threshold table covers " + std::to_string(thresholds.layers.size()) +
        " layers, network needs " + std::to_string(binarized));
  for (std::size_t i = 0; i < binarized; ++i)
    if (int(thresholds.layers[i].size()) != spec.layers[i].n_filters)
      throw LayerError(i, "threshold channel count mismatch");
}

}  // namespace binfer
