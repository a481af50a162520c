#include "binfer/oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace binfer::oracle {

namespace {

RealTensor to_real(const FixedTensor& t) {
  RealTensor out(t.width(), t.height(), t.depth());
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = t.values()[i];
  return out;
}

RealTensor to_real(const BitTensor& t) {
  RealTensor out(t.width(), t.height(), t.depth());
  std::size_t i = 0;
  for (int h = 0; h < t.height(); ++h)
    for (int w = 0; w < t.width(); ++w)
      for (int d = 0; d < t.depth(); ++d, ++i)
        out.v[i] = t.get(w, h, d) ? 1.0 : -1.0;
  return out;
}

RealTensor flatten_real(const RealTensor& t) {
  RealTensor out(1, 1, t.width * t.height * t.depth);
  out.v = t.v;  // (h, w, d) order is already the flat order
  return out;
}

bool apply_pm1(const FoldedThreshold& t, double y_pm1, int cnum) {
  // Thresholds are folded in the match-count domain; compare in the ±1
  // domain via y_l >= c  <=>  2*y_l - cnum >= 2*c - cnum.
  const double bound = 2.0 * double(t.c) - double(cnum);
  switch (t.direction) {
    case ThresholdDirection::kGreaterEqual: return y_pm1 >= bound;
    case ThresholdDirection::kLessEqual: return y_pm1 <= bound;
    case ThresholdDirection::kConstOne: return true;
    default: return false;
  }
}

}  // namespace

RealTensor conv_real(const RealTensor& fmap, std::span<const RealTensor> filters,
                     double pad_value) {
  if (filters.empty()) throw std::invalid_argument("conv_real: no filters");
  const int fw = filters[0].width, fh = filters[0].height;
  if (fw % 2 == 0 || fh % 2 == 0)
    throw std::invalid_argument("conv_real: filter dims must be odd");
  for (const RealTensor& f : filters)
    if (f.width != fw || f.height != fh || f.depth != fmap.depth)
      throw std::invalid_argument("conv_real: filter dims mismatch");
  const int pw = fw / 2, ph = fh / 2;

  RealTensor out(fmap.width, fmap.height, int(filters.size()));
  for (int oh = 0; oh < fmap.height; ++oh)
    for (int ow = 0; ow < fmap.width; ++ow)
      for (std::size_t f = 0; f < filters.size(); ++f) {
        double acc = 0.0;
        for (int kw = 0; kw < fw; ++kw)
          for (int kh = 0; kh < fh; ++kh)
            for (int d = 0; d < fmap.depth; ++d) {
              const int iw = ow + kw - pw, ih = oh + kh - ph;
              const bool inside = iw >= 0 && iw < fmap.width && ih >= 0 &&
                                  ih < fmap.height;
              const double a = inside ? fmap.at(iw, ih, d) : pad_value;
              acc += filters[f].at(kw, kh, d) * a;
            }
        out.at(ow, oh, int(f)) = acc;
      }
  return out;
}

double batchnorm_real(double y, const BatchNormParams& p) {
  if (!(p.sigma2 + p.epsilon > 0.0))
    throw std::invalid_argument("batchnorm_real: sigma2 + epsilon must be positive");
  return (y - p.mu) / std::sqrt(p.sigma2 + p.epsilon) * p.gamma + p.beta;
}

int binarize_real(double z) { return z >= 0.0 ? 1 : 0; }

int xnor_dot_pm1(std::span<const std::int8_t> a,
                 std::span<const std::int8_t> w) {
  if (a.size() != w.size())
    throw std::invalid_argument("xnor_dot_pm1: length mismatch");
  int acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] != 1 && a[i] != -1) || (w[i] != 1 && w[i] != -1))
      throw std::invalid_argument("xnor_dot_pm1: element is not +1 or -1");
    acc += int(a[i]) * int(w[i]);
  }
  return acc;
}

FoldedThreshold threshold_by_root(const BatchNormParams& p, int cnum,
                                  bool first_layer) {
  if (p.gamma == 0.0)
    return {0, p.beta >= 0.0 ? ThresholdDirection::kConstOne
                             : ThresholdDirection::kConstZero};
  auto z = [&](double y) {
    return batchnorm_real(first_layer ? y : 2.0 * y - double(cnum), p);
  };
  // z is affine in y, so one secant step lands on the exact root.
  const double z0 = z(0.0), z1 = z(1.0);
  const double root = z0 / (z0 - z1);
  return {round_threshold(root), z1 > z0 ? ThresholdDirection::kGreaterEqual
                                         : ThresholdDirection::kLessEqual};
}

RealTensor max_pool_real(const RealTensor& y) {
  if (y.width % 2 != 0 || y.height % 2 != 0)
    throw std::invalid_argument("max_pool_real: odd feature-map dims");
  RealTensor out(y.width / 2, y.height / 2, y.depth);
  for (int oh = 0; oh < out.height; ++oh)
    for (int ow = 0; ow < out.width; ++ow)
      for (int d = 0; d < y.depth; ++d)
        out.at(ow, oh, d) =
            std::max(std::max(y.at(2 * ow, 2 * oh, d), y.at(2 * ow + 1, 2 * oh, d)),
                     std::max(y.at(2 * ow, 2 * oh + 1, d),
                              y.at(2 * ow + 1, 2 * oh + 1, d)));
  return out;
}

ReferenceTrace run_reference(const NetworkSpec& spec,
                             const NetworkWeights& weights, const Model& model,
                             const FixedTensor& input, ThresholdMode mode) {
  ReferenceTrace trace;
  RealTensor act;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    const LayerWeights& lw = weights.layers[i];
    const bool first = l.kind == LayerKind::kConvFirst;
    const bool output = l.kind == LayerKind::kFcOutput;
    const LayerBatchNorm* bn = model.bn_for(i);
    if (!output && !bn) throw LayerError(i, "missing batch-norm parameters");

    std::vector<RealTensor> filters;
    if (first) {
      for (const FixedTensor& f : lw.fixed) filters.push_back(to_real(f));
      act = to_real(input);
    } else {
      for (const BitTensor& f : lw.bits) filters.push_back(to_real(f));
      if (l.is_fc()) act = flatten_real(act);
    }

    RealTensor y = conv_real(act, filters, first ? 0.0 : -1.0);
    if (l.pool_after) y = max_pool_real(y);

    if (output) {
      trace.result.scores.resize(l.n_filters);
      for (int f = 0; f < l.n_filters; ++f)
        trace.result.scores[f] =
            bn ? batchnorm_real(y.at(0, 0, f), bn->channel(f)) : y.at(0, 0, f);
      trace.result.prediction = 0;
      for (int f = 1; f < l.n_filters; ++f)
        if (trace.result.scores[f] >
            trace.result.scores[trace.result.prediction])
          trace.result.prediction = f;
      trace.accum.push_back(std::move(y));
      break;
    }

    // Binarize through per-channel thresholds, either evaluated exactly or
    // re-derived as rounded integers.
    std::vector<FoldedThreshold> rounded;
    if (mode == ThresholdMode::kRounded) {
      rounded.reserve(l.n_filters);
      for (int c = 0; c < l.n_filters; ++c)
        rounded.push_back(threshold_by_root(bn->channel(c), l.cnum(), first));
    }
    RealTensor next(y.width, y.height, y.depth);
    std::vector<std::uint8_t> bits;
    bits.reserve(y.v.size());
    for (int h = 0; h < y.height; ++h)
      for (int w = 0; w < y.width; ++w)
        for (int d = 0; d < y.depth; ++d) {
          int bit;
          if (mode == ThresholdMode::kExact) {
            bit = binarize_real(batchnorm_real(y.at(w, h, d), bn->channel(d)));
          } else if (first) {
            bit = rounded[d].apply(std::llround(y.at(w, h, d))) ? 1 : 0;
          } else {
            bit = apply_pm1(rounded[d], y.at(w, h, d), l.cnum()) ? 1 : 0;
          }
          bits.push_back(std::uint8_t(bit));
          next.at(w, h, d) = bit ? 1.0 : -1.0;
        }
    trace.accum.push_back(std::move(y));
    trace.activations.push_back(std::move(bits));
    act = std::move(next);
  }
  return trace;
}

}  // namespace binfer::oracle
