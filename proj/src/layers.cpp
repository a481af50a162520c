#include "binfer/layers.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace binfer {

namespace {

// Zero-filled border of one pixel; encoded bit 0 is -1 in the ±1 domain.
BitTensor pad_one(const BitTensor& in) {
  BitTensor out(in.width() + 2, in.height() + 2, in.depth());
  for (int h = 0; h < in.height(); ++h)
    for (int w = 0; w < in.width(); ++w)
      std::copy_n(in.column(w, h), in.words_per_column(),
                  out.column(w + 1, h + 1));
  return out;
}

void check_filters(const BitTensor& input, std::span<const BitTensor> filters) {
  if (filters.empty())
    throw std::invalid_argument("conv_binary: no filters");
  for (const BitTensor& f : filters)
    if (f.depth() != input.depth() || f.width() != filters[0].width() ||
        f.height() != filters[0].height())
      throw std::invalid_argument("conv_binary: filter dims mismatch");
}

}  // namespace

IntFeatureMap conv_first(const FixedTensor& input,
                         std::span<const FixedTensor> filters) {
  if (filters.empty())
    throw std::invalid_argument("conv_first: no filters");
  const int fw = filters[0].width(), fh = filters[0].height();
  const int depth = input.depth();
  for (const FixedTensor& f : filters)
    if (f.width() != fw || f.height() != fh || f.depth() != depth)
      throw std::invalid_argument("conv_first: filter dims mismatch");
  const int pw = fw / 2, ph = fh / 2;

  IntFeatureMap out(input.width(), input.height(), int(filters.size()));
  for (int oh = 0; oh < input.height(); ++oh)
    for (int ow = 0; ow < input.width(); ++ow)
      for (std::size_t f = 0; f < filters.size(); ++f) {
        std::int32_t acc = 0;
        for (int kh = 0; kh < fh; ++kh) {
          const int ih = oh + kh - ph;
          if (ih < 0 || ih >= input.height()) continue;  // zero padding
          for (int kw = 0; kw < fw; ++kw) {
            const int iw = ow + kw - pw;
            if (iw < 0 || iw >= input.width()) continue;
            for (int d = 0; d < depth; ++d) {
              const std::int8_t w = filters[f].at(kw, kh, d);
              const std::int8_t a = input.at(iw, ih, d);
              acc += w == 1 ? a : -a;
            }
          }
        }
        out.at(ow, oh, int(f)) = acc;
      }
  return out;
}

IntFeatureMap conv_binary(const BitTensor& input,
                          std::span<const BitTensor> filters) {
  check_filters(input, filters);
  const int fw = filters[0].width(), fh = filters[0].height();
  const int nf = int(filters.size());
  const int wpc = input.words_per_column();
  const int taps = fw * fh;

  // Filter bank laid out (tap, word, filter) so the inner loop over filters
  // streams contiguously. Filter words are pre-complemented: XNOR with the
  // input word becomes a single XOR.
  std::vector<std::uint32_t> bank(std::size_t(taps) * wpc * nf);
  for (int kh = 0; kh < fh; ++kh)
    for (int kw = 0; kw < fw; ++kw)
      for (int w = 0; w < wpc; ++w)
        for (int f = 0; f < nf; ++f)
          bank[((std::size_t(kh) * fw + kw) * wpc + w) * nf + f] =
              ~filters[f].column(kw, kh)[w];

  // Per-word masks keep padding bits (zero in both operands, so their XNOR
  // would count as a match) out of the popcounts.
  std::vector<std::uint32_t> masks(wpc, 0xffffffffu);
  masks[wpc - 1] = input.tail_mask();

  const BitTensor padded = pad_one(input);
  IntFeatureMap out(input.width(), input.height(), nf);
  std::vector<std::int32_t> acc(nf);
  for (int oh = 0; oh < input.height(); ++oh)
    for (int ow = 0; ow < input.width(); ++ow) {
      std::fill(acc.begin(), acc.end(), 0);
      for (int kh = 0; kh < fh; ++kh)
        for (int kw = 0; kw < fw; ++kw) {
          const std::uint32_t* icol = padded.column(ow + kw, oh + kh);
          const std::uint32_t* frow =
              bank.data() + (std::size_t(kh) * fw + kw) * wpc * nf;
          for (int w = 0; w < wpc; ++w) {
            const std::uint32_t iw = icol[w];
            const std::uint32_t mask = masks[w];
            const std::uint32_t* fword = frow + std::size_t(w) * nf;
            for (int f = 0; f < nf; ++f)
              acc[f] += std::popcount((iw ^ fword[f]) & mask);
          }
        }
      std::int32_t* dst = &out.at(ow, oh, 0);
      std::copy(acc.begin(), acc.end(), dst);
    }
  return out;
}

IntFeatureMap max_pool(const IntFeatureMap& y) {
  if (y.width % 2 != 0 || y.height % 2 != 0)
    throw std::invalid_argument("max_pool: odd feature-map dims");
  IntFeatureMap out(y.width / 2, y.height / 2, y.depth);
  for (int oh = 0; oh < out.height; ++oh)
    for (int ow = 0; ow < out.width; ++ow)
      for (int d = 0; d < y.depth; ++d) {
        const std::int32_t a = y.at(2 * ow, 2 * oh, d);
        const std::int32_t b = y.at(2 * ow + 1, 2 * oh, d);
        const std::int32_t c = y.at(2 * ow, 2 * oh + 1, d);
        const std::int32_t e = y.at(2 * ow + 1, 2 * oh + 1, d);
        out.at(ow, oh, d) = std::max(std::max(a, b), std::max(c, e));
      }
  return out;
}

BitTensor norm_binarize(const IntFeatureMap& y,
                        std::span<const FoldedThreshold> thresholds) {
  if (int(thresholds.size()) != y.depth)
    throw std::invalid_argument("norm_binarize: threshold channel count " +
                                std::to_string(thresholds.size()) +
                                " does not match depth " +
                                std::to_string(y.depth));
  BitTensor out(y.width, y.height, y.depth);
  for (int h = 0; h < y.height; ++h)
    for (int w = 0; w < y.width; ++w) {
      std::uint32_t* col = out.column(w, h);
      for (int d = 0; d < y.depth; ++d)
        if (thresholds[d].apply(y.at(w, h, d))) col[d / 32] |= 1u << (d % 32);
    }
  return out;
}

BitTensor fc_binary(const BitTensor& input, std::span<const BitTensor> weights,
                    std::span<const FoldedThreshold> thresholds) {
  if (weights.size() != thresholds.size())
    throw std::invalid_argument("fc_binary: weight/threshold count mismatch");
  const BitVectorSlice in = as_slice(input);
  IntFeatureMap y(1, 1, int(weights.size()));
  for (std::size_t f = 0; f < weights.size(); ++f) {
    const BitVectorSlice row = as_slice(weights[f]);
    if (row.n != in.n)
      throw std::invalid_argument("fc_binary: input length " +
                                  std::to_string(in.n) +
                                  " does not match weight row length " +
                                  std::to_string(row.n));
    y.at(0, 0, int(f)) = xnor_dot(in, row);
  }
  return norm_binarize(y, thresholds);
}

InferenceResult classify(const BitTensor& input,
                         std::span<const BitTensor> weights,
                         const LayerBatchNorm* bn) {
  if (weights.empty()) throw std::invalid_argument("classify: no weights");
  if (bn && bn->channels() != weights.size())
    throw std::invalid_argument("classify: bn channel count mismatch");
  const BitVectorSlice in = as_slice(input);
  InferenceResult result;
  result.scores.resize(weights.size());
  for (std::size_t f = 0; f < weights.size(); ++f) {
    const BitVectorSlice row = as_slice(weights[f]);
    const int y = xnor_dot(in, row);
    result.scores[f] = bn ? final_layer_affine(y, in.n, bn->channel(f))
                          : double(compensate(y, in.n));
  }
  for (std::size_t f = 1; f < result.scores.size(); ++f)
    if (result.scores[f] > result.scores[result.prediction])
      result.prediction = int(f);
  return result;
}

InferenceResult run_network(const NetworkSpec& spec,
                            const NetworkWeights& weights,
                            const ThresholdTable& thresholds,
                            const LayerBatchNorm* output_bn,
                            const FixedTensor& input,
                            InferenceTrace* trace) {
  if (input.width() != spec.input.w || input.height() != spec.input.h ||
      input.depth() != spec.input.d)
    throw std::invalid_argument("run_network: input dims mismatch");

  BitTensor act;
  InferenceResult result;
  for (std::size_t i = 0; i < spec.layers.size(); ++i) {
    const LayerSpec& l = spec.layers[i];
    if (i >= weights.layers.size()) throw LayerError(i, "missing weights");
    if (l.kind != LayerKind::kFcOutput && i >= thresholds.layers.size())
      throw LayerError(i, "missing thresholds");
    const LayerWeights& lw = weights.layers[i];
    if (l.kind == LayerKind::kConvFirst) {
      IntFeatureMap y = conv_first(input, lw.fixed);
      if (l.pool_after) y = max_pool(y);
      act = norm_binarize(y, thresholds.layers[i]);
      if (trace) trace->accum.push_back(std::move(y));
    } else if (l.kind == LayerKind::kConvBinary) {
      IntFeatureMap y = conv_binary(act, lw.bits);
      if (l.pool_after) y = max_pool(y);
      act = norm_binarize(y, thresholds.layers[i]);
      if (trace) trace->accum.push_back(std::move(y));
    } else {
      const BitTensor flat = flatten(act);
      if (int(flat.bit_count()) != l.filter_d)
        throw LayerError(i, "flattened input length " +
                                std::to_string(flat.bit_count()) +
                                " does not match fc width " +
                                std::to_string(l.filter_d));
      if (l.kind == LayerKind::kFcBinary) {
        act = fc_binary(flat, lw.bits, thresholds.layers[i]);
        if (trace) {
          IntFeatureMap y(1, 1, l.n_filters);
          const BitVectorSlice in = as_slice(flat);
          for (int f = 0; f < l.n_filters; ++f)
            y.at(0, 0, f) = xnor_dot(in, as_slice(lw.bits[f]));
          trace->accum.push_back(std::move(y));
        }
      } else {
        result = classify(flat, lw.bits, output_bn);
        break;
      }
    }
    if (trace) trace->activations.push_back(act);
  }
  return result;
}

}  // namespace binfer
