#pragma once

#include <cstdint>

namespace binfer {

/// Per-channel batch normalization constants, all fixed at inference time.
struct BatchNormParams {
  double mu = 0.0;
  double sigma2 = 0.0;
  double gamma = 1.0;
  double beta = 0.0;
  double epsilon = 1e-5;
};

/// Comparison direction of a folded threshold. The constant cases arise only
/// when gamma is exactly zero and the normalized output no longer depends on
/// the accumulator.
enum class ThresholdDirection : std::uint8_t {
  kGreaterEqual = 0,
  kLessEqual = 1,
  kConstOne = 2,
  kConstZero = 3,
};

/// One integer comparison constant per output channel: the whole
/// normalize-then-binarize step reduces to `y >= c` (or `y <= c` for a
/// negative scale).
struct FoldedThreshold {
  std::int32_t c = 0;
  ThresholdDirection direction = ThresholdDirection::kGreaterEqual;

  bool apply(std::int64_t y) const {
    switch (direction) {
      case ThresholdDirection::kGreaterEqual: return y >= c;
      case ThresholdDirection::kLessEqual: return y <= c;
      case ThresholdDirection::kConstOne: return true;
      default: return false;
    }
  }

  friend bool operator==(const FoldedThreshold&, const FoldedThreshold&) =
      default;
};

/// Rounds half-away-from-zero and saturates to the int32 range.
std::int32_t round_threshold(double t);

/// Folds batch-norm constants into a threshold on the match-count output of a
/// binary layer with `cnum` taps: c = round((cnum + mu - beta*sqrt(s2+eps)/gamma) / 2).
/// gamma < 0 flips the comparison; gamma == 0 degenerates to a constant bit.
FoldedThreshold fold_binary_layer(const BatchNormParams& p, int cnum);

/// Same fold for the first layer, whose accumulator is already a true dot
/// product: c = round(mu - beta*sqrt(s2+eps)/gamma).
FoldedThreshold fold_first_layer(const BatchNormParams& p);

/// Normalization of the output layer, applied to the compensated value:
/// ((2y - cnum) - mu) / sqrt(sigma2 + epsilon) * gamma + beta.
double final_layer_affine(int y, int cnum, const BatchNormParams& p);

}  // namespace binfer
