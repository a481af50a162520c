#include "binfer/fold.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace binfer {

namespace {

void check_params(const BatchNormParams& p) {
  if (!(p.sigma2 >= 0.0))
    throw std::invalid_argument("fold: sigma2 must be nonnegative");
  if (!(p.epsilon > 0.0))
    throw std::invalid_argument("fold: epsilon must be positive");
  if (!std::isfinite(p.mu) || !std::isfinite(p.gamma) || !std::isfinite(p.beta))
    throw std::invalid_argument("fold: parameters must be finite");
}

// Thresholds live in the direct accumulator domain here; the binary-layer
// variant shifts into the match-count domain afterwards.
FoldedThreshold fold_direct(const BatchNormParams& p, double offset,
                            double scale) {
  if (p.gamma == 0.0) {
    return {0, p.beta >= 0.0 ? ThresholdDirection::kConstOne
                             : ThresholdDirection::kConstZero};
  }
  const double sigma = std::sqrt(p.sigma2 + p.epsilon);
  const double t = (offset + p.mu - p.beta * sigma / p.gamma) * scale;
  return {round_threshold(t), p.gamma > 0.0 ? ThresholdDirection::kGreaterEqual
                                            : ThresholdDirection::kLessEqual};
}

}  // namespace

std::int32_t round_threshold(double t) {
  const double r = std::round(t);  // halfway cases away from zero
  if (r <= double(std::numeric_limits<std::int32_t>::min()))
    return std::numeric_limits<std::int32_t>::min();
  if (r >= double(std::numeric_limits<std::int32_t>::max()))
    return std::numeric_limits<std::int32_t>::max();
  return std::int32_t(r);
}

FoldedThreshold fold_binary_layer(const BatchNormParams& p, int cnum) {
  if (cnum <= 0)
    throw std::invalid_argument("fold_binary_layer: cnum must be positive");
  check_params(p);
  return fold_direct(p, double(cnum), 0.5);
}

FoldedThreshold fold_first_layer(const BatchNormParams& p) {
  check_params(p);
  return fold_direct(p, 0.0, 1.0);
}

double final_layer_affine(int y, int cnum, const BatchNormParams& p) {
  if (cnum <= 0)
    throw std::invalid_argument("final_layer_affine: cnum must be positive");
  if (y < 0 || y > cnum)
    throw std::out_of_range("final_layer_affine: y outside [0, cnum]");
  check_params(p);
  const double compensated = double(2 * y - cnum);
  return (compensated - p.mu) / std::sqrt(p.sigma2 + p.epsilon) * p.gamma +
         p.beta;
}

}  // namespace binfer
