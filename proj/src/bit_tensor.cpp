#include "binfer/bit_tensor.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace binfer {

namespace {

std::uint32_t mask_for(int nbits) {
  const int rem = nbits % 32;
  return rem == 0 ? 0xffffffffu : ((1u << rem) - 1u);
}

}  // namespace

BitTensor::BitTensor(int width, int height, int depth)
    : width_(width), height_(height), depth_(depth) {
  if (width <= 0 || height <= 0 || depth <= 0)
    throw std::invalid_argument("BitTensor: dimensions must be positive");
  wpc_ = (depth + kWordBits - 1) / kWordBits;
  tail_mask_ = mask_for(depth);
  words_.assign(std::size_t(width) * height * wpc_, 0u);
}

void BitTensor::set(int w, int h, int d, bool bit) {
  std::uint32_t& word = column(w, h)[d / kWordBits];
  const std::uint32_t m = 1u << (d % kWordBits);
  word = bit ? (word | m) : (word & ~m);
}

FixedTensor::FixedTensor(int width, int height, int depth)
    : width_(width), height_(height), depth_(depth) {
  if (width <= 0 || height <= 0 || depth <= 0)
    throw std::invalid_argument("FixedTensor: dimensions must be positive");
  v_.assign(std::size_t(width) * height * depth, 0);
}

FixedTensor::FixedTensor(std::vector<std::int8_t> values, int width,
                         int height, int depth)
    : FixedTensor(width, height, depth) {
  if (values.size() != v_.size())
    throw std::invalid_argument(
        "FixedTensor: value count does not match dimensions");
  for (std::int8_t v : values)
    if (v < -kMaxAbs || v > kMaxAbs)
      throw std::invalid_argument("FixedTensor: element outside [-31, 31]");
  v_ = std::move(values);
}

void FixedTensor::set(int w, int h, int d, std::int8_t value) {
  if (value < -kMaxAbs || value > kMaxAbs)
    throw std::invalid_argument("FixedTensor: element outside [-31, 31]");
  v_[(std::size_t(h) * width_ + w) * depth_ + d] = value;
}

BitTensor pack(std::span<const std::int8_t> values, int width, int height,
               int depth) {
  if (std::int64_t(values.size()) != std::int64_t(width) * height * depth)
    throw std::invalid_argument(
        "pack: value count does not match width*height*depth");
  BitTensor t(width, height, depth);
  std::size_t i = 0;
  for (int h = 0; h < height; ++h)
    for (int w = 0; w < width; ++w) {
      std::uint32_t* col = t.column(w, h);
      for (int d = 0; d < depth; ++d, ++i) {
        const std::int8_t v = values[i];
        if (v != 1 && v != -1)
          throw std::invalid_argument("pack: element " + std::to_string(i) +
                                      " is not +1 or -1");
        if (v == 1) col[d / 32] |= 1u << (d % 32);
      }
    }
  return t;
}

std::vector<std::int8_t> unpack(const BitTensor& t) {
  std::vector<std::int8_t> out;
  out.reserve(std::size_t(t.bit_count()));
  for (int h = 0; h < t.height(); ++h)
    for (int w = 0; w < t.width(); ++w)
      for (int d = 0; d < t.depth(); ++d)
        out.push_back(t.get(w, h, d) ? 1 : -1);
  return out;
}

std::vector<std::uint32_t> pack_words(std::span<const std::int8_t> values) {
  std::vector<std::uint32_t> words((values.size() + 31) / 32, 0u);
  for (std::size_t i = 0; i < values.size(); ++i) {
    const std::int8_t v = values[i];
    if (v != 1 && v != -1)
      throw std::invalid_argument("pack_words: element is not +1 or -1");
    if (v == 1) words[i / 32] |= 1u << (i % 32);
  }
  return words;
}

BitTensor flatten(const BitTensor& t) {
  const int n = int(t.bit_count());
  BitTensor flat(1, 1, n);
  if (t.width() * t.height() == 1 || t.depth() % 32 == 0) {
    auto src = t.words();
    std::copy(src.begin(), src.end(), flat.words().begin());
    return flat;
  }
  int i = 0;
  for (int h = 0; h < t.height(); ++h)
    for (int w = 0; w < t.width(); ++w)
      for (int d = 0; d < t.depth(); ++d, ++i)
        if (t.get(w, h, d)) flat.set(0, 0, i, true);
  return flat;
}

BitVectorSlice as_slice(const BitTensor& t) {
  if (t.width() * t.height() != 1 && t.depth() % 32 != 0)
    throw std::invalid_argument(
        "as_slice: packed words are not contiguous; flatten first");
  return BitVectorSlice{t.words(), int(t.bit_count())};
}

int xnor_dot(BitVectorSlice a, BitVectorSlice w) {
  if (a.n != w.n)
    throw std::invalid_argument("xnor_dot: length mismatch (" +
                                std::to_string(a.n) + " vs " +
                                std::to_string(w.n) + ")");
  if (a.n == 0) return 0;
  const std::size_t nwords = std::size_t(a.n + 31) / 32;
  if (a.words.size() < nwords || w.words.size() < nwords)
    throw std::invalid_argument("xnor_dot: backing storage too short");
  int matches = 0;
  for (std::size_t i = 0; i + 1 < nwords; ++i)
    matches += std::popcount(~(a.words[i] ^ w.words[i]));
  matches += std::popcount(~(a.words[nwords - 1] ^ w.words[nwords - 1]) &
                           mask_for(a.n));
  return matches;
}

int fixed_dot(std::span<const std::int8_t> a, std::span<const std::int8_t> w) {
  if (a.size() != w.size())
    throw std::invalid_argument("fixed_dot: length mismatch");
  int acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (w[i] != 1 && w[i] != -1)
      throw std::invalid_argument("fixed_dot: weight is not +1 or -1");
    acc += w[i] == 1 ? a[i] : -a[i];
  }
  return acc;
}

int compensate(int y, int cnum) {
  if (cnum <= 0) throw std::invalid_argument("compensate: cnum must be positive");
  if (y < 0 || y > cnum)
    throw std::out_of_range("compensate: y=" + std::to_string(y) +
                            " outside [0, " + std::to_string(cnum) + "]");
  return 2 * y - cnum;
}

}  // namespace binfer
