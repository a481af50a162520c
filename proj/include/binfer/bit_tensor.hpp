#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace binfer {

/// Non-owning view of a packed bit vector. `n` is the logical bit count;
/// bits beyond `n` in the last word must be zero.
struct BitVectorSlice {
  std::span<const std::uint32_t> words;
  int n = 0;
};

/// 3D feature map / filter with 1-bit elements packed along the depth axis.
///
/// Element (w, h, d) is bit (d % 32), LSB first, of word (d / 32) inside the
/// column at row-major position (h, w). Logical +1 is stored as bit 1,
/// logical -1 as bit 0. Padding bits in the last word of every column are
/// kept at zero.
class BitTensor {
 public:
  static constexpr int kWordBits = 32;

  BitTensor() = default;
  BitTensor(int width, int height, int depth);

  int width() const { return width_; }
  int height() const { return height_; }
  int depth() const { return depth_; }
  std::int64_t bit_count() const {
    return std::int64_t(width_) * height_ * depth_;
  }
  bool empty() const { return words_.empty(); }

  int words_per_column() const { return wpc_; }
  std::size_t column_offset(int w, int h) const {
    return (std::size_t(h) * width_ + w) * wpc_;
  }
  const std::uint32_t* column(int w, int h) const {
    return words_.data() + column_offset(w, h);
  }
  std::uint32_t* column(int w, int h) {
    return words_.data() + column_offset(w, h);
  }

  bool get(int w, int h, int d) const {
    return (column(w, h)[d / kWordBits] >> (d % kWordBits)) & 1u;
  }
  void set(int w, int h, int d, bool bit);

  std::span<const std::uint32_t> words() const { return words_; }
  std::span<std::uint32_t> words() { return words_; }

  /// Mask selecting the valid bits of the last word of a column
  /// (all ones when depth is a multiple of 32).
  std::uint32_t tail_mask() const { return tail_mask_; }

  friend bool operator==(const BitTensor&, const BitTensor&) = default;

 private:
  int width_ = 0, height_ = 0, depth_ = 0;
  int wpc_ = 0;
  std::uint32_t tail_mask_ = 0;
  std::vector<std::uint32_t> words_;
};

/// 3D tensor of small signed integers for the first-layer input.
/// Every element must stay within [-31, 31] (6-bit signed range).
class FixedTensor {
 public:
  static constexpr int kMaxAbs = 31;

  FixedTensor() = default;
  FixedTensor(int width, int height, int depth);
  FixedTensor(std::vector<std::int8_t> values, int width, int height,
              int depth);

  int width() const { return width_; }
  int height() const { return height_; }
  int depth() const { return depth_; }

  std::int8_t at(int w, int h, int d) const {
    return v_[(std::size_t(h) * width_ + w) * depth_ + d];
  }
  void set(int w, int h, int d, std::int8_t value);

  std::span<const std::int8_t> values() const { return v_; }

  friend bool operator==(const FixedTensor&, const FixedTensor&) = default;

 private:
  int width_ = 0, height_ = 0, depth_ = 0;
  std::vector<std::int8_t> v_;
};

/// Packs a ±1 vector in (h, w, d) order, depth fastest. Throws
/// std::invalid_argument on a length mismatch or an element outside {-1,+1}.
BitTensor pack(std::span<const std::int8_t> values, int width, int height,
               int depth);

/// Inverse of pack; returns ±1 values in (h, w, d) order.
std::vector<std::int8_t> unpack(const BitTensor& t);

/// Packs a flat ±1 vector into words (LSB first). Convenience for building
/// one-dimensional slices.
std::vector<std::uint32_t> pack_words(std::span<const std::int8_t> values);

/// Whole tensor viewed as one flat bit vector in (h, w, d) order.
/// Repacks unless the tensor has a single column or a depth that is a
/// multiple of 32 (the packed words are already contiguous in that order).
BitTensor flatten(const BitTensor& t);

/// Views a single-column (or 32-aligned) tensor as a flat slice without
/// copying. Throws if the packed words are not contiguous in logical order.
BitVectorSlice as_slice(const BitTensor& t);

/// Number of positions where the two ±1 vectors agree:
/// popcount(~(a ^ w) & validmask). Result is in [0, n].
int xnor_dot(BitVectorSlice a, BitVectorSlice w);

/// Exact integer dot product of small signed values `a` (each in [-31, 31])
/// with ±1 weights. Throws on length mismatch or a weight outside {-1,+1}.
int fixed_dot(std::span<const std::int8_t> a, std::span<const std::int8_t> w);

/// Maps a match count back to the ±1-domain dot product: 2y - cnum.
int compensate(int y, int cnum);

}  // namespace binfer
