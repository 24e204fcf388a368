#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <vector>

#include "depdisc/error.hpp"

namespace depdisc {

/// Set of attribute (column) indices, packed into one machine word.
/// Relations are capped at 64 columns so every set fits.
class AttributeSet {
 public:
  static constexpr uint32_t kMaxWidth = 64;

  constexpr AttributeSet() = default;

  static AttributeSet single(uint32_t index) {
    AttributeSet s;
    s.set(index);
    return s;
  }

  static AttributeSet of(std::initializer_list<uint32_t> indices) {
    AttributeSet s;
    for (uint32_t i : indices) s.set(i);
    return s;
  }

  /// All attributes below `m`.
  static AttributeSet full(uint32_t m) {
    AttributeSet s;
    s.bits_ = (m >= 64) ? ~uint64_t{0} : ((uint64_t{1} << m) - 1);
    return s;
  }

  void set(uint32_t index) {
    check(index);
    bits_ |= uint64_t{1} << index;
  }

  void reset(uint32_t index) {
    check(index);
    bits_ &= ~(uint64_t{1} << index);
  }

  bool test(uint32_t index) const {
    return index < kMaxWidth && (bits_ >> index) & 1;
  }

  uint32_t count() const { return static_cast<uint32_t>(std::popcount(bits_)); }
  bool empty() const { return bits_ == 0; }
  uint64_t bits() const { return bits_; }

  AttributeSet united(AttributeSet o) const { return from_bits(bits_ | o.bits_); }
  AttributeSet intersect(AttributeSet o) const { return from_bits(bits_ & o.bits_); }
  AttributeSet minus(AttributeSet o) const { return from_bits(bits_ & ~o.bits_); }
  AttributeSet without(uint32_t index) const {
    AttributeSet s = *this;
    s.reset(index);
    return s;
  }
  AttributeSet with(uint32_t index) const {
    AttributeSet s = *this;
    s.set(index);
    return s;
  }

  bool is_subset_of(AttributeSet o) const { return (bits_ & ~o.bits_) == 0; }
  bool intersects(AttributeSet o) const { return (bits_ & o.bits_) != 0; }

  /// Lowest set index; undefined when empty.
  uint32_t lowest() const { return static_cast<uint32_t>(std::countr_zero(bits_)); }
  /// Highest set index; undefined when empty.
  uint32_t highest() const { return 63u - static_cast<uint32_t>(std::countl_zero(bits_)); }

  std::vector<uint32_t> to_indices() const {
    std::vector<uint32_t> out;
    out.reserve(count());
    uint64_t b = bits_;
    while (b) {
      out.push_back(static_cast<uint32_t>(std::countr_zero(b)));
      b &= b - 1;
    }
    return out;
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    uint64_t b = bits_;
    while (b) {
      fn(static_cast<uint32_t>(std::countr_zero(b)));
      b &= b - 1;
    }
  }

  auto operator<=>(const AttributeSet&) const = default;

 private:
  static AttributeSet from_bits(uint64_t bits) {
    AttributeSet s;
    s.bits_ = bits;
    return s;
  }

  static void check(uint32_t index) {
    if (index >= kMaxWidth) throw ContractError("attribute index out of range");
  }

  uint64_t bits_ = 0;
};

struct AttributeSetHash {
  size_t operator()(const AttributeSet& s) const {
    return std::hash<uint64_t>{}(s.bits() * 0x9e3779b97f4a7c15ull);
  }
};

/// Dynamic bitset over an arbitrary-width universe. Used for predicate
/// spaces, where a relation can carry more than 64 predicates.
class Bitset {
 public:
  Bitset() = default;

  explicit Bitset(uint32_t width)
      : width_(width), words_((width + 63) / 64, 0) {}

  uint32_t width() const { return width_; }

  void set(uint32_t index) {
    check(index);
    words_[index >> 6] |= uint64_t{1} << (index & 63);
  }

  void reset(uint32_t index) {
    check(index);
    words_[index >> 6] &= ~(uint64_t{1} << (index & 63));
  }

  bool test(uint32_t index) const {
    return index < width_ && (words_[index >> 6] >> (index & 63)) & 1;
  }

  uint32_t count() const {
    uint32_t c = 0;
    for (uint64_t w : words_) c += static_cast<uint32_t>(std::popcount(w));
    return c;
  }

  bool any() const {
    for (uint64_t w : words_)
      if (w) return true;
    return false;
  }
  bool none() const { return !any(); }

  bool is_subset_of(const Bitset& o) const {
    for (size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & ~o.words_[i]) return false;
    return true;
  }

  bool intersects(const Bitset& o) const {
    for (size_t i = 0; i < words_.size(); ++i)
      if (words_[i] & o.words_[i]) return true;
    return false;
  }

  Bitset united(const Bitset& o) const {
    Bitset r = *this;
    for (size_t i = 0; i < words_.size(); ++i) r.words_[i] |= o.words_[i];
    return r;
  }

  Bitset minus(const Bitset& o) const {
    Bitset r = *this;
    for (size_t i = 0; i < words_.size(); ++i) r.words_[i] &= ~o.words_[i];
    return r;
  }

  /// All universe bits flipped.
  Bitset complement() const {
    Bitset r(width_);
    for (size_t i = 0; i < words_.size(); ++i) r.words_[i] = ~words_[i];
    if (width_ & 63) r.words_.back() &= (uint64_t{1} << (width_ & 63)) - 1;
    return r;
  }

  std::vector<uint32_t> to_indices() const {
    std::vector<uint32_t> out;
    for (size_t wi = 0; wi < words_.size(); ++wi) {
      uint64_t b = words_[wi];
      while (b) {
        out.push_back(static_cast<uint32_t>(wi * 64 + std::countr_zero(b)));
        b &= b - 1;
      }
    }
    return out;
  }

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (size_t wi = 0; wi < words_.size(); ++wi) {
      uint64_t b = words_[wi];
      while (b) {
        fn(static_cast<uint32_t>(wi * 64 + std::countr_zero(b)));
        b &= b - 1;
      }
    }
  }

  bool operator==(const Bitset& o) const {
    return width_ == o.width_ && words_ == o.words_;
  }

  /// Canonical order: width, then words from the low end.
  std::strong_ordering operator<=>(const Bitset& o) const {
    if (auto c = width_ <=> o.width_; c != 0) return c;
    for (size_t i = 0; i < words_.size(); ++i)
      if (auto c = words_[i] <=> o.words_[i]; c != 0) return c;
    return std::strong_ordering::equal;
  }

 private:
  void check(uint32_t index) const {
    if (index >= width_) throw ContractError("bit index out of range");
  }

  uint32_t width_ = 0;
  std::vector<uint64_t> words_;
};

struct BitsetHash {
  size_t operator()(const Bitset& b) const {
    uint64_t h = 0xcbf29ce484222325ull ^ b.width();
    b.for_each([&](uint32_t i) {
      h ^= i + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    });
    return static_cast<size_t>(h);
  }
};

}  // namespace depdisc
