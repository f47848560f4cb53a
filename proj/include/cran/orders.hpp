#pragma once

// Index sets over users/relays and the permutations used to solve for,
// decode, or encode rate-fronthaul coordinates.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <string>
#include <vector>

#include "cran/prob.hpp"

namespace cran {

/// Subset of {0, ..., n-1} (0-based user or relay indices).
class IndexSet {
 public:
  constexpr IndexSet() = default;
  IndexSet(std::initializer_list<std::size_t> members) {
    for (auto m : members) bits_ |= std::uint32_t{1} << m;
  }

  static constexpr IndexSet from_bits(std::uint32_t bits) {
    IndexSet s;
    s.bits_ = bits;
    return s;
  }
  static constexpr IndexSet full(std::size_t n) { return from_bits((std::uint32_t{1} << n) - 1); }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr bool contains(std::size_t i) const { return (bits_ >> i) & 1U; }
  constexpr std::size_t count() const { return static_cast<std::size_t>(std::popcount(bits_)); }
  constexpr IndexSet with(std::size_t i) const { return from_bits(bits_ | (std::uint32_t{1} << i)); }
  constexpr IndexSet without(std::size_t i) const { return from_bits(bits_ & ~(std::uint32_t{1} << i)); }
  constexpr IndexSet complement(std::size_t n) const { return from_bits(full(n).bits_ & ~bits_); }
  constexpr bool subset_of(IndexSet o) const { return (bits_ & ~o.bits_) == 0; }

  constexpr IndexSet operator|(IndexSet o) const { return from_bits(bits_ | o.bits_); }
  constexpr IndexSet operator&(IndexSet o) const { return from_bits(bits_ & o.bits_); }
  constexpr IndexSet operator-(IndexSet o) const { return from_bits(bits_ & ~o.bits_); }
  constexpr bool operator==(const IndexSet&) const = default;

  std::vector<std::size_t> members() const {
    std::vector<std::size_t> out;
    for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(b)));
    return out;
  }

  /// "{1,3}" using 1-based labels.
  std::string str() const {
    std::string out = "{";
    for (auto m : members()) {
      if (out.size() > 1) out += ",";
      out += std::to_string(m + 1);
    }
    return out + "}";
  }

 private:
  std::uint32_t bits_ = 0;
};

/// All subsets of `universe`, including the empty set and `universe` itself.
inline std::vector<IndexSet> subsets_of(IndexSet universe) {
  std::vector<IndexSet> out;
  const std::uint32_t u = universe.bits();
  std::uint32_t s = 0;
  do {
    out.push_back(IndexSet::from_bits(s));
    s = (s - u) & u;
  } while (s != 0);
  return out;
}

enum class Side { User, Relay };

/// One user-side or relay-side slot. `index` is 0-based.
struct Element {
  Side side = Side::User;
  std::size_t index = 0;
  constexpr bool operator==(const Element&) const = default;
};

struct SolveTag {
  static std::string label(Element e) { return (e.side == Side::User ? "R" : "C") + std::to_string(e.index + 1); }
};
struct DecodeTag {
  static std::string label(Element e) { return (e.side == Side::User ? "X" : "Yhat") + std::to_string(e.index + 1); }
};
struct EncodeTag {
  static std::string label(Element e) { return (e.side == Side::User ? "U" : "X") + std::to_string(e.index + 1); }
};

/// A permutation of the K user elements and L relay elements.
///
/// As a SolveOrder the elements are the coordinates R_1..R_K, C_1..C_L in the
/// order they are fixed; as a DecodeOrder they are X_1..X_K, Yhat_1..Yhat_L in
/// the order the central processor decodes them; as an EncodeOrder they are
/// U_1..U_K, X_1..X_L in encoding order.
template <class Tag>
class ElementOrder {
 public:
  ElementOrder(std::vector<Element> sequence, std::size_t users, std::size_t relays)
      : seq_(std::move(sequence)), users_(users), relays_(relays) {
    if (seq_.size() != users + relays) throw SpecError("order must contain exactly K+L elements");
    IndexSet seen_users, seen_relays;
    for (const auto& e : seq_) {
      const bool user = e.side == Side::User;
      const std::size_t bound = user ? users : relays;
      IndexSet& seen = user ? seen_users : seen_relays;
      if (e.index >= bound || seen.contains(e.index)) throw SpecError("order is not a permutation: " + str());
      seen = seen.with(e.index);
    }
  }

  const std::vector<Element>& elements() const { return seq_; }
  std::size_t size() const { return seq_.size(); }
  std::size_t users() const { return users_; }
  std::size_t relays() const { return relays_; }
  const Element& operator[](std::size_t k) const { return seq_[k]; }

  /// Users among the first `k` elements (0-based position k excluded).
  IndexSet users_before(std::size_t k) const { return before(k, Side::User); }
  IndexSet relays_before(std::size_t k) const { return before(k, Side::Relay); }

  std::size_t position_of(Element e) const {
    auto it = std::find(seq_.begin(), seq_.end(), e);
    if (it == seq_.end()) throw SpecError("element not in order");
    return static_cast<std::size_t>(it - seq_.begin());
  }

  /// a_k: 1 for user-side elements, 0 for relay-side elements.
  std::vector<int> side_flags() const {
    std::vector<int> a;
    for (const auto& e : seq_) a.push_back(e.side == Side::User ? 1 : 0);
    return a;
  }

  /// b_k: the 0-based index of each element within its side.
  std::vector<std::size_t> side_indices() const {
    std::vector<std::size_t> b;
    for (const auto& e : seq_) b.push_back(e.index);
    return b;
  }

  std::string str() const {
    std::string out = "(";
    for (std::size_t k = 0; k < seq_.size(); ++k) {
      if (k) out += ",";
      out += Tag::label(seq_[k]);
    }
    return out + ")";
  }

  bool operator==(const ElementOrder&) const = default;

  /// The canonical element list (users first, then relays).
  static std::vector<Element> canonical(std::size_t users, std::size_t relays) {
    std::vector<Element> v;
    for (std::size_t i = 0; i < users; ++i) v.push_back({Side::User, i});
    for (std::size_t j = 0; j < relays; ++j) v.push_back({Side::Relay, j});
    return v;
  }

  /// All (K+L)! orders in lexicographic order of the canonical positions.
  static std::vector<ElementOrder> all(std::size_t users, std::size_t relays) {
    const auto base = canonical(users, relays);
    std::vector<std::size_t> idx(base.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::vector<ElementOrder> out;
    do {
      std::vector<Element> seq;
      for (auto i : idx) seq.push_back(base[i]);
      out.emplace_back(std::move(seq), users, relays);
    } while (std::next_permutation(idx.begin(), idx.end()));
    return out;
  }

 private:
  IndexSet before(std::size_t k, Side side) const {
    IndexSet s;
    for (std::size_t i = 0; i < k && i < seq_.size(); ++i) {
      if (seq_[i].side == side) s = s.with(seq_[i].index);
    }
    return s;
  }

  std::vector<Element> seq_;
  std::size_t users_ = 0;
  std::size_t relays_ = 0;
};

using SolveOrder = ElementOrder<SolveTag>;
using DecodeOrder = ElementOrder<DecodeTag>;
using EncodeOrder = ElementOrder<EncodeTag>;

/// Parses "(R3,R1,C2)"-style strings; accepts the labels of the given tag.
template <class Tag>
ElementOrder<Tag> parse_order(const std::string& text, std::size_t users, std::size_t relays) {
  std::vector<Element> seq;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    bool matched = false;
    for (Side side : {Side::User, Side::Relay}) {
      const std::size_t n = side == Side::User ? users : relays;
      for (std::size_t i = 0; i < n && !matched; ++i) {
        if (Tag::label({side, i}) == token) {
          seq.push_back({side, i});
          matched = true;
        }
      }
    }
    if (!matched) throw SpecError("unknown order element '" + token + "'");
    token.clear();
  };
  for (char ch : text) {
    if (ch == '(' || ch == ')' || ch == ' ') continue;
    if (ch == ',') {
      flush();
      continue;
    }
    token += ch;
  }
  flush();
  return ElementOrder<Tag>(std::move(seq), users, relays);
}

}  // namespace cran
