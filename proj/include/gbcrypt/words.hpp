#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gbc {

/// One signed generator g_i^{+-1}. Generators are 1-based.
struct Letter {
  int generator = 1;
  int sign = 1;

  constexpr Letter inverse() const { return {generator, -sign}; }

  /// Dense code used for enumeration order: g1, g1^-1, g2, g2^-1, ...
  constexpr int code() const { return 2 * (generator - 1) + (sign < 0 ? 1 : 0); }
  static constexpr Letter from_code(int code) {
    return {code / 2 + 1, (code & 1) ? -1 : 1};
  }

  friend constexpr bool operator==(Letter, Letter) = default;
  friend constexpr auto operator<=>(Letter a, Letter b) { return a.code() <=> b.code(); }
};

/// A word over the alphabet g_1..g_r and their inverses. The empty word is
/// the identity on every platform.
class Word {
 public:
  Word() = default;
  explicit Word(int alphabet_size);
  Word(int alphabet_size, std::vector<Letter> letters);

  /// Builds a word from signed indices, e.g. {1, -2} is g1 g2^-1.
  static Word from_signed(int alphabet_size, std::span<const int> signed_indices);
  static Word from_signed(int alphabet_size, std::initializer_list<int> signed_indices) {
    return from_signed(alphabet_size, std::span<const int>(signed_indices.begin(), signed_indices.size()));
  }

  int alphabet_size() const { return alphabet_size_; }
  std::size_t size() const { return letters_.size(); }
  bool empty() const { return letters_.empty(); }
  std::span<const Letter> letters() const { return letters_; }
  const Letter& operator[](std::size_t i) const { return letters_[i]; }

  /// Set only by free_reduce (and operations built on it).
  bool is_reduced() const { return reduced_; }

  void push_back(Letter l);

  /// Concatenation, no cancellation.
  friend Word operator*(const Word& u, const Word& v);

  friend bool operator==(const Word& u, const Word& v) {
    return u.alphabet_size_ == v.alphabet_size_ && u.letters_ == v.letters_;
  }

 private:
  friend Word free_reduce(const Word&);

  int alphabet_size_ = 1;
  std::vector<Letter> letters_;
  bool reduced_ = true;
};

Word free_reduce(const Word& w);
Word invert(const Word& w);

/// a^x = x a x^-1, freely reduced.
Word conjugate(const Word& a, const Word& x);

struct CyclicReduction {
  Word core;
  Word conjugator;
};

/// Splits a freely reduced w as conjugator * core * conjugator^-1 with core
/// cyclically reduced.
CyclicReduction cyclic_reduce(const Word& w);

/// Replaces each letter (i, s) of `pattern` by images[i-1]^s and freely
/// reduces. Throws std::invalid_argument when the pattern alphabet does not
/// match images.size() or the images disagree on their alphabet.
Word substitute(const Word& pattern, std::span<const Word> images);

/// Textual form: `g1 g2^-1 g1`; the identity is the empty string.
std::string format_word(const Word& w);

/// Strict inverse of format_word. Throws ParseError on unknown tokens or
/// generator indices beyond `alphabet_size`.
Word parse_word(std::string_view text, int alphabet_size);

/// Uniform sample among freely reduced words of exactly `length` letters
/// whose generators are drawn from `generators` (all of 1..alphabet_size
/// when empty).
Word random_reduced_word(std::mt19937_64& rng, int alphabet_size, std::size_t length,
                         std::span<const int> generators = {});

}  // namespace gbc
