#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gbcrypt/garside.hpp"
#include "gbcrypt/permutation.hpp"
#include "gbcrypt/words.hpp"

namespace gbc {

enum class PlatformKind { free_group, symmetric, braid };

/// Which group words are read in. Serialized as `free:r`, `sym:n`, `braid:n`.
struct PlatformDescriptor {
  PlatformKind kind = PlatformKind::free_group;
  int rank = 2;

  static constexpr int kMaxSymmetricDegree = 8;

  static PlatformDescriptor free_group(int rank);
  static PlatformDescriptor symmetric(int n);
  static PlatformDescriptor braid(int n);
  /// Throws ParseError on anything but the three serialized forms.
  static PlatformDescriptor parse(std::string_view text);

  /// Free rank for free groups, n - 1 for S_n and B_n.
  int alphabet_size() const { return kind == PlatformKind::free_group ? rank : rank - 1; }
  std::string to_string() const;

  friend bool operator==(const PlatformDescriptor&, const PlatformDescriptor&) = default;
};

/// The generators g_1..g_r as one-letter words.
std::vector<Word> generators(const PlatformDescriptor& p);

/// Canonical word: equal outputs exactly for equal group elements.
/// Throws std::invalid_argument when `w` is not over p's alphabet.
Word normal_form(const PlatformDescriptor& p, const Word& w);

bool equal(const PlatformDescriptor& p, const Word& u, const Word& v);

/// Projection to S_n for braid and symmetric platforms.
Permutation permutation_image(const PlatformDescriptor& p, const Word& w);

/// Letter count of the canonical word.
std::size_t word_length(const PlatformDescriptor& p, const Word& w);

/// Exact conjugacy search in a free group: some x with x a x^-1 = b, or
/// nothing when the cyclic cores are not rotations of each other.
std::optional<Word> free_conjugacy_search(const Word& a, const Word& b);

/// Exhaustive search over S_n in lexicographic order of one-line notation.
/// Throws std::invalid_argument for n > kMaxSymmetricDegree.
std::optional<Permutation> finite_conjugacy_search(int n, const Permutation& a,
                                                   const Permutation& b);

/// Canonical word of a permutation in the adjacent transpositions.
Word symmetric_word(const Permutation& p);

}  // namespace gbc
