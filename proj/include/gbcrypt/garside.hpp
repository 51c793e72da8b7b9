#pragma once

#include <string>
#include <vector>

#include "gbcrypt/permutation.hpp"
#include "gbcrypt/words.hpp"

namespace gbc {

/// Left normal form Delta^inf * A_1 ... A_k of a braid on `strands` strands.
/// Each A_i is a permutation braid, identified with its permutation.
struct GarsideNormalForm {
  int strands = 2;
  int inf = 0;
  std::vector<Permutation> factors;

  friend bool operator==(const GarsideNormalForm&, const GarsideNormalForm&) = default;
};

/// Computes the left normal form of a word in the Artin generators
/// s_1..s_{n-1} (alphabet size strands - 1).
GarsideNormalForm garside_normal_form(int strands, const Word& w);

/// Canonical Artin word: Delta^inf expanded (Delta^-1 as the inverse of the
/// Delta word), followed by each factor's permutation-braid word.
Word to_word(const GarsideNormalForm& nf);

/// Positive word of a permutation braid: a reduced decomposition into
/// adjacent transpositions, peeling the smallest right descent each time.
Word permutation_braid_word(const Permutation& p);

/// Checks the normal-form invariants: no factor equals the identity or
/// Delta, and every adjacent pair (A, B) is left-weighted, i.e. the starting
/// set of B is contained in the finishing set of A. On failure `why` (if
/// given) receives a description.
bool is_valid(const GarsideNormalForm& nf, std::string* why = nullptr);

/// Starting set {i : p = t_i * q with inv(q) < inv(p)} as a bitmask over i-1.
unsigned starting_set(const Permutation& p);
/// Finishing set {i : p = q * t_i with inv(q) < inv(p)} as a bitmask over i-1.
unsigned finishing_set(const Permutation& p);

}  // namespace gbc
