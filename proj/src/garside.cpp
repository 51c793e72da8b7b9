#include "gbcrypt/garside.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace gbc {

namespace {

/// Moves generators from the front of b to the back of a while that keeps a
/// simple, until S(b) is contained in F(a). Returns whether anything moved.
bool left_weight(Permutation& a, Permutation& b) {
  const int n = a.degree();
  Permutation binv = b.inverse();
  bool moved = false;
  for (;;) {
    int pick = -1;
    for (int i = 0; i + 1 < n; ++i) {
      if (binv.at(i) > binv.at(i + 1) && a.at(i) < a.at(i + 1)) {
        pick = i;
        break;
      }
    }
    if (pick < 0) break;
    a.multiply_right_transposition(pick + 1);
    binv.multiply_right_transposition(pick + 1);
    moved = true;
  }
  if (moved) b = binv.inverse();
  return moved;
}

/// Accumulates Delta^inf * A_1 ... A_k under right multiplication. Factors
/// are kept in a frame twisted by conjugation with Delta when `twisted_` is
/// set, so multiplying by Delta^-1 costs O(1) instead of rewriting every
/// factor.
class NormalFormBuilder {
 public:
  explicit NormalFormBuilder(int strands)
      : strands_(strands), delta_(Permutation::longest(strands)) {}

  void multiply_simple(Permutation s) {
    if (twisted_) s = twist(s);
    if (s.is_identity()) return;
    factors_.push_back(s);
    for (std::size_t j = factors_.size() - 1; j-- > 0;) {
      if (!left_weight(factors_[j], factors_[j + 1])) break;
    }
    while (!factors_.empty() && factors_.front() == delta_) {
      factors_.pop_front();
      ++inf_;
    }
    while (!factors_.empty() && factors_.back().is_identity()) factors_.pop_back();
  }

  /// X * Delta^-1 = Delta^-1 * tau(X), tau(X) = Delta X Delta^-1.
  void multiply_delta_inverse() {
    --inf_;
    twisted_ = !twisted_;
  }

  GarsideNormalForm finish() && {
    GarsideNormalForm nf;
    nf.strands = strands_;
    nf.inf = inf_;
    nf.factors.reserve(factors_.size());
    for (auto& f : factors_) nf.factors.push_back(twisted_ ? twist(f) : f);
    return nf;
  }

 private:
  Permutation twist(const Permutation& p) const { return delta_ * p * delta_; }

  int strands_;
  int inf_ = 0;
  bool twisted_ = false;
  Permutation delta_;
  std::deque<Permutation> factors_;
};

}  // namespace

unsigned starting_set(const Permutation& p) {
  const Permutation inv = p.inverse();
  unsigned mask = 0;
  for (int i = 0; i + 1 < p.degree(); ++i) {
    if (inv.at(i) > inv.at(i + 1)) mask |= 1u << i;
  }
  return mask;
}

unsigned finishing_set(const Permutation& p) {
  unsigned mask = 0;
  for (int i = 0; i + 1 < p.degree(); ++i) {
    if (p.at(i) > p.at(i + 1)) mask |= 1u << i;
  }
  return mask;
}

GarsideNormalForm garside_normal_form(int strands, const Word& w) {
  if (strands < 2) throw std::invalid_argument("braid index must be at least 2");
  if (w.alphabet_size() != strands - 1) {
    throw std::invalid_argument("braid word alphabet " + std::to_string(w.alphabet_size()) +
                                " does not match B_" + std::to_string(strands));
  }
  const Permutation delta = Permutation::longest(strands);
  NormalFormBuilder builder(strands);

  // Maximal runs of same-sign letters that stay simple are multiplied in one
  // go. A negative run s_{i1}^-1 ... s_{ij}^-1 equals X^-1 for a simple X and
  // is applied as Delta^-1 * (Delta X^-1). `run` holds the permutation of the
  // positive run, or of X^-1 for a negative run.
  Permutation run(strands);
  int mode = 0;
  auto flush = [&] {
    if (mode > 0) {
      builder.multiply_simple(run);
    } else if (mode < 0) {
      builder.multiply_delta_inverse();
      builder.multiply_simple(delta * run);
    }
    run = Permutation(strands);
    mode = 0;
  };

  for (const auto& l : w.letters()) {
    const int i = l.generator;
    if (mode != 0 && (mode != l.sign || run.at(i - 1) > run.at(i))) flush();
    mode = l.sign;
    run.multiply_right_transposition(i);
  }
  flush();
  return std::move(builder).finish();
}

Word permutation_braid_word(const Permutation& p) {
  Permutation q = p;
  std::vector<Letter> reversed;
  for (;;) {
    int descent = -1;
    for (int i = 0; i + 1 < q.degree(); ++i) {
      if (q.at(i) > q.at(i + 1)) {
        descent = i;
        break;
      }
    }
    if (descent < 0) break;
    reversed.push_back({descent + 1, 1});
    q.multiply_right_transposition(descent + 1);
  }
  std::reverse(reversed.begin(), reversed.end());
  return Word(std::max(1, p.degree() - 1), std::move(reversed));
}

Word to_word(const GarsideNormalForm& nf) {
  const int alphabet = nf.strands - 1;
  std::vector<Letter> letters;
  if (nf.inf != 0) {
    const Word delta = permutation_braid_word(Permutation::longest(nf.strands));
    const Word block = nf.inf > 0 ? delta : invert(delta);
    const int reps = nf.inf > 0 ? nf.inf : -nf.inf;
    letters.reserve(static_cast<std::size_t>(reps) * block.size());
    for (int r = 0; r < reps; ++r) {
      letters.insert(letters.end(), block.letters().begin(), block.letters().end());
    }
  }
  for (const auto& f : nf.factors) {
    const Word piece = permutation_braid_word(f);
    letters.insert(letters.end(), piece.letters().begin(), piece.letters().end());
  }
  return Word(alphabet, std::move(letters));
}

bool is_valid(const GarsideNormalForm& nf, std::string* why) {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  const Permutation delta = Permutation::longest(nf.strands);
  for (std::size_t i = 0; i < nf.factors.size(); ++i) {
    const auto& f = nf.factors[i];
    if (f.degree() != nf.strands) return fail("factor " + std::to_string(i) + " has wrong degree");
    if (f.is_identity()) return fail("factor " + std::to_string(i) + " is the identity");
    if (f == delta) return fail("factor " + std::to_string(i) + " is Delta");
    if (i > 0) {
      const unsigned start = starting_set(f);
      const unsigned finish = finishing_set(nf.factors[i - 1]);
      if ((start & ~finish) != 0) {
        return fail("factors " + std::to_string(i - 1) + "," + std::to_string(i) +
                    " are not left-weighted");
      }
    }
  }
  return true;
}

}  // namespace gbc
