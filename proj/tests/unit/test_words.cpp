#include "doctest.h"
#include "gbcrypt/errors.hpp"
#include "gbcrypt/random.hpp"
#include "gbcrypt/words.hpp"
#include "oracles.hpp"

using gbc::Word;

namespace {

oracle::Signed to_signed(const Word& w) {
  oracle::Signed out;
  for (const auto& l : w.letters()) out.push_back(l.sign * l.generator);
  return out;
}

Word from(int r, std::initializer_list<int> s) { return Word::from_signed(r, s); }

Word random_word(std::mt19937_64& rng, int r, std::size_t len) {
  std::uniform_int_distribution<int> g(1, r), sign(0, 1);
  std::vector<int> s;
  for (std::size_t i = 0; i < len; ++i) s.push_back(sign(rng) ? g(rng) : -g(rng));
  return Word::from_signed(r, s);
}

}  // namespace

TEST_CASE("free reduction cancels adjacent inverse pairs") {
  CHECK(gbc::free_reduce(from(2, {1, -1})).empty());
  CHECK(gbc::free_reduce(from(2, {1, 2, -2, 1})) == from(2, {1, 1}));
  CHECK(gbc::free_reduce(from(2, {1, -1})).is_reduced());
  CHECK_FALSE(from(2, {1, -1}).is_reduced());
}

TEST_CASE("free reduction matches the fixpoint oracle on long random words") {
  auto rng = gbc::make_rng({17});
  for (int trial = 0; trial < 200; ++trial) {
    const Word w = random_word(rng, 2, 200);
    const Word r = gbc::free_reduce(w);
    CHECK(to_signed(r) == oracle::naive_reduce(to_signed(w)));
    CHECK(gbc::free_reduce(r) == r);
    CHECK(r.size() <= w.size());
  }
}

TEST_CASE("inversion") {
  CHECK(gbc::invert(from(2, {1, -2})) == from(2, {2, -1}));
  CHECK(gbc::invert(Word(2)).empty());
  auto rng = gbc::make_rng({3});
  for (int i = 0; i < 50; ++i) {
    const Word w = random_word(rng, 3, 30);
    CHECK(gbc::invert(gbc::invert(w)) == w);
    CHECK(gbc::free_reduce(w * gbc::invert(w)).empty());
  }
}

TEST_CASE("group axioms on reduced representatives") {
  auto rng = gbc::make_rng({4});
  for (int i = 0; i < 100; ++i) {
    const Word u = random_word(rng, 3, 10), v = random_word(rng, 3, 10), w = random_word(rng, 3, 10);
    CHECK(gbc::free_reduce(gbc::free_reduce(u * v) * w) == gbc::free_reduce(u * gbc::free_reduce(v * w)));
  }
}

TEST_CASE("conjugation is x a x^-1") {
  CHECK(gbc::conjugate(from(2, {1}), from(2, {2})) == from(2, {2, 1, -2}));
  CHECK(gbc::conjugate(from(2, {1, 2, -2}), Word(2)) == from(2, {1}));
  auto rng = gbc::make_rng({5});
  for (int i = 0; i < 100; ++i) {
    const Word a = random_word(rng, 3, 8), x = random_word(rng, 3, 6), y = random_word(rng, 3, 6);
    CHECK(gbc::conjugate(gbc::conjugate(a, x), gbc::invert(x)) == gbc::free_reduce(a));
    CHECK(gbc::conjugate(a, x * y) == gbc::conjugate(gbc::conjugate(a, y), x));
    CHECK(to_signed(gbc::conjugate(a, x)) == oracle::naive_conjugate(to_signed(a), to_signed(x)));
  }
}

TEST_CASE("cyclic reduction") {
  auto check = [](const Word& w, const Word& core, const Word& conj) {
    const auto r = gbc::cyclic_reduce(w);
    CHECK(r.core == core);
    CHECK(r.conjugator == conj);
    CHECK(gbc::conjugate(r.core, r.conjugator) == w);
  };
  check(from(3, {2, 1, -2}), from(3, {1}), from(3, {2}));
  check(from(3, {1, 2}), from(3, {1, 2}), Word(3));
  check(from(3, {3, 2, 1, -2, -3}), from(3, {1}), from(3, {3, 2}));

  auto rng = gbc::make_rng({6});
  for (int i = 0; i < 200; ++i) {
    const Word w = gbc::free_reduce(random_word(rng, 2, 12));
    const auto r = gbc::cyclic_reduce(w);
    CHECK(gbc::conjugate(r.core, r.conjugator) == w);
    if (r.core.size() > 1) CHECK(r.core[0] != r.core[r.core.size() - 1].inverse());
  }
}

TEST_CASE("substitution") {
  const Word u = from(3, {1, 2}), v = from(3, {3});
  CHECK(gbc::substitute(from(2, {1, -2}), std::vector<Word>{u, v}) == from(3, {1, 2, -3}));
  CHECK(gbc::substitute(Word(2), std::vector<Word>{u, v}).empty());
  CHECK_THROWS_AS(gbc::substitute(from(3, {1}), std::vector<Word>{u, v}), std::invalid_argument);

  // x(b_1^y, ..., b_m^y) = y x(b) y^-1
  auto rng = gbc::make_rng({7});
  for (int i = 0; i < 50; ++i) {
    std::vector<Word> b, by;
    const Word y = random_word(rng, 4, 5);
    for (int j = 0; j < 3; ++j) {
      b.push_back(random_word(rng, 4, 4));
      by.push_back(gbc::conjugate(b.back(), y));
    }
    const Word x = random_word(rng, 3, 6);
    CHECK(gbc::substitute(x, by) == gbc::conjugate(gbc::substitute(x, b), y));
  }
}

TEST_CASE("text format round trip and strict parsing") {
  const Word w = from(3, {1, -2, 3});
  CHECK(gbc::format_word(w) == "g1 g2^-1 g3");
  CHECK(gbc::parse_word("g1 g2^-1 g3", 3) == w);
  CHECK(gbc::parse_word("", 3).empty());
  CHECK(gbc::format_word(Word(3)).empty());
  CHECK_THROWS_AS(gbc::parse_word("g4", 3), gbc::ParseError);
  CHECK_THROWS_AS(gbc::parse_word("g0", 3), gbc::ParseError);
  CHECK_THROWS_AS(gbc::parse_word("x1", 3), gbc::ParseError);
  CHECK_THROWS_AS(gbc::parse_word("g1^2", 3), gbc::ParseError);
  CHECK_THROWS_AS(gbc::parse_word("g", 3), gbc::ParseError);
}

TEST_CASE("alphabet mismatch is rejected") {
  CHECK_THROWS_AS(from(2, {1}) * from(3, {1}), std::invalid_argument);
  CHECK_THROWS_AS(from(2, {3}), std::invalid_argument);
}

TEST_CASE("random reduced words are reduced and of exact length") {
  auto rng = gbc::make_rng({8});
  for (int i = 0; i < 10000; ++i) {
    const Word w = gbc::random_reduced_word(rng, 3, 7);
    REQUIRE(w.size() == 7);
    CHECK(oracle::naive_reduce(to_signed(w)).size() == 7);
  }
  const std::vector<int> pool{2, 3};
  for (int i = 0; i < 100; ++i) {
    const Word w = gbc::random_reduced_word(rng, 4, 9, pool);
    for (const auto& l : w.letters()) CHECK(l.generator >= 2);
  }
}
