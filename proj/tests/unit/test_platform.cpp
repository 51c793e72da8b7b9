#include <map>

#include "doctest.h"
#include "gbcrypt/errors.hpp"
#include "gbcrypt/garside.hpp"
#include "gbcrypt/platform.hpp"
#include "gbcrypt/random.hpp"
#include "oracles.hpp"

using gbc::Permutation;
using gbc::PlatformDescriptor;
using gbc::Word;

namespace {

oracle::Signed to_signed(const Word& w) {
  oracle::Signed out;
  for (const auto& l : w.letters()) out.push_back(l.sign * l.generator);
  return out;
}

Word random_word(std::mt19937_64& rng, int r, std::size_t len) {
  std::uniform_int_distribution<int> g(1, r), sign(0, 1);
  std::vector<int> s;
  for (std::size_t i = 0; i < len; ++i) s.push_back(sign(rng) ? g(rng) : -g(rng));
  return Word::from_signed(r, s);
}

}  // namespace

TEST_CASE("permutations compose as functions") {
  const auto t1 = Permutation::transposition(3, 1), t2 = Permutation::transposition(3, 2);
  const auto p = t1 * t2;
  CHECK(p(1) == t1(t2(1)));
  CHECK(p(3) == 1);
  CHECK((p * p.inverse()).is_identity());
  CHECK(Permutation::longest(4).inversions() == 6);
  CHECK(Permutation::from_images({2, 1, 3}).cycle_string() == "(1 2)");
  CHECK(Permutation(3).cycle_string() == "()");
  CHECK_THROWS_AS(Permutation::from_images({1, 1, 3}), std::invalid_argument);
}

TEST_CASE("platform descriptors") {
  CHECK(PlatformDescriptor::parse("braid:4").alphabet_size() == 3);
  CHECK(PlatformDescriptor::parse("sym:5").alphabet_size() == 4);
  CHECK(PlatformDescriptor::parse("free:2").alphabet_size() == 2);
  CHECK(PlatformDescriptor::parse("braid:7").to_string() == "braid:7");
  CHECK_THROWS_AS(PlatformDescriptor::parse("braid:1"), gbc::ParseError);
  CHECK_THROWS_AS(PlatformDescriptor::parse("sym:9"), gbc::ParseError);
  CHECK_THROWS_AS(PlatformDescriptor::parse("braid:33"), gbc::ParseError);
  CHECK_THROWS_AS(PlatformDescriptor::parse("cube:3"), gbc::ParseError);
  CHECK_THROWS_AS(PlatformDescriptor::parse("braid:x"), gbc::ParseError);
  CHECK_THROWS_AS(PlatformDescriptor::parse("braid"), gbc::ParseError);
}

TEST_CASE("braid normal form respects the defining relations") {
  const auto b3 = PlatformDescriptor::braid(3), b4 = PlatformDescriptor::braid(4);
  CHECK(gbc::normal_form(b3, Word::from_signed(2, {1, 2, 1})) == gbc::normal_form(b3, Word::from_signed(2, {2, 1, 2})));
  CHECK(gbc::normal_form(b4, Word::from_signed(3, {1, 3})) == gbc::normal_form(b4, Word::from_signed(3, {3, 1})));
  CHECK(gbc::equal(b3, Word::from_signed(2, {1, -1}), Word(2)));
  CHECK_FALSE(gbc::equal(b3, Word::from_signed(2, {1}), Word::from_signed(2, {2})));
  CHECK_THROWS_AS(gbc::normal_form(b3, Word::from_signed(3, {3})), std::invalid_argument);
}

TEST_CASE("inverse generator normal form") {
  // Delta s_1^-1 = s_1 s_2, so s_1^-1 = Delta^-1 s_1 s_2.
  const auto nf = gbc::garside_normal_form(3, Word::from_signed(2, {-1}));
  CHECK(nf.inf == -1);
  REQUIRE(nf.factors.size() == 1);
  CHECK(nf.factors[0] == gbc::permutation_image(PlatformDescriptor::braid(3), Word::from_signed(2, {1, 2})));
  // The same element, reached by rewriting.
  const auto b3 = PlatformDescriptor::braid(3);
  CHECK(gbc::equal(b3, Word::from_signed(2, {-1}), Word::from_signed(2, {-1, -2, -1, 1, 2})));
}

TEST_CASE("permutation image") {
  const auto b3 = PlatformDescriptor::braid(3);
  CHECK(gbc::permutation_image(b3, Word::from_signed(2, {1})) == Permutation::transposition(3, 1));
  CHECK(gbc::permutation_image(b3, Word::from_signed(2, {1, -1})).is_identity());
  CHECK(gbc::permutation_image(b3, Word::from_signed(2, {1, 2, 1})) == Permutation::from_images({3, 2, 1}));
  CHECK(gbc::permutation_image(b3, Word::from_signed(2, {1, 2, 1})).cycle_string() == "(1 3)");
  CHECK_THROWS_AS(gbc::permutation_image(PlatformDescriptor::free_group(2), Word(2)), std::invalid_argument);

  auto rng = gbc::make_rng({21});
  const auto b6 = PlatformDescriptor::braid(6);
  for (int i = 0; i < 200; ++i) {
    const Word u = random_word(rng, 5, 12), v = random_word(rng, 5, 12);
    const auto pu = gbc::permutation_image(b6, u).images();
    auto expect = oracle::perm_image(6, to_signed(u));
    for (int& x : expect) ++x;
    CHECK(pu == expect);
    CHECK(gbc::permutation_image(b6, u * v) == gbc::permutation_image(b6, u) * gbc::permutation_image(b6, v));
  }
}

TEST_CASE("normal forms are valid, idempotent and faithful to the Burau invariant") {
  auto rng = gbc::make_rng({22});
  for (int n = 3; n <= 8; ++n) {
    const auto p = PlatformDescriptor::braid(n);
    for (int i = 0; i < 60; ++i) {
      const Word w = random_word(rng, n - 1, 25);
      const auto nf = gbc::garside_normal_form(n, w);
      std::string why;
      CHECK_MESSAGE(gbc::is_valid(nf, &why), why);
      const Word canon = gbc::to_word(nf);
      CHECK(gbc::normal_form(p, canon) == canon);
      CHECK(gbc::word_length(p, w) == canon.size());
      for (std::uint64_t t : {2ULL, 12345ULL}) {
        CHECK(oracle::Burau::of(n, to_signed(canon), t) == oracle::Burau::of(n, to_signed(w), t));
      }
    }
  }
}

TEST_CASE("distinct Burau images never share a normal form") {
  auto rng = gbc::make_rng({23});
  const auto b4 = PlatformDescriptor::braid(4);
  std::map<std::vector<std::uint64_t>, Word> seen;
  for (int i = 0; i < 3000; ++i) {
    const Word w = random_word(rng, 3, 6);
    const Word canon = gbc::normal_form(b4, w);
    const auto m = oracle::Burau::of(4, to_signed(w), 7);
    auto [it, fresh] = seen.emplace(m, canon);
    if (!fresh) CHECK(it->second == canon);
  }
}

TEST_CASE("one rewrite never changes the normal form in B3 up to length 6") {
  const auto b3 = PlatformDescriptor::braid(3);
  std::vector<oracle::Signed> level{{}};
  for (int len = 1; len <= 6; ++len) {
    std::vector<oracle::Signed> next;
    for (const auto& w : level) {
      for (int x : {1, -1, 2, -2}) {
        auto v = w;
        v.push_back(x);
        next.push_back(std::move(v));
      }
    }
    level = std::move(next);
    for (const auto& w : level) {
      const Word ww = Word::from_signed(2, w);
      for (const auto& v : oracle::braid_rewrites(w)) {
        REQUIRE(gbc::equal(b3, ww, Word::from_signed(2, v)));
      }
    }
  }
}

TEST_CASE("three-rewrite balls collapse to one normal form") {
  auto rng = gbc::make_rng({24});
  for (int n : {3, 4}) {
    const auto p = PlatformDescriptor::braid(n);
    for (int i = 0; i < 30; ++i) {
      const Word w = random_word(rng, n - 1, 8);
      const Word canon = gbc::normal_form(p, w);
      for (const auto& v : oracle::rewrite_ball(to_signed(w), 3)) {
        REQUIRE(gbc::normal_form(p, Word::from_signed(n - 1, v)) == canon);
      }
    }
  }
}

TEST_CASE("braid length is subadditive") {
  auto rng = gbc::make_rng({25});
  const auto b5 = PlatformDescriptor::braid(5);
  CHECK(gbc::word_length(b5, Word(4)) == 0);
  CHECK(gbc::word_length(b5, Word::from_signed(4, {1, -1})) == 0);
  for (int i = 0; i < 300; ++i) {
    const Word u = random_word(rng, 4, 10), v = random_word(rng, 4, 10);
    CHECK(gbc::word_length(b5, u * v) <= gbc::word_length(b5, u) + gbc::word_length(b5, v));
  }
}

TEST_CASE("symmetric group normal form") {
  const auto s4 = PlatformDescriptor::symmetric(4);
  CHECK(gbc::normal_form(s4, Word::from_signed(3, {1, 1})).empty());
  CHECK(gbc::equal(s4, Word::from_signed(3, {1, 2, 1}), Word::from_signed(3, {2, 1, 2})));
  CHECK(gbc::equal(s4, Word::from_signed(3, {1}), Word::from_signed(3, {-1})));
  auto rng = gbc::make_rng({26});
  for (int i = 0; i < 200; ++i) {
    const Word w = random_word(rng, 3, 10);
    const Word canon = gbc::normal_form(s4, w);
    CHECK(gbc::permutation_image(s4, canon) == gbc::permutation_image(s4, w));
    CHECK(canon.size() == static_cast<std::size_t>(gbc::permutation_image(s4, w).inversions()));
    CHECK(gbc::word_length(s4, w) == canon.size());
  }
}

TEST_CASE("free conjugacy search") {
  const auto a = Word::from_signed(2, {1}), b = Word::from_signed(2, {2});
  CHECK(gbc::free_conjugacy_search(a, a) == Word(2));
  CHECK(gbc::free_conjugacy_search(Word::from_signed(2, {1, 2}), Word::from_signed(2, {2, 1})) ==
        Word::from_signed(2, {-1}));
  CHECK_FALSE(gbc::free_conjugacy_search(a, b));
}

TEST_CASE("free conjugacy search agrees with enumeration of short conjugators") {
  std::vector<oracle::Signed> words;
  for (std::size_t len = 0; len <= 3; ++len) {
    for (auto& w : oracle::reduced_words(2, len)) words.push_back(std::move(w));
  }
  for (const auto& a : words) {
    for (const auto& b : words) {
      const auto expect = oracle::free_conjugator(2, a, b, 4);
      const auto got = gbc::free_conjugacy_search(Word::from_signed(2, a), Word::from_signed(2, b));
      REQUIRE(got.has_value() == expect.has_value());
      if (got) CHECK(oracle::naive_conjugate(a, to_signed(*got)) == b);
    }
  }
}

TEST_CASE("finite conjugacy search") {
  const auto t12 = Permutation::from_images({2, 1, 3});
  const auto t13 = Permutation::from_images({3, 2, 1});
  const auto c3 = Permutation::from_images({2, 3, 1});
  const auto x = gbc::finite_conjugacy_search(3, t12, t13);
  REQUIRE(x);
  CHECK(*x * t12 * x->inverse() == t13);
  CHECK(*x == Permutation::from_images({1, 3, 2}));
  CHECK_FALSE(gbc::finite_conjugacy_search(3, t12, c3));
  CHECK(gbc::finite_conjugacy_search(3, c3, c3)->is_identity());
  CHECK_THROWS_AS(gbc::finite_conjugacy_search(9, Permutation(9), Permutation(9)), std::invalid_argument);

  auto rng = gbc::make_rng({27});
  const auto s5 = PlatformDescriptor::symmetric(5);
  for (int i = 0; i < 100; ++i) {
    const auto p = gbc::permutation_image(s5, random_word(rng, 4, 7));
    const auto q = gbc::permutation_image(s5, random_word(rng, 4, 7));
    std::vector<int> pi = p.images(), qi = q.images();
    for (int& v : pi) --v;
    for (int& v : qi) --v;
    CHECK(gbc::finite_conjugacy_search(5, p, q).has_value() == (oracle::cycle_type(pi) == oracle::cycle_type(qi)));
  }
}
