#include "gbcrypt/words.hpp"

#include <charconv>
#include <stdexcept>

#include "gbcrypt/errors.hpp"

namespace gbc {

namespace {

void check_letter(const Letter& l, int alphabet_size) {
  if (l.generator < 1 || l.generator > alphabet_size || (l.sign != 1 && l.sign != -1)) {
    throw std::invalid_argument("letter g" + std::to_string(l.generator) +
                                " outside alphabet of size " + std::to_string(alphabet_size));
  }
}

void check_same_alphabet(const Word& u, const Word& v) {
  if (u.alphabet_size() != v.alphabet_size()) {
    throw std::invalid_argument("words over different alphabets (" +
                                std::to_string(u.alphabet_size()) + " vs " +
                                std::to_string(v.alphabet_size()) + ")");
  }
}

}  // namespace

Word::Word(int alphabet_size) : alphabet_size_(alphabet_size) {
  if (alphabet_size < 1) throw std::invalid_argument("alphabet size must be positive");
}

Word::Word(int alphabet_size, std::vector<Letter> letters) : Word(alphabet_size) {
  for (const auto& l : letters) check_letter(l, alphabet_size);
  letters_ = std::move(letters);
  reduced_ = letters_.empty();
}

Word Word::from_signed(int alphabet_size, std::span<const int> signed_indices) {
  std::vector<Letter> letters;
  letters.reserve(signed_indices.size());
  for (int s : signed_indices) {
    if (s == 0) throw std::invalid_argument("signed generator index 0");
    letters.push_back({s > 0 ? s : -s, s > 0 ? 1 : -1});
  }
  return Word(alphabet_size, std::move(letters));
}

void Word::push_back(Letter l) {
  check_letter(l, alphabet_size_);
  letters_.push_back(l);
  reduced_ = false;
}

Word operator*(const Word& u, const Word& v) {
  check_same_alphabet(u, v);
  Word out(u.alphabet_size_);
  out.letters_.reserve(u.size() + v.size());
  out.letters_ = u.letters_;
  out.letters_.insert(out.letters_.end(), v.letters_.begin(), v.letters_.end());
  out.reduced_ = out.letters_.empty();
  return out;
}

Word free_reduce(const Word& w) {
  if (w.reduced_) return w;
  Word out(w.alphabet_size_);
  auto& stack = out.letters_;
  stack.reserve(w.size());
  for (const auto& l : w.letters_) {
    if (!stack.empty() && stack.back() == l.inverse()) {
      stack.pop_back();
    } else {
      stack.push_back(l);
    }
  }
  out.reduced_ = true;
  return out;
}

Word invert(const Word& w) {
  std::vector<Letter> letters(w.letters().rbegin(), w.letters().rend());
  for (auto& l : letters) l = l.inverse();
  Word out(w.alphabet_size(), std::move(letters));
  return w.is_reduced() ? free_reduce(out) : out;
}

Word conjugate(const Word& a, const Word& x) {
  return free_reduce(x * a * invert(x));
}

CyclicReduction cyclic_reduce(const Word& w) {
  const Word r = free_reduce(w);
  const auto letters = r.letters();
  std::size_t lo = 0;
  std::size_t hi = letters.size();
  while (hi - lo >= 2 && letters[lo] == letters[hi - 1].inverse()) {
    ++lo;
    --hi;
  }
  Word core(r.alphabet_size(), {letters.begin() + lo, letters.begin() + hi});
  Word conjugator(r.alphabet_size(), {letters.begin(), letters.begin() + lo});
  return {free_reduce(core), free_reduce(conjugator)};
}

Word substitute(const Word& pattern, std::span<const Word> images) {
  if (static_cast<std::size_t>(pattern.alphabet_size()) != images.size()) {
    throw std::invalid_argument("substitute: pattern alphabet has " +
                                std::to_string(pattern.alphabet_size()) + " letters but " +
                                std::to_string(images.size()) + " images were given");
  }
  const int target = images.front().alphabet_size();
  for (const auto& img : images) {
    if (img.alphabet_size() != target) {
      throw std::invalid_argument("substitute: images over different alphabets");
    }
  }
  std::vector<Word> inverses;
  inverses.reserve(images.size());
  for (const auto& img : images) inverses.push_back(invert(img));

  std::vector<Letter> out;
  for (const auto& l : pattern.letters()) {
    const Word& piece = l.sign > 0 ? images[l.generator - 1] : inverses[l.generator - 1];
    out.insert(out.end(), piece.letters().begin(), piece.letters().end());
  }
  return free_reduce(Word(target, std::move(out)));
}

std::string format_word(const Word& w) {
  std::string out;
  for (const auto& l : w.letters()) {
    if (!out.empty()) out += ' ';
    out += 'g';
    out += std::to_string(l.generator);
    if (l.sign < 0) out += "^-1";
  }
  return out;
}

Word parse_word(std::string_view text, int alphabet_size) {
  std::vector<Letter> letters;
  std::size_t pos = 0;
  while (pos < text.size()) {
    if (text[pos] == ' ') {
      ++pos;
      continue;
    }
    std::size_t end = text.find(' ', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view token = text.substr(pos, end - pos);
    pos = end;

    auto fail = [&] { return ParseError("unknown token '" + std::string(token) + "'"); };
    if (token.size() < 2 || token[0] != 'g') throw fail();
    std::string_view digits = token.substr(1);
    int sign = 1;
    if (digits.ends_with("^-1")) {
      digits.remove_suffix(3);
      sign = -1;
    }
    if (digits.empty() || digits[0] == '0') throw fail();
    int index = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), index);
    if (ec != std::errc{} || ptr != digits.data() + digits.size()) throw fail();
    if (index > alphabet_size) {
      throw ParseError("generator g" + std::to_string(index) + " outside alphabet of size " +
                       std::to_string(alphabet_size));
    }
    letters.push_back({index, sign});
  }
  return Word(alphabet_size, std::move(letters));
}

Word random_reduced_word(std::mt19937_64& rng, int alphabet_size, std::size_t length,
                         std::span<const int> generators) {
  std::vector<Letter> pool;
  if (generators.empty()) {
    for (int g = 1; g <= alphabet_size; ++g) pool.insert(pool.end(), {{g, 1}, {g, -1}});
  } else {
    for (int g : generators) pool.insert(pool.end(), {{g, 1}, {g, -1}});
  }
  std::vector<Letter> letters;
  letters.reserve(length);
  if (length > 0) {
    std::uniform_int_distribution<std::size_t> first(0, pool.size() - 1);
    std::uniform_int_distribution<std::size_t> next(0, pool.size() - 2);
    letters.push_back(pool[first(rng)]);
    while (letters.size() < length) {
      // Draw from the pool minus the inverse of the previous letter.
      const Letter forbidden = letters.back().inverse();
      std::size_t pick = next(rng);
      std::size_t skip = 0;
      while (pool[skip] != forbidden) ++skip;
      if (pick >= skip) ++pick;
      letters.push_back(pool[pick]);
    }
  }
  return free_reduce(Word(alphabet_size, std::move(letters)));
}

}  // namespace gbc
