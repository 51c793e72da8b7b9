#include "gbcrypt/platform.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <numeric>
#include <stdexcept>

#include "gbcrypt/errors.hpp"

namespace gbc {

namespace {

void check_alphabet(const PlatformDescriptor& p, const Word& w) {
  if (w.alphabet_size() != p.alphabet_size()) {
    throw std::invalid_argument("word over alphabet of size " + std::to_string(w.alphabet_size()) +
                                " used on platform " + p.to_string());
  }
}

void check_rank(PlatformKind kind, int rank) {
  if (rank < 2) throw std::invalid_argument("platform rank must be at least 2");
  if (kind == PlatformKind::symmetric && rank > PlatformDescriptor::kMaxSymmetricDegree) {
    throw std::invalid_argument("symmetric platform supports n <= " +
                                std::to_string(PlatformDescriptor::kMaxSymmetricDegree));
  }
  if (kind == PlatformKind::braid && rank > Permutation::kMaxDegree) {
    throw std::invalid_argument("braid platform supports n <= " +
                                std::to_string(Permutation::kMaxDegree));
  }
}

}  // namespace

PlatformDescriptor PlatformDescriptor::free_group(int rank) {
  check_rank(PlatformKind::free_group, rank);
  return {PlatformKind::free_group, rank};
}

PlatformDescriptor PlatformDescriptor::symmetric(int n) {
  check_rank(PlatformKind::symmetric, n);
  return {PlatformKind::symmetric, n};
}

PlatformDescriptor PlatformDescriptor::braid(int n) {
  check_rank(PlatformKind::braid, n);
  return {PlatformKind::braid, n};
}

PlatformDescriptor PlatformDescriptor::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw ParseError("platform must look like free:r, sym:n or braid:n, got '" + std::string(text) + "'");
  }
  const std::string_view kind = text.substr(0, colon);
  const std::string_view digits = text.substr(colon + 1);
  int rank = 0;
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), rank);
  if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw ParseError("bad platform rank in '" + std::string(text) + "'");
  }
  try {
    if (kind == "free") return free_group(rank);
    if (kind == "sym") return symmetric(rank);
    if (kind == "braid") return braid(rank);
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  throw ParseError("unknown platform kind '" + std::string(kind) + "'");
}

std::string PlatformDescriptor::to_string() const {
  switch (kind) {
    case PlatformKind::free_group:
      return "free:" + std::to_string(rank);
    case PlatformKind::symmetric:
      return "sym:" + std::to_string(rank);
    case PlatformKind::braid:
      return "braid:" + std::to_string(rank);
  }
  return {};
}

std::vector<Word> generators(const PlatformDescriptor& p) {
  std::vector<Word> out;
  for (int g = 1; g <= p.alphabet_size(); ++g) out.push_back(Word::from_signed(p.alphabet_size(), {g}));
  return out;
}

Permutation permutation_image(const PlatformDescriptor& p, const Word& w) {
  if (p.kind == PlatformKind::free_group) {
    throw std::invalid_argument("free groups have no permutation image");
  }
  check_alphabet(p, w);
  Permutation image(p.rank);
  for (const auto& l : w.letters()) image.multiply_right_transposition(l.generator);
  return image;
}

Word symmetric_word(const Permutation& p) { return permutation_braid_word(p); }

Word normal_form(const PlatformDescriptor& p, const Word& w) {
  check_alphabet(p, w);
  switch (p.kind) {
    case PlatformKind::free_group:
      return free_reduce(w);
    case PlatformKind::symmetric:
      return free_reduce(symmetric_word(permutation_image(p, w)));
    case PlatformKind::braid:
      return to_word(garside_normal_form(p.rank, w));
  }
  return w;
}

bool equal(const PlatformDescriptor& p, const Word& u, const Word& v) {
  check_alphabet(p, u);
  check_alphabet(p, v);
  if (p.kind == PlatformKind::braid) {
    if (permutation_image(p, u) != permutation_image(p, v)) return false;
    return garside_normal_form(p.rank, u) == garside_normal_form(p.rank, v);
  }
  return normal_form(p, u) == normal_form(p, v);
}

std::size_t word_length(const PlatformDescriptor& p, const Word& w) {
  check_alphabet(p, w);
  if (p.kind == PlatformKind::braid) {
    // Letter count of to_word() without materializing it.
    const auto nf = garside_normal_form(p.rank, w);
    std::size_t total = static_cast<std::size_t>(std::abs(nf.inf)) *
                        static_cast<std::size_t>(p.rank * (p.rank - 1) / 2);
    for (const auto& f : nf.factors) total += static_cast<std::size_t>(f.inversions());
    return total;
  }
  return normal_form(p, w).size();
}

std::optional<Word> free_conjugacy_search(const Word& a, const Word& b) {
  if (a.alphabet_size() != b.alphabet_size()) {
    throw std::invalid_argument("free_conjugacy_search: words over different alphabets");
  }
  const auto [core_a, conj_a] = cyclic_reduce(a);
  const auto [core_b, conj_b] = cyclic_reduce(b);
  if (core_a.size() != core_b.size()) return std::nullopt;

  // a = u_a c_a u_a^-1, b = u_b c_b u_b^-1. If c_a = s t and c_b = t s then
  // c_b = s^-1 c_a s, so x = u_b s^-1 u_a^-1.
  const auto la = core_a.letters();
  const auto lb = core_b.letters();
  const std::size_t len = la.size();
  for (std::size_t offset = 0; offset < std::max<std::size_t>(len, 1); ++offset) {
    bool match = true;
    for (std::size_t i = 0; i < len && match; ++i) match = lb[i] == la[(i + offset) % len];
    if (!match) continue;
    const Word s(a.alphabet_size(), {la.begin(), la.begin() + static_cast<std::ptrdiff_t>(offset)});
    return free_reduce(conj_b * invert(s) * invert(conj_a));
  }
  return std::nullopt;
}

std::optional<Permutation> finite_conjugacy_search(int n, const Permutation& a,
                                                   const Permutation& b) {
  if (n < 1 || n > PlatformDescriptor::kMaxSymmetricDegree) {
    throw std::invalid_argument("finite_conjugacy_search supports 1 <= n <= " +
                                std::to_string(PlatformDescriptor::kMaxSymmetricDegree));
  }
  if (a.degree() != n || b.degree() != n) {
    throw std::invalid_argument("finite_conjugacy_search: permutation degree mismatch");
  }
  std::vector<int> images(static_cast<std::size_t>(n));
  std::iota(images.begin(), images.end(), 1);
  do {
    const Permutation x = Permutation::from_images(images);
    if (x * a * x.inverse() == b) return x;
  } while (std::next_permutation(images.begin(), images.end()));
  return std::nullopt;
}

}  // namespace gbc
