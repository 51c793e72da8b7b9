#include "gbcrypt/permutation.hpp"

#include <stdexcept>

namespace gbc {

Permutation::Permutation(int degree) : degree_(degree) {
  if (degree < 1 || degree > kMaxDegree) {
    throw std::invalid_argument("permutation degree must lie in [1, " +
                                std::to_string(kMaxDegree) + "]");
  }
  for (int i = 0; i < degree; ++i) image_[i] = static_cast<std::uint8_t>(i);
}

Permutation Permutation::from_images(std::span<const int> images) {
  Permutation p(static_cast<int>(images.size()));
  std::array<bool, kMaxDegree> seen{};
  for (std::size_t i = 0; i < images.size(); ++i) {
    const int v = images[i];
    if (v < 1 || v > p.degree_ || seen[v - 1]) {
      throw std::invalid_argument("images do not form a permutation");
    }
    seen[v - 1] = true;
    p.image_[i] = static_cast<std::uint8_t>(v - 1);
  }
  return p;
}

Permutation Permutation::transposition(int degree, int i) {
  if (i < 1 || i >= degree) throw std::invalid_argument("transposition index out of range");
  Permutation p(degree);
  p.multiply_right_transposition(i);
  return p;
}

Permutation Permutation::longest(int degree) {
  Permutation p(degree);
  for (int i = 0; i < degree; ++i) p.image_[i] = static_cast<std::uint8_t>(degree - 1 - i);
  return p;
}

std::vector<int> Permutation::images() const {
  std::vector<int> out(degree_);
  for (int i = 0; i < degree_; ++i) out[i] = image_[i] + 1;
  return out;
}

Permutation Permutation::inverse() const {
  Permutation q(degree_);
  for (int i = 0; i < degree_; ++i) q.image_[image_[i]] = static_cast<std::uint8_t>(i);
  return q;
}

int Permutation::inversions() const {
  int count = 0;
  for (int i = 0; i < degree_; ++i) {
    for (int j = i + 1; j < degree_; ++j) count += image_[i] > image_[j];
  }
  return count;
}

bool Permutation::is_identity() const {
  for (int i = 0; i < degree_; ++i) {
    if (image_[i] != i) return false;
  }
  return true;
}

Permutation operator*(const Permutation& p, const Permutation& q) {
  if (p.degree_ != q.degree_) throw std::invalid_argument("composing permutations of different degree");
  Permutation r(p.degree_);
  for (int i = 0; i < p.degree_; ++i) r.image_[i] = p.image_[q.image_[i]];
  return r;
}

std::string Permutation::cycle_string() const {
  std::string out;
  std::array<bool, kMaxDegree> seen{};
  for (int start = 0; start < degree_; ++start) {
    if (seen[start] || image_[start] == start) continue;
    out += '(';
    int i = start;
    bool first = true;
    while (!seen[i]) {
      seen[i] = true;
      if (!first) out += ' ';
      out += std::to_string(i + 1);
      first = false;
      i = image_[i];
    }
    out += ')';
  }
  return out.empty() ? "()" : out;
}

}  // namespace gbc
