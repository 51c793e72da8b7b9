#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gbc {

/// A permutation of {1..n}, n <= kMaxDegree, stored in one-line notation.
///
/// Composition follows function composition: (p * q)(i) = p(q(i)). Under this
/// convention the projection of a braid word s_{i1} s_{i2} ... s_{ik} is
/// t_{i1} * t_{i2} * ... * t_{ik}, with t_i the adjacent transposition (i i+1).
class Permutation {
 public:
  static constexpr int kMaxDegree = 32;

  Permutation() : Permutation(1) {}
  explicit Permutation(int degree);  // identity

  /// `images[i-1]` is the image of i. Throws std::invalid_argument unless the
  /// images form a bijection of {1..n}.
  static Permutation from_images(std::span<const int> images);
  static Permutation from_images(std::initializer_list<int> images) {
    return from_images(std::span<const int>(images.begin(), images.size()));
  }
  static Permutation transposition(int degree, int i);  // (i i+1)
  static Permutation longest(int degree);               // i -> n+1-i

  int degree() const { return degree_; }
  int operator()(int i) const { return image_[i - 1] + 1; }

  /// 0-based access used by the hot loops.
  int at(int i) const { return image_[i]; }

  std::vector<int> images() const;
  Permutation inverse() const;
  int inversions() const;
  bool is_identity() const;

  /// this * t_i: swaps positions i, i+1 of the one-line notation.
  void multiply_right_transposition(int i) { std::swap(image_[i - 1], image_[i]); }

  friend Permutation operator*(const Permutation& p, const Permutation& q);
  friend bool operator==(const Permutation& p, const Permutation& q) {
    return p.degree_ == q.degree_ && p.image_ == q.image_;
  }
  friend auto operator<=>(const Permutation& p, const Permutation& q) {
    if (auto c = p.degree_ <=> q.degree_; c != 0) return c;
    return p.image_ <=> q.image_;
  }

  /// Disjoint-cycle notation, e.g. "(1 3)(2 4)"; "()" for the identity.
  std::string cycle_string() const;

 private:
  int degree_ = 1;
  std::array<std::uint8_t, kMaxDegree> image_{};
};

}  // namespace gbc
