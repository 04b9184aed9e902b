#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "rngkit/bitseq.hpp"

namespace rngkit::special {

// Complementary error function.
double erfc(double x);

// Regularized upper incomplete gamma function Q(a, x) = Γ(a,x)/Γ(a) for
// a > 0, x >= 0. Uses the power series for x < a+1 and a continued fraction
// otherwise. Throws std::domain_error for a <= 0 or x < 0.
double igamc(double a, double x);

// Standard normal CDF, evaluated through erfc for tail accuracy.
double std_normal_cdf(double x);

// Dense bit matrix over GF(2), rows packed into 64-bit words.
class GF2Matrix {
 public:
  GF2Matrix(std::size_t rows, std::size_t cols);

  bool get(std::size_t r, std::size_t c) const {
    return (row(r)[c >> 6] >> (c & 63u)) & 1u;
  }
  void set(std::size_t r, std::size_t c, bool v);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  std::span<std::uint64_t> row(std::size_t r) {
    return {bits_.data() + r * words_per_row_, words_per_row_};
  }
  std::span<const std::uint64_t> row(std::size_t r) const {
    return {bits_.data() + r * words_per_row_, words_per_row_};
  }

 private:
  std::size_t rows_, cols_, words_per_row_;
  std::vector<std::uint64_t> bits_;
};

// Rank over GF(2); takes a copy because elimination is destructive.
std::size_t gf2_rank(GF2Matrix m);

// Length of the shortest LFSR generating the sequence (Berlekamp-Massey).
// The empty and all-zero sequences have complexity 0.
std::size_t berlekamp_massey(const BitSequence& seq);

// Magnitudes of the first floor(n/2) DFT bins of the sequence mapped to
// +1/-1 (bit 0 -> -1, bit 1 -> +1). O(n log n).
std::vector<double> dft_magnitudes(const BitSequence& seq);

}  // namespace rngkit::special
