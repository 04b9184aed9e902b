#include "rngkit/special.hpp"

#include <fftw3.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <stdexcept>

namespace rngkit::special {

namespace {

double clamp01(double p) { return std::min(1.0, std::max(0.0, p)); }

// C ^= B << k, on word arrays of equal length.
void xor_shifted(std::vector<std::uint64_t>& c,
                 const std::vector<std::uint64_t>& b, std::size_t k) {
  const std::size_t wq = k >> 6;
  const unsigned r = static_cast<unsigned>(k & 63u);
  for (std::size_t w = c.size(); w-- > wq;) {
    std::uint64_t v = b[w - wq] << r;
    if (r != 0 && w > wq) v |= b[w - wq - 1] >> (64 - r);
    c[w] ^= v;
  }
}

}  // namespace

double erfc(double x) { return std::erfc(x); }

double igamc(double a, double x) {
  if (!(a > 0.0)) {
    throw std::domain_error("igamc: a must be positive");
  }
  if (x < 0.0) {
    throw std::domain_error("igamc: x must be non-negative");
  }
  if (x == 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;

  const double log_prefix = -x + a * std::log(x) - std::lgamma(a);

  if (x < a + 1.0) {
    // lower series: P(a,x) = x^a e^-x / Gamma(a) * sum_n x^n / (a(a+1)..(a+n))
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int i = 0; i < 10000; ++i) {
      ap += 1.0;
      term *= x / ap;
      sum += term;
      if (std::fabs(term) < std::fabs(sum) * 1e-17) break;
    }
    return clamp01(1.0 - sum * std::exp(log_prefix));
  }

  // upper continued fraction (modified Lentz)
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 10000; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < 1e-17) break;
  }
  return clamp01(std::exp(log_prefix) * h);
}

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

GF2Matrix::GF2Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows),
      cols_(cols),
      words_per_row_((cols + 63) / 64),
      bits_(rows * words_per_row_, 0) {}

void GF2Matrix::set(std::size_t r, std::size_t c, bool v) {
  std::uint64_t mask = std::uint64_t{1} << (c & 63u);
  if (v)
    row(r)[c >> 6] |= mask;
  else
    row(r)[c >> 6] &= ~mask;
}

std::size_t gf2_rank(GF2Matrix m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  std::size_t rank = 0;
  for (std::size_t col = 0; col < cols && rank < rows; ++col) {
    const std::size_t w = col >> 6;
    const std::uint64_t mask = std::uint64_t{1} << (col & 63u);
    std::size_t pivot = rank;
    while (pivot < rows && !(m.row(pivot)[w] & mask)) ++pivot;
    if (pivot == rows) continue;
    if (pivot != rank) {
      std::swap_ranges(m.row(pivot).begin(), m.row(pivot).end(),
                       m.row(rank).begin());
    }
    auto prow = m.row(rank);
    for (std::size_t r = rank + 1; r < rows; ++r) {
      auto rr = m.row(r);
      if (rr[w] & mask) {
        for (std::size_t i = w; i < rr.size(); ++i) rr[i] ^= prow[i];
      }
    }
    ++rank;
  }
  return rank;
}

std::size_t berlekamp_massey(const BitSequence& seq) {
  const std::size_t n = seq.size();
  if (n == 0) return 0;
  const std::size_t nwords = n / 64 + 2;

  // connection polynomial C and previous polynomial B, bit i = coefficient
  // of x^i
  std::vector<std::uint64_t> c(nwords, 0), b(nwords, 0);
  c[0] = 1;
  b[0] = 1;
  std::size_t L = 0;
  std::size_t m = 1;

  // sliding window over the sequence, bit j = seq[idx - j]
  std::vector<std::uint64_t> win(nwords, 0);

  for (std::size_t idx = 0; idx < n; ++idx) {
    std::uint64_t carry = seq[idx] ? 1u : 0u;
    for (std::size_t w = 0; w < nwords; ++w) {
      std::uint64_t next = win[w] >> 63;
      win[w] = (win[w] << 1) | carry;
      carry = next;
    }
    // discrepancy: parity of the overlap between C and the reversed window
    std::uint64_t acc = 0;
    const std::size_t lw = L / 64 + 1;
    for (std::size_t w = 0; w < lw; ++w) acc ^= c[w] & win[w];
    if (std::popcount(acc) & 1u) {
      if (2 * L <= idx) {
        std::vector<std::uint64_t> t = c;
        xor_shifted(c, b, m);
        L = idx + 1 - L;
        b = std::move(t);
        m = 1;
      } else {
        xor_shifted(c, b, m);
        ++m;
      }
    } else {
      ++m;
    }
  }
  return L;
}

std::vector<double> dft_magnitudes(const BitSequence& seq) {
  const std::size_t n = seq.size();
  if (n < 2) return {};

  std::vector<double> in(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = seq[i] ? 1.0 : -1.0;
  std::vector<std::complex<double>> out(n / 2 + 1);

  // FFTW's planner is not thread-safe; plans are cached per size for the
  // lifetime of the process. FFTW_UNALIGNED lets the cached plan run on any
  // caller-provided buffer.
  static std::mutex plan_mutex;
  static std::map<std::size_t, fftw_plan>* plans =
      new std::map<std::size_t, fftw_plan>();
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = plans->find(n);
    if (it == plans->end()) {
      plan = fftw_plan_dft_r2c_1d(
          static_cast<int>(n), in.data(),
          reinterpret_cast<fftw_complex*>(out.data()),
          FFTW_ESTIMATE | FFTW_UNALIGNED);
      if (plan == nullptr) {
        throw std::runtime_error("dft_magnitudes: could not create FFT plan");
      }
      plans->emplace(n, plan);
    } else {
      plan = it->second;
    }
  }
  fftw_execute_dft_r2c(plan, in.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));

  std::vector<double> mags(n / 2);
  for (std::size_t j = 0; j < mags.size(); ++j) mags[j] = std::abs(out[j]);
  return mags;
}

}  // namespace rngkit::special
