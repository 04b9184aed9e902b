#include "rngkit/sts.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include "rngkit/special.hpp"

namespace rngkit::sts {

namespace {

using special::erfc;
using special::igamc;
using special::std_normal_cdf;

constexpr double kSqrt2 = 1.4142135623730951;

// A pattern is aperiodic (unbordered) when no proper prefix equals the
// suffix of the same length, i.e. shifted copies of the pattern can never
// overlap. Pattern values put the first bit in the most significant
// position.
bool is_aperiodic(std::uint32_t value, std::uint32_t m) {
  for (std::uint32_t len = 1; len < m; ++len) {
    if ((value >> (m - len)) == (value & ((std::uint32_t{1} << len) - 1))) {
      return false;
    }
  }
  return true;
}

}  // namespace

std::string_view test_name(TestKind kind) {
  switch (kind) {
    case TestKind::kFrequency:
      return "Frequency";
    case TestKind::kBlockFrequency:
      return "BlockFrequency";
    case TestKind::kCumulativeSums:
      return "CumulativeSums";
    case TestKind::kRuns:
      return "Runs";
    case TestKind::kLongestRun:
      return "LongestRun";
    case TestKind::kRank:
      return "Rank";
    case TestKind::kFft:
      return "FFT";
    case TestKind::kNonOverlappingTemplate:
      return "NonOverlappingTemplate";
    case TestKind::kOverlappingTemplate:
      return "OverlappingTemplate";
    case TestKind::kUniversal:
      return "Universal";
    case TestKind::kApproximateEntropy:
      return "ApproximateEntropy";
    case TestKind::kRandomExcursions:
      return "RandomExcursions";
    case TestKind::kRandomExcursionsVariant:
      return "RandomExcursionsVariant";
    case TestKind::kSerial:
      return "Serial";
    case TestKind::kLinearComplexity:
      return "LinearComplexity";
  }
  return "?";
}

// --- Frequency -----------------------------------------------------------

PResult frequency(const BitSequence& seq) {
  const std::size_t n = seq.size();
  if (n == 0) return PResult::na("empty sequence");
  const auto ones = static_cast<std::int64_t>(seq.count_ones());
  const std::int64_t s = 2 * ones - static_cast<std::int64_t>(n);
  const double s_obs =
      std::fabs(static_cast<double>(s)) / std::sqrt(static_cast<double>(n));
  return PResult::of(erfc(s_obs / kSqrt2));
}

// --- BlockFrequency ------------------------------------------------------

PResult block_frequency(const BitSequence& seq, std::uint32_t block_len) {
  if (block_len == 0) return PResult::na("block length must be positive");
  const std::size_t n = seq.size();
  const std::size_t num_blocks = n / block_len;
  if (num_blocks == 0) return PResult::na("stream shorter than one block");
  double chi2 = 0.0;
  for (std::size_t b = 0; b < num_blocks; ++b) {
    const double pi =
        static_cast<double>(seq.count_ones(b * block_len, block_len)) /
        block_len;
    chi2 += (pi - 0.5) * (pi - 0.5);
  }
  chi2 *= 4.0 * block_len;
  return PResult::of(igamc(num_blocks / 2.0, chi2 / 2.0));
}

// --- CumulativeSums ------------------------------------------------------

namespace {

double cusum_pvalue(std::size_t n, std::int64_t z) {
  const double zn = static_cast<double>(z);
  const double sn = std::sqrt(static_cast<double>(n));
  const double nz = static_cast<double>(n) / zn;

  // Terms vanish once the normal arguments pass ~40 sigma; clamping the
  // index range keeps degenerate inputs (tiny z) from looping needlessly.
  const auto bound =
      static_cast<std::int64_t>(45.0 * sn / (4.0 * zn)) + 2;

  double sum1 = 0.0;
  {
    // lower bounds are the smallest k whose reflection term exists
    // ((4k-1)z >= -n), i.e. a ceiling; upper bounds are floors
    auto lo = static_cast<std::int64_t>(std::ceil((-nz + 1.0) / 4.0));
    auto hi = static_cast<std::int64_t>(std::floor((nz - 1.0) / 4.0));
    lo = std::max(lo, -bound);
    hi = std::min(hi, bound);
    for (std::int64_t k = lo; k <= hi; ++k) {
      const double kk = static_cast<double>(k);
      sum1 += std_normal_cdf((4.0 * kk + 1.0) * zn / sn) -
              std_normal_cdf((4.0 * kk - 1.0) * zn / sn);
    }
  }
  double sum2 = 0.0;
  {
    auto lo = static_cast<std::int64_t>(std::ceil((-nz - 3.0) / 4.0));
    auto hi = static_cast<std::int64_t>(std::floor((nz - 1.0) / 4.0));
    lo = std::max(lo, -bound);
    hi = std::min(hi, bound);
    for (std::int64_t k = lo; k <= hi; ++k) {
      const double kk = static_cast<double>(k);
      sum2 += std_normal_cdf((4.0 * kk + 3.0) * zn / sn) -
              std_normal_cdf((4.0 * kk + 1.0) * zn / sn);
    }
  }
  return std::min(1.0, std::max(0.0, 1.0 - sum1 + sum2));
}

}  // namespace

std::array<PResult, 2> cumulative_sums(const BitSequence& seq) {
  const std::size_t n = seq.size();
  if (n == 0) {
    return {PResult::na("empty sequence"), PResult::na("empty sequence")};
  }
  std::int64_t s = 0, zf = 0, zb = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s += seq[i] ? 1 : -1;
    zf = std::max(zf, s < 0 ? -s : s);
  }
  s = 0;
  for (std::size_t i = n; i-- > 0;) {
    s += seq[i] ? 1 : -1;
    zb = std::max(zb, s < 0 ? -s : s);
  }
  return {PResult::of(cusum_pvalue(n, zf)), PResult::of(cusum_pvalue(n, zb))};
}

// --- Runs ----------------------------------------------------------------

PResult runs(const BitSequence& seq) {
  const std::size_t n = seq.size();
  if (n < 2) return PResult::na("need at least 2 bits");
  const double pi = static_cast<double>(seq.count_ones()) / n;
  if (std::fabs(pi - 0.5) >= 2.0 / std::sqrt(static_cast<double>(n))) {
    // prerequisite frequency check failed; by convention the run count is
    // not even computed
    return PResult::of(0.0);
  }
  const double denom = 2.0 * std::sqrt(2.0 * n) * pi * (1.0 - pi);
  if (denom == 0.0) return PResult::of(0.0);
  std::uint64_t v = 1;
  bool prev = seq[0];
  for (std::size_t i = 1; i < n; ++i) {
    bool cur = seq[i];
    v += cur != prev;
    prev = cur;
  }
  const double num =
      std::fabs(static_cast<double>(v) - 2.0 * n * pi * (1.0 - pi));
  return PResult::of(erfc(num / denom));
}

// --- LongestRun ----------------------------------------------------------

namespace {

struct LongestRunRegime {
  std::uint32_t block_len;
  std::uint32_t cells;
  std::uint32_t lowest;  // run lengths <= lowest share the first cell
  const double* pi;
};

const double kLongestRunPi8[4] = {0.2148, 0.3672, 0.2305, 0.1875};
const double kLongestRunPi128[6] = {0.1174, 0.2430, 0.2493,
                                    0.1752, 0.1027, 0.1124};
const double kLongestRunPi10000[7] = {0.0882, 0.2092, 0.2483, 0.1933,
                                      0.1208, 0.0675, 0.0727};

LongestRunRegime longest_run_regime(std::size_t n) {
  if (n < 6272) return {8, 4, 1, kLongestRunPi8};
  if (n < 750000) return {128, 6, 4, kLongestRunPi128};
  return {10000, 7, 10, kLongestRunPi10000};
}

}  // namespace

namespace detail {

double chi2_counts(std::span<const double> observed,
                   std::span<const double> expected) {
  double chi2 = 0.0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    const double diff = observed[i] - expected[i];
    chi2 += diff * diff / expected[i];
  }
  return chi2;
}

LongestRunData longest_run_counts(const BitSequence& seq) {
  const std::size_t n = seq.size();
  const LongestRunRegime regime = longest_run_regime(n);
  LongestRunData data;
  data.block_len = regime.block_len;
  data.counts.assign(regime.cells, 0);
  const std::size_t num_blocks = n / regime.block_len;
  data.num_blocks = static_cast<std::uint32_t>(num_blocks);
  for (std::size_t b = 0; b < num_blocks; ++b) {
    std::uint32_t longest = 0, run = 0;
    const std::size_t base = b * regime.block_len;
    for (std::size_t i = 0; i < regime.block_len; ++i) {
      if (seq[base + i]) {
        ++run;
        longest = std::max(longest, run);
      } else {
        run = 0;
      }
    }
    std::uint32_t cell =
        longest <= regime.lowest ? 0 : longest - regime.lowest;
    cell = std::min(cell, regime.cells - 1);
    ++data.counts[cell];
  }
  return data;
}

}  // namespace detail

PResult longest_run(const BitSequence& seq) {
  const std::size_t n = seq.size();
  if (n < 128) return PResult::na("stream shorter than 128 bits");
  const LongestRunRegime regime = longest_run_regime(n);
  const detail::LongestRunData data = detail::longest_run_counts(seq);
  const double num_blocks = data.num_blocks;
  double chi2 = 0.0;
  for (std::uint32_t c = 0; c < regime.cells; ++c) {
    const double expected = num_blocks * regime.pi[c];
    const double diff = static_cast<double>(data.counts[c]) - expected;
    chi2 += diff * diff / expected;
  }
  return PResult::of(igamc((regime.cells - 1) / 2.0, chi2 / 2.0));
}

// --- Rank ----------------------------------------------------------------

namespace detail {

RankCounts rank_counts(const BitSequence& seq) {
  constexpr std::size_t kDim = 32;
  constexpr std::size_t kBitsPerMatrix = kDim * kDim;
  RankCounts counts;
  counts.matrices = seq.size() / kBitsPerMatrix;
  for (std::uint64_t mtx = 0; mtx < counts.matrices; ++mtx) {
    special::GF2Matrix m(kDim, kDim);
    const std::size_t base = mtx * kBitsPerMatrix;
    for (std::size_t r = 0; r < kDim; ++r) {
      m.row(r)[0] = seq.extract_word(base + r * kDim, kDim);
    }
    const std::size_t rank = special::gf2_rank(std::move(m));
    if (rank == kDim)
      ++counts.full;
    else if (rank == kDim - 1)
      ++counts.minus1;
    else
      ++counts.rest;
  }
  return counts;
}

}  // namespace detail

PResult rank(const BitSequence& seq) {
  const detail::RankCounts counts = detail::rank_counts(seq);
  if (counts.matrices == 0) {
    return PResult::na("stream shorter than 1024 bits");
  }
  // asymptotic probabilities of rank 32 / 31 / lower for random 32x32
  // matrices over GF(2)
  constexpr double kPFull = 0.2888, kPMinus1 = 0.5776, kPRest = 0.1336;
  const double num = static_cast<double>(counts.matrices);
  const double observed[3] = {static_cast<double>(counts.full),
                              static_cast<double>(counts.minus1),
                              static_cast<double>(counts.rest)};
  const double expected[3] = {num * kPFull, num * kPMinus1, num * kPRest};
  const double chi2 = detail::chi2_counts(observed, expected);
  return PResult::of(igamc(1.0, chi2 / 2.0));
}

// --- FFT -----------------------------------------------------------------

PResult fft(const BitSequence& seq) {
  const std::size_t n = seq.size();
  if (n < 2) return PResult::na("need at least 2 bits");
  const std::vector<double> mags = special::dft_magnitudes(seq);
  const double threshold = std::sqrt(std::log(1.0 / 0.05) * n);
  const double n0 = 0.95 * n / 2.0;
  std::size_t n1 = 0;
  for (double mag : mags) n1 += mag < threshold;
  const double d = (static_cast<double>(n1) - n0) /
                   std::sqrt(static_cast<double>(n) * 0.95 * 0.05 / 4.0);
  return PResult::of(erfc(std::fabs(d) / kSqrt2));
}

// --- NonOverlappingTemplate ----------------------------------------------

const std::array<std::uint16_t, 148>& aperiodic_templates9() {
  static const std::array<std::uint16_t, 148> table = [] {
    std::array<std::uint16_t, 148> t{};
    std::size_t k = 0;
    for (std::uint32_t v = 0; v < 512; ++v) {
      if (is_aperiodic(v, 9)) {
        t.at(k++) = static_cast<std::uint16_t>(v);
      }
    }
    if (k != t.size()) std::abort();  // the enumeration count is fixed
    return t;
  }();
  return table;
}

std::vector<std::uint16_t> aperiodic_templates(std::uint32_t m) {
  if (m == 0 || m > 16) {
    throw std::invalid_argument("template length must be in 1..16");
  }
  std::vector<std::uint16_t> out;
  for (std::uint32_t v = 0; v < (std::uint32_t{1} << m); ++v) {
    if (is_aperiodic(v, m)) out.push_back(static_cast<std::uint16_t>(v));
  }
  return out;
}

std::string template_bits(std::uint16_t tmpl, std::uint32_t m) {
  std::string s(m, '0');
  for (std::uint32_t i = 0; i < m; ++i) {
    if ((tmpl >> (m - 1 - i)) & 1u) s[i] = '1';
  }
  return s;
}

namespace detail {

std::vector<std::uint64_t> nonoverlap_block_counts(const BitSequence& seq,
                                                   std::uint32_t m,
                                                   std::uint16_t tmpl) {
  constexpr std::size_t kNumBlocks = 8;
  const std::size_t block_len = seq.size() / kNumBlocks;
  std::vector<std::uint64_t> counts(kNumBlocks, 0);
  if (block_len < m) return counts;
  for (std::size_t b = 0; b < kNumBlocks; ++b) {
    const std::size_t base = b * block_len;
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i + m <= block_len;) {
      std::uint32_t w = 0;
      for (std::uint32_t k = 0; k < m; ++k) {
        w = (w << 1) | static_cast<std::uint32_t>(seq[base + i + k]);
      }
      if (w == tmpl) {
        ++hits;
        i += m;  // occurrences may not overlap
      } else {
        ++i;
      }
    }
    counts[b] = hits;
  }
  return counts;
}

}  // namespace detail

std::vector<TemplateResult> non_overlapping_template(const BitSequence& seq,
                                                     std::uint32_t m) {
  constexpr std::size_t kNumBlocks = 8;
  std::vector<TemplateResult> out;

  if (m == 0 || m > 16) {
    out.push_back({0, PResult::na("template length must be in 1..16")});
    return out;
  }
  const std::vector<std::uint16_t> tmpls = aperiodic_templates(m);
  out.reserve(tmpls.size());

  const std::size_t block_len = seq.size() / kNumBlocks;
  if (block_len < m) {
    for (std::uint16_t t : tmpls) {
      out.push_back({t, PResult::na("stream shorter than 8 template-size "
                                    "blocks")});
    }
    return out;
  }

  const double mu =
      (static_cast<double>(block_len) - m + 1) / std::ldexp(1.0, m);
  const double var =
      static_cast<double>(block_len) *
      (1.0 / std::ldexp(1.0, m) -
       (2.0 * m - 1.0) / std::ldexp(1.0, 2 * static_cast<int>(m)));

  // One pass per block: bucket every window position by its pattern value,
  // then count non-overlapping occurrences per template with a greedy sweep
  // over its (already sorted) positions.
  const std::uint32_t mask = (std::uint32_t{1} << m) - 1;
  std::vector<std::vector<std::uint32_t>> buckets(std::size_t{1} << m);
  std::vector<double> chi2(tmpls.size(), 0.0);

  for (std::size_t b = 0; b < kNumBlocks; ++b) {
    for (auto& bucket : buckets) bucket.clear();
    const std::size_t base = b * block_len;
    std::uint32_t w = 0;
    for (std::size_t i = 0; i < block_len; ++i) {
      w = ((w << 1) | static_cast<std::uint32_t>(seq[base + i])) & mask;
      if (i + 1 >= m) {
        buckets[w].push_back(static_cast<std::uint32_t>(i + 1 - m));
      }
    }
    for (std::size_t t = 0; t < tmpls.size(); ++t) {
      std::uint64_t hits = 0;
      std::int64_t next_allowed = 0;
      for (std::uint32_t pos : buckets[tmpls[t]]) {
        if (static_cast<std::int64_t>(pos) >= next_allowed) {
          ++hits;
          next_allowed = static_cast<std::int64_t>(pos) + m;
        }
      }
      const double diff = static_cast<double>(hits) - mu;
      chi2[t] += diff * diff / var;
    }
  }

  for (std::size_t t = 0; t < tmpls.size(); ++t) {
    out.push_back(
        {tmpls[t], PResult::of(igamc(kNumBlocks / 2.0, chi2[t] / 2.0))});
  }
  return out;
}

// --- OverlappingTemplate -------------------------------------------------

namespace detail {

std::vector<std::uint64_t> overlap_block_counts(const BitSequence& seq,
                                                std::uint32_t m) {
  constexpr std::size_t kBlockLen = 1032;
  const std::size_t num_blocks = seq.size() / kBlockLen;
  std::vector<std::uint64_t> counts(num_blocks, 0);
  for (std::size_t b = 0; b < num_blocks; ++b) {
    const std::size_t base = b * kBlockLen;
    std::uint32_t run = 0;
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < kBlockLen; ++i) {
      if (seq[base + i]) {
        if (++run >= m) ++hits;
      } else {
        run = 0;
      }
    }
    counts[b] = hits;
  }
  return counts;
}

}  // namespace detail

PResult overlapping_template(const BitSequence& seq, std::uint32_t m) {
  constexpr std::size_t kBlockLen = 1032;
  if (m == 0 || m > kBlockLen) {
    return PResult::na("template length must be in 1..1032");
  }
  const std::size_t num_blocks = seq.size() / kBlockLen;
  if (num_blocks == 0) {
    return PResult::na("stream shorter than one 1032-bit block");
  }
  // occupancy probabilities for the all-ones length-9 template in a
  // 1032-bit block
  static const double kPi[6] = {0.364091, 0.185659, 0.139381,
                                0.100571, 0.070432, 0.139865};
  const std::vector<std::uint64_t> per_block =
      detail::overlap_block_counts(seq, m);
  double nu[6] = {0, 0, 0, 0, 0, 0};
  for (std::uint64_t hits : per_block) {
    nu[std::min<std::uint64_t>(hits, 5)] += 1.0;
  }
  double expected[6];
  for (int i = 0; i < 6; ++i) {
    expected[i] = static_cast<double>(num_blocks) * kPi[i];
  }
  const double chi2 = detail::chi2_counts(nu, expected);
  return PResult::of(igamc(5.0 / 2.0, chi2 / 2.0));
}

// --- Universal -----------------------------------------------------------

namespace detail {

UniversalStat universal_statistic(const BitSequence& seq, std::uint32_t L,
                                  std::uint64_t Q) {
  const std::uint64_t total_blocks = seq.size() / L;
  UniversalStat stat;
  stat.test_blocks = total_blocks - Q;
  std::vector<std::uint64_t> last_seen(std::size_t{1} << L, 0);
  for (std::uint64_t i = 1; i <= Q; ++i) {
    last_seen[seq.extract_word((i - 1) * L, L)] = i;
  }
  double sum = 0.0;
  for (std::uint64_t i = Q + 1; i <= total_blocks; ++i) {
    const std::uint64_t v = seq.extract_word((i - 1) * L, L);
    sum += std::log2(static_cast<double>(i - last_seen[v]));
    last_seen[v] = i;
  }
  stat.fn = sum / static_cast<double>(stat.test_blocks);
  return stat;
}

}  // namespace detail

PResult universal(const BitSequence& seq) {
  const std::size_t n = seq.size();
  if (n < 387840) return PResult::na("stream shorter than 387840 bits");

  // block size and initialization length as a function of n, with the
  // matching expected value and variance of the per-block statistic
  static const struct {
    std::size_t min_n;
    std::uint32_t L;
  } kSchedule[] = {
      {1059061760, 16}, {496435200, 15}, {231669760, 14}, {107560960, 13},
      {49643520, 12},   {22753280, 11},  {10342400, 10},  {4654080, 9},
      {2068480, 8},     {904960, 7},     {387840, 6},
  };
  static const double kExpected[17] = {
      0, 0, 0, 0, 0, 0, 5.2177052, 6.1962507, 7.1836656, 8.1764248,
      9.1723243, 10.170032, 11.168765, 12.168070, 13.167693, 14.167488,
      15.167379};
  static const double kVariance[17] = {
      0, 0, 0, 0, 0, 0, 2.954, 3.125, 3.238, 3.311, 3.356, 3.384, 3.401,
      3.410, 3.416, 3.419, 3.421};

  std::uint32_t L = 6;
  for (const auto& row : kSchedule) {
    if (n >= row.min_n) {
      L = row.L;
      break;
    }
  }
  const std::uint64_t Q = 10ull << L;
  const detail::UniversalStat stat = detail::universal_statistic(seq, L, Q);
  const double K = static_cast<double>(stat.test_blocks);
  const double c =
      0.7 - 0.8 / L + (4.0 + 32.0 / L) * std::pow(K, -3.0 / L) / 15.0;
  const double sigma = c * std::sqrt(kVariance[L] / K);
  const double arg = std::fabs(stat.fn - kExpected[L]) / (kSqrt2 * sigma);
  return PResult::of(erfc(arg));
}

// --- ApproximateEntropy ----------------------------------------------------

namespace detail {

double apen_phi(const BitSequence& seq, std::uint32_t m) {
  if (m == 0) return 0.0;
  const std::size_t n = seq.size();
  std::vector<std::uint64_t> counts(std::size_t{1} << m, 0);
  const std::uint64_t mask = (std::uint64_t{1} << m) - 1;
  std::uint64_t w = 0;
  for (std::uint32_t k = 0; k < m; ++k) {
    w = (w << 1) | static_cast<std::uint64_t>(seq[k % n]);
  }
  ++counts[w];
  for (std::size_t i = 1; i < n; ++i) {
    w = ((w << 1) | static_cast<std::uint64_t>(seq[(i + m - 1) % n])) & mask;
    ++counts[w];
  }
  double phi = 0.0;
  for (std::uint64_t c : counts) {
    if (c == 0) continue;
    const double frac = static_cast<double>(c) / static_cast<double>(n);
    phi += frac * std::log(frac);
  }
  return phi;
}

}  // namespace detail

PResult approximate_entropy(const BitSequence& seq, std::uint32_t m) {
  const std::size_t n = seq.size();
  if (m == 0) return PResult::na("block length must be positive");
  if (m + 1 > 24) return PResult::na("block length too large");
  if (n < m + 1) return PResult::na("stream shorter than m+1 bits");
  const double phi_m = detail::apen_phi(seq, m);
  const double phi_m1 = detail::apen_phi(seq, m + 1);
  const double apen = phi_m - phi_m1;
  const double chi2 =
      std::max(0.0, 2.0 * static_cast<double>(n) * (std::log(2.0) - apen));
  return PResult::of(igamc(std::ldexp(1.0, static_cast<int>(m) - 1),
                           chi2 / 2.0));
}

// --- RandomExcursions / Variant --------------------------------------------

namespace detail {

ExcursionData excursion_data(const BitSequence& seq) {
  ExcursionData data;
  std::array<std::uint32_t, 8> current{};
  auto close_cycle = [&] {
    ++data.cycles;
    for (int i = 0; i < 8; ++i) {
      ++data.cycle_visits[i][std::min<std::uint32_t>(current[i], 5)];
      current[i] = 0;
    }
  };
  std::int64_t s = 0;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    s += seq[i] ? 1 : -1;
    if (s == 0) {
      close_cycle();
      continue;
    }
    if (s >= -4 && s <= 4) {
      ++current[s < 0 ? s + 4 : s + 3];
    }
    if (s >= -9 && s <= 9) {
      ++data.total_visits[s < 0 ? s + 9 : s + 8];
    }
  }
  // the walk is closed with a final virtual zero
  if (s != 0) close_cycle();
  return data;
}

double excursion_pi(unsigned k, int x) {
  const double ax = std::fabs(static_cast<double>(x));
  if (ax < 1.0) throw std::invalid_argument("state must be non-zero");
  const double stay = 1.0 - 1.0 / (2.0 * ax);
  if (k == 0) return stay;
  if (k <= 4) {
    return 1.0 / (4.0 * ax * ax) * std::pow(stay, static_cast<int>(k) - 1);
  }
  return 1.0 / (2.0 * ax) * std::pow(stay, 4);
}

}  // namespace detail

namespace {

constexpr std::uint64_t kMinCycles = 500;

const int kExcursionStates[8] = {-4, -3, -2, -1, 1, 2, 3, 4};
const int kVariantStates[18] = {-9, -8, -7, -6, -5, -4, -3, -2, -1,
                                1,  2,  3,  4,  5,  6,  7,  8,  9};

}  // namespace

std::vector<StateResult> random_excursions(const BitSequence& seq) {
  std::vector<StateResult> out;
  out.reserve(8);
  const detail::ExcursionData data = detail::excursion_data(seq);
  if (data.cycles < kMinCycles) {
    const std::string why =
        "too few cycles (J=" + std::to_string(data.cycles) + " < " +
        std::to_string(kMinCycles) + ")";
    for (int state : kExcursionStates) {
      out.push_back({state, PResult::na(why)});
    }
    return out;
  }
  const double J = static_cast<double>(data.cycles);
  for (int i = 0; i < 8; ++i) {
    const int state = kExcursionStates[i];
    double chi2 = 0.0;
    for (unsigned k = 0; k <= 5; ++k) {
      const double expected = J * detail::excursion_pi(k, state);
      const double diff =
          static_cast<double>(data.cycle_visits[i][k]) - expected;
      chi2 += diff * diff / expected;
    }
    out.push_back({state, PResult::of(igamc(5.0 / 2.0, chi2 / 2.0))});
  }
  return out;
}

std::vector<StateResult> random_excursions_variant(const BitSequence& seq) {
  std::vector<StateResult> out;
  out.reserve(18);
  const detail::ExcursionData data = detail::excursion_data(seq);
  if (data.cycles < kMinCycles) {
    const std::string why =
        "too few cycles (J=" + std::to_string(data.cycles) + " < " +
        std::to_string(kMinCycles) + ")";
    for (int state : kVariantStates) {
      out.push_back({state, PResult::na(why)});
    }
    return out;
  }
  const double J = static_cast<double>(data.cycles);
  for (int i = 0; i < 18; ++i) {
    const int state = kVariantStates[i];
    const double xi = static_cast<double>(data.total_visits[i]);
    const double denom =
        std::sqrt(2.0 * J * (4.0 * std::fabs(state) - 2.0));
    out.push_back(
        {state, PResult::of(erfc(std::fabs(xi - J) / denom))});
  }
  return out;
}

// --- Serial ----------------------------------------------------------------

namespace detail {

double serial_psi2(const BitSequence& seq, std::uint32_t m) {
  if (m == 0) return 0.0;
  const std::size_t n = seq.size();
  std::vector<std::uint64_t> counts(std::size_t{1} << m, 0);
  const std::uint64_t mask = (std::uint64_t{1} << m) - 1;
  std::uint64_t w = 0;
  for (std::uint32_t k = 0; k < m; ++k) {
    w = (w << 1) | static_cast<std::uint64_t>(seq[k % n]);
  }
  ++counts[w];
  for (std::size_t i = 1; i < n; ++i) {
    w = ((w << 1) | static_cast<std::uint64_t>(seq[(i + m - 1) % n])) & mask;
    ++counts[w];
  }
  std::uint64_t sum_sq = 0;
  for (std::uint64_t c : counts) sum_sq += c * c;
  return std::ldexp(1.0, static_cast<int>(m)) *
             static_cast<double>(sum_sq) / static_cast<double>(n) -
         static_cast<double>(n);
}

}  // namespace detail

std::array<PResult, 2> serial(const BitSequence& seq, std::uint32_t m) {
  const std::size_t n = seq.size();
  auto both_na = [](const std::string& why) -> std::array<PResult, 2> {
    return {PResult::na(why), PResult::na(why)};
  };
  if (m < 2) return both_na("block length must be at least 2");
  if (m > 24) return both_na("block length too large");
  if (n < m) return both_na("stream shorter than m bits");
  const double psi_m = detail::serial_psi2(seq, m);
  const double psi_m1 = detail::serial_psi2(seq, m - 1);
  const double psi_m2 = detail::serial_psi2(seq, m - 2);
  const double del1 = std::max(0.0, psi_m - psi_m1);
  const double del2 = std::max(0.0, psi_m - 2.0 * psi_m1 + psi_m2);
  return {
      PResult::of(igamc(std::ldexp(1.0, static_cast<int>(m) - 2), del1 / 2.0)),
      PResult::of(igamc(std::ldexp(1.0, static_cast<int>(m) - 3), del2 / 2.0)),
  };
}

// --- LinearComplexity --------------------------------------------------------

PResult linear_complexity(const BitSequence& seq, std::uint32_t block_len) {
  if (block_len == 0) return PResult::na("block length must be positive");
  const std::size_t num_blocks = seq.size() / block_len;
  if (num_blocks == 0) return PResult::na("stream shorter than one block");

  // distribution of the normalized deviation T over 7 cells
  static const double kPi[7] = {0.010417, 0.03125, 0.125,   0.5,
                                0.25,     0.0625,  0.020833};
  const double M = block_len;
  const double sign_m = (block_len % 2 == 0) ? 1.0 : -1.0;  // (-1)^M
  // 2^M saturates to +inf for very large M; the correction term then
  // rounds to zero, which is exactly its mathematical size there.
  const double pow2_m =
      std::ldexp(1.0, static_cast<int>(std::min<std::uint32_t>(block_len, 1100)));
  const double mean =
      M / 2.0 + (9.0 - sign_m) / 36.0 - (M / 3.0 + 2.0 / 9.0) / pow2_m;

  double nu[7] = {0, 0, 0, 0, 0, 0, 0};
  for (std::size_t b = 0; b < num_blocks; ++b) {
    const std::size_t L =
        special::berlekamp_massey(seq.slice(b * block_len, block_len));
    const double t =
        sign_m * (static_cast<double>(L) - mean) + 2.0 / 9.0;
    int cell;
    if (t <= -2.5)
      cell = 0;
    else if (t <= -1.5)
      cell = 1;
    else if (t <= -0.5)
      cell = 2;
    else if (t <= 0.5)
      cell = 3;
    else if (t <= 1.5)
      cell = 4;
    else if (t <= 2.5)
      cell = 5;
    else
      cell = 6;
    nu[cell] += 1.0;
  }
  double expected[7];
  for (int i = 0; i < 7; ++i) {
    expected[i] = static_cast<double>(num_blocks) * kPi[i];
  }
  const double chi2 = detail::chi2_counts(nu, expected);
  return PResult::of(igamc(3.0, chi2 / 2.0));
}

// --- battery -----------------------------------------------------------------

std::vector<StreamTestResult> run_all(const BitSequence& seq,
                                      const SuiteConfig& cfg) {
  std::vector<StreamTestResult> rows;
  rows.reserve(190);
  auto add = [&rows](TestKind test, std::uint32_t subtest, std::string label,
                     PResult result) {
    rows.push_back({test, subtest, std::move(label), std::move(result)});
  };

  add(TestKind::kFrequency, 0, "", frequency(seq));
  add(TestKind::kBlockFrequency, 0, "",
      block_frequency(seq, cfg.block_frequency_m));
  {
    auto cs = cumulative_sums(seq);
    add(TestKind::kCumulativeSums, 0, "forward", cs[0]);
    add(TestKind::kCumulativeSums, 1, "backward", cs[1]);
  }
  add(TestKind::kRuns, 0, "", runs(seq));
  add(TestKind::kLongestRun, 0, "", longest_run(seq));
  add(TestKind::kRank, 0, "", rank(seq));
  add(TestKind::kFft, 0, "", fft(seq));
  {
    auto templates = non_overlapping_template(seq, cfg.nonoverlapping_m);
    for (std::size_t i = 0; i < templates.size(); ++i) {
      add(TestKind::kNonOverlappingTemplate, static_cast<std::uint32_t>(i),
          template_bits(templates[i].tmpl, cfg.nonoverlapping_m),
          templates[i].result);
    }
  }
  add(TestKind::kOverlappingTemplate, 0, "",
      overlapping_template(seq, cfg.overlapping_m));
  add(TestKind::kUniversal, 0, "", universal(seq));
  add(TestKind::kApproximateEntropy, 0, "",
      approximate_entropy(seq, cfg.approx_entropy_m));
  {
    auto states = random_excursions(seq);
    for (std::size_t i = 0; i < states.size(); ++i) {
      add(TestKind::kRandomExcursions, static_cast<std::uint32_t>(i),
          "x=" + std::to_string(states[i].state), states[i].result);
    }
  }
  {
    auto states = random_excursions_variant(seq);
    for (std::size_t i = 0; i < states.size(); ++i) {
      add(TestKind::kRandomExcursionsVariant, static_cast<std::uint32_t>(i),
          "x=" + std::to_string(states[i].state), states[i].result);
    }
  }
  {
    auto s = serial(seq, cfg.serial_m);
    add(TestKind::kSerial, 0, "1", s[0]);
    add(TestKind::kSerial, 1, "2", s[1]);
  }
  add(TestKind::kLinearComplexity, 0, "",
      linear_complexity(seq, cfg.linear_complexity_m));
  return rows;
}

std::vector<std::vector<StreamTestResult>> run_battery(
    const StreamSet& streams, const SuiteConfig& cfg, unsigned workers,
    const std::function<void(std::size_t, std::size_t)>& progress) {
  const std::size_t total = streams.count();
  std::vector<std::vector<StreamTestResult>> results(total);
  if (total == 0) return results;

  unsigned n_workers = workers != 0 ? workers
                                    : std::max(1u, std::thread::hardware_concurrency());
  n_workers = static_cast<unsigned>(
      std::min<std::size_t>(n_workers, total));

  if (n_workers <= 1) {
    for (std::size_t i = 0; i < total; ++i) {
      results[i] = run_all(streams.streams[i], cfg);
      if (progress) progress(i + 1, total);
    }
    return results;
  }

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= total) return;
      results[i] = run_all(streams.streams[i], cfg);
      const std::size_t d = done.fetch_add(1) + 1;
      if (progress) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        progress(d, total);
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(n_workers);
  for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

}  // namespace rngkit::sts
