#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "rngkit/special.hpp"
#include "rngkit/sts.hpp"

using rngkit::BitSequence;
namespace sts = rngkit::sts;
using sts::PResult;
using sts::SuiteConfig;
using sts::TestKind;

namespace {

BitSequence repeat(const std::string& unit, std::size_t times) {
  BitSequence seq;
  seq.reserve(unit.size() * times);
  for (std::size_t t = 0; t < times; ++t) {
    for (char c : unit) seq.push_back(c == '1');
  }
  return seq;
}

BitSequence reversed(const BitSequence& seq) {
  BitSequence out;
  out.reserve(seq.size());
  for (std::size_t i = seq.size(); i-- > 0;) out.push_back(seq[i]);
  return out;
}

BitSequence complemented(const BitSequence& seq) {
  BitSequence out;
  out.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) out.push_back(!seq[i]);
  return out;
}

BitSequence rotated(const BitSequence& seq, std::size_t by) {
  BitSequence out;
  out.reserve(seq.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    out.push_back(seq[(i + by) % seq.size()]);
  }
  return out;
}

// Circular m-window occurrence counts by plain string handling, the slow
// reference for the psi/phi statistics.
std::map<std::string, std::size_t> window_counts(const std::string& bits,
                                                 std::uint32_t m) {
  std::map<std::string, std::size_t> counts;
  const std::string ext = bits + bits.substr(0, m - 1);
  for (std::size_t i = 0; i < bits.size(); ++i) ++counts[ext.substr(i, m)];
  return counts;
}

double psi2_reference(const std::string& bits, std::uint32_t m) {
  if (m == 0) return 0.0;
  const double n = static_cast<double>(bits.size());
  double sum_sq = 0.0;
  for (const auto& [pattern, count] : window_counts(bits, m)) {
    sum_sq += static_cast<double>(count) * static_cast<double>(count);
  }
  return std::ldexp(1.0, static_cast<int>(m)) * sum_sq / n - n;
}

double phi_reference(const std::string& bits, std::uint32_t m) {
  if (m == 0) return 0.0;
  const double n = static_cast<double>(bits.size());
  double phi = 0.0;
  for (const auto& [pattern, count] : window_counts(bits, m)) {
    const double frac = static_cast<double>(count) / n;
    phi += frac * std::log(frac);
  }
  return phi;
}

// Non-overlapping occurrences by direct string comparison.
std::uint64_t scan_nonoverlap(const std::string& block,
                              const std::string& pattern) {
  std::uint64_t hits = 0;
  std::size_t i = 0;
  while (i + pattern.size() <= block.size()) {
    if (block.compare(i, pattern.size(), pattern) == 0) {
      ++hits;
      i += pattern.size();
    } else {
      ++i;
    }
  }
  return hits;
}

std::uint64_t scan_overlap(const std::string& block,
                           const std::string& pattern) {
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i + pattern.size() <= block.size(); ++i) {
    if (block.compare(i, pattern.size(), pattern) == 0) ++hits;
  }
  return hits;
}

}  // namespace

// --- known answers ---------------------------------------------------------

TEST_CASE("frequency known answer") {
  const PResult p = sts::frequency(BitSequence::from_string("1011010101"));
  REQUIRE(p.applicable);
  CHECK(p.p == doctest::Approx(0.527089).epsilon(1e-5));
}

TEST_CASE("block frequency known answer") {
  const PResult p =
      sts::block_frequency(BitSequence::from_string("0110011010"), 3);
  REQUIRE(p.applicable);
  CHECK(p.p == doctest::Approx(0.801252).epsilon(1e-5));
}

TEST_CASE("runs known answer") {
  const PResult p = sts::runs(BitSequence::from_string("1001101011"));
  REQUIRE(p.applicable);
  CHECK(p.p == doctest::Approx(0.147232).epsilon(1e-5));
}

TEST_CASE("cumulative sums known answer") {
  const auto cs = sts::cumulative_sums(BitSequence::from_string("1011010111"));
  REQUIRE(cs[0].applicable);
  REQUIRE(cs[1].applicable);
  // both directions reach the same maximum excursion of 4 on this input
  CHECK(cs[0].p == doctest::Approx(0.4116588).epsilon(1e-5));
  CHECK(cs[1].p == doctest::Approx(0.4116588).epsilon(1e-5));
}

TEST_CASE("serial known answer matches closed forms") {
  const auto s = sts::serial(BitSequence::from_string("0011011101"), 3);
  REQUIRE(s[0].applicable);
  REQUIRE(s[1].applicable);
  // del1 = 1.6 and del2 = 0.8 on this input, so the P-values reduce to
  // Q(2, 0.8) = e^-0.8 (1 + 0.8) and Q(1, 0.4) = e^-0.4
  CHECK(s[0].p == doctest::Approx(std::exp(-0.8) * 1.8).epsilon(1e-12));
  CHECK(s[1].p == doctest::Approx(std::exp(-0.4)).epsilon(1e-12));
  CHECK(s[0].p == doctest::Approx(0.808792).epsilon(1e-5));
  CHECK(s[1].p == doctest::Approx(0.670320).epsilon(1e-5));
}

TEST_CASE("approximate entropy known answer") {
  const PResult p =
      sts::approximate_entropy(BitSequence::from_string("0100110101"), 3);
  REQUIRE(p.applicable);
  CHECK(p.p == doctest::Approx(0.261961).epsilon(1e-4));
}

TEST_CASE("longest run known answer on the 128-bit worked example") {
  const BitSequence seq = BitSequence::from_string(
      "11001100000101010110110001001100111000000000001001"
      "00110101010001000100111101011010000000110101111100"
      "1100111001101101100010110010");
  REQUIRE(seq.size() == 128);
  const sts::detail::LongestRunData data =
      sts::detail::longest_run_counts(seq);
  CHECK(data.block_len == 8);
  CHECK(data.num_blocks == 16);
  REQUIRE(data.counts.size() == 4);
  CHECK(data.counts[0] == 4);
  CHECK(data.counts[1] == 9);
  CHECK(data.counts[2] == 3);
  CHECK(data.counts[3] == 0);
  const PResult p = sts::longest_run(seq);
  REQUIRE(p.applicable);
  CHECK(p.p == doctest::Approx(0.180609).epsilon(1e-4));
}

// --- degenerate anchors ------------------------------------------------------

TEST_CASE("all-zero input fails the balance-sensitive tests outright") {
  const BitSequence zeros = BitSequence::zeros(100000);

  const PResult freq = sts::frequency(zeros);
  REQUIRE(freq.applicable);
  CHECK(freq.p < 1e-10);

  CHECK(sts::runs(zeros).p == 0.0);  // prerequisite balance check fails
  CHECK(sts::block_frequency(zeros, 128).p < 1e-12);
  CHECK(sts::longest_run(zeros).p < 1e-12);
  CHECK(sts::overlapping_template(zeros, 9).p < 1e-12);
  CHECK(sts::linear_complexity(zeros, 500).p < 1e-12);
  CHECK(sts::approximate_entropy(zeros, 10).p < 1e-12);

  const auto cs = sts::cumulative_sums(zeros);
  CHECK(cs[0].p < 1e-12);
  CHECK(cs[1].p < 1e-12);

  const auto serial = sts::serial(zeros, 16);
  CHECK(serial[0].p < 1e-12);
  CHECK(serial[1].p < 1e-12);
}

TEST_CASE("all-zero 2048-bit stream has a hand-computable rank P-value") {
  // two 32x32 matrices, both rank 0: chi2 works out to 12.9701
  const PResult p = sts::rank(BitSequence::zeros(2048));
  REQUIRE(p.applicable);
  CHECK(p.p == doctest::Approx(0.0015257).epsilon(1e-3));
}

TEST_CASE("alternating input fails Runs with a vanishing P-value") {
  const BitSequence alt = repeat("10", 5000);
  const PResult p = sts::runs(alt);
  REQUIRE(p.applicable);
  CHECK(p.p < 1e-12);

  // perfectly balanced, so Frequency is maximally happy
  CHECK(sts::frequency(alt).p == doctest::Approx(1.0));

  // the spectrum is a single Nyquist spike; every reported bin is quiet
  const PResult f = sts::fft(alt);
  REQUIRE(f.applicable);
  CHECK(f.p < 1e-6);
}

TEST_CASE("all-ones cumulative sums are maximally extreme") {
  BitSequence ones = BitSequence::zeros(100);
  for (std::size_t i = 0; i < 100; ++i) ones.set(i, true);
  const auto cs = sts::cumulative_sums(ones);
  CHECK(cs[0].p < 1e-12);
  CHECK(cs[1].p < 1e-12);
}

// --- inapplicability ---------------------------------------------------------

TEST_CASE("tests refuse inputs they cannot judge") {
  const BitSequence tiny = BitSequence::from_string("10110");

  CHECK_FALSE(sts::frequency(BitSequence()).applicable);
  CHECK_FALSE(sts::runs(BitSequence::from_string("1")).applicable);
  CHECK_FALSE(sts::longest_run(tiny).applicable);
  CHECK_FALSE(sts::rank(tiny).applicable);
  CHECK_FALSE(sts::block_frequency(tiny, 0).applicable);
  CHECK_FALSE(sts::block_frequency(tiny, 6).applicable);
  CHECK_FALSE(sts::overlapping_template(tiny, 9).applicable);
  CHECK_FALSE(sts::approximate_entropy(tiny, 0).applicable);
  CHECK_FALSE(sts::approximate_entropy(tiny, 5).applicable);
  CHECK_FALSE(sts::linear_complexity(tiny, 0).applicable);
  CHECK_FALSE(sts::linear_complexity(tiny, 6).applicable);

  const auto serial = sts::serial(tiny, 1);
  CHECK_FALSE(serial[0].applicable);
  CHECK(serial[0].reason == "block length must be at least 2");

  const PResult uni = sts::universal(BitSequence::zeros(387839));
  CHECK_FALSE(uni.applicable);
  CHECK(uni.reason == "stream shorter than 387840 bits");

  // excursions need 500 cycles; a short stream cannot have them
  const auto exc = sts::random_excursions(tiny);
  REQUIRE(exc.size() == 8);
  for (const auto& row : exc) {
    CHECK_FALSE(row.result.applicable);
    CHECK(row.result.reason.find("too few cycles") != std::string::npos);
    CHECK(row.result.reason.find("< 500") != std::string::npos);
  }

  // the row set never depends on the bits: inapplicable rows still appear
  const auto var = sts::random_excursions_variant(tiny);
  REQUIRE(var.size() == 18);
  CHECK(var.front().state == -9);
  CHECK(var.back().state == 9);
}

// --- detail cross-checks -----------------------------------------------------

TEST_CASE("chi-square helper") {
  const double even[3] = {5.0, 5.0, 5.0};
  CHECK(sts::detail::chi2_counts(even, even) == 0.0);
  const double obs[2] = {3.0, 7.0};
  const double exp2[2] = {5.0, 5.0};
  CHECK(sts::detail::chi2_counts(obs, exp2) == doctest::Approx(1.6));
}

TEST_CASE("longest run block tabulation matches a string scan") {
  std::mt19937_64 rng(41);
  for (std::size_t n : {2048u, 20000u, 800000u}) {
    const BitSequence seq = oracles::random_bits(rng, n);
    const sts::detail::LongestRunData data =
        sts::detail::longest_run_counts(seq);

    std::uint32_t cells = 0, lowest = 0;
    if (data.block_len == 8) {
      cells = 4;
      lowest = 1;
    } else if (data.block_len == 128) {
      cells = 6;
      lowest = 4;
    } else {
      REQUIRE(data.block_len == 10000);
      cells = 7;
      lowest = 10;
    }
    REQUIRE(data.counts.size() == cells);
    REQUIRE(data.num_blocks == n / data.block_len);

    const std::string bits = seq.to_string();
    std::vector<std::uint64_t> expected(cells, 0);
    for (std::size_t b = 0; b < data.num_blocks; ++b) {
      std::uint32_t longest = 0, run = 0;
      for (std::size_t i = 0; i < data.block_len; ++i) {
        if (bits[b * data.block_len + i] == '1') {
          longest = std::max(longest, ++run);
        } else {
          run = 0;
        }
      }
      const std::uint32_t cell =
          longest <= lowest ? 0 : std::min(longest - lowest, cells - 1);
      ++expected[cell];
    }
    CHECK(data.counts == expected);
  }
}

TEST_CASE("longest run degenerate blocks land in the extreme cells") {
  BitSequence ones = BitSequence::zeros(128);
  for (std::size_t i = 0; i < 128; ++i) ones.set(i, true);
  const auto top = sts::detail::longest_run_counts(ones);
  CHECK(top.counts == std::vector<std::uint64_t>{0, 0, 0, 16});

  const auto bottom = sts::detail::longest_run_counts(BitSequence::zeros(128));
  CHECK(bottom.counts == std::vector<std::uint64_t>{16, 0, 0, 0});
}

TEST_CASE("rank tabulation classifies constructed matrices") {
  // three matrices: identity (rank 32), zero (rank < 31), zero (rank < 31),
  // plus a 5-bit tail that must be ignored
  BitSequence seq = BitSequence::zeros(3 * 1024 + 5);
  for (std::size_t r = 0; r < 32; ++r) seq.set(r * 32 + r, true);
  const sts::detail::RankCounts counts = sts::detail::rank_counts(seq);
  CHECK(counts.matrices == 3);
  CHECK(counts.full == 1);
  CHECK(counts.minus1 == 0);
  CHECK(counts.rest == 2);
}

TEST_CASE("non-overlapping occurrence counts match a string scan") {
  std::mt19937_64 rng(42);
  const BitSequence seq = oracles::random_bits(rng, 8192);
  const std::string bits = seq.to_string();
  const std::size_t block_len = bits.size() / 8;

  const auto& templates = sts::aperiodic_templates9();
  for (std::size_t t = 0; t < templates.size(); t += 17) {
    const std::uint16_t tmpl = templates[t];
    const std::string pattern = sts::template_bits(tmpl, 9);
    const std::vector<std::uint64_t> counts =
        sts::detail::nonoverlap_block_counts(seq, 9, tmpl);
    REQUIRE(counts.size() == 8);
    for (std::size_t b = 0; b < 8; ++b) {
      CHECK(counts[b] ==
            scan_nonoverlap(bits.substr(b * block_len, block_len), pattern));
    }
  }
}

TEST_CASE("non-overlapping template P-values agree with a direct rebuild") {
  // rebuilds every P-value from the slow per-block counter and the published
  // moments; this pins the bucket-sweep optimization inside the test proper
  std::mt19937_64 rng(43);
  const BitSequence seq = oracles::random_bits(rng, 16384);
  const std::size_t block_len = seq.size() / 8;
  const double m = 9.0;
  const double mu = (static_cast<double>(block_len) - m + 1) / 512.0;
  const double var = static_cast<double>(block_len) *
                     (1.0 / 512.0 - (2.0 * m - 1.0) / (512.0 * 512.0));

  const auto rows = sts::non_overlapping_template(seq, 9);
  REQUIRE(rows.size() == 148);
  for (const auto& row : rows) {
    REQUIRE(row.result.applicable);
    const auto counts = sts::detail::nonoverlap_block_counts(seq, 9, row.tmpl);
    double chi2 = 0.0;
    for (std::uint64_t hits : counts) {
      const double diff = static_cast<double>(hits) - mu;
      chi2 += diff * diff / var;
    }
    const double expected = rngkit::special::igamc(4.0, chi2 / 2.0);
    CHECK(row.result.p == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("overlapping occurrence counts match a string scan") {
  std::mt19937_64 rng(44);
  const BitSequence seq = oracles::random_bits(rng, 1032 * 7 + 100);
  const std::string bits = seq.to_string();
  const std::string pattern(9, '1');

  const std::vector<std::uint64_t> counts =
      sts::detail::overlap_block_counts(seq, 9);
  REQUIRE(counts.size() == 7);  // the 100-bit tail is discarded
  for (std::size_t b = 0; b < counts.size(); ++b) {
    CHECK(counts[b] == scan_overlap(bits.substr(b * 1032, 1032), pattern));
  }
}

TEST_CASE("universal statistic on the worked toy example") {
  const BitSequence seq =
      BitSequence::from_string("01011010011101010111");
  const sts::detail::UniversalStat stat =
      sts::detail::universal_statistic(seq, 2, 4);
  CHECK(stat.test_blocks == 6);
  CHECK(stat.fn == doctest::Approx(1.1949875002403853).epsilon(1e-14));

  // all-zero input: every lookup hits the previous block, distance 1
  const sts::detail::UniversalStat flat =
      sts::detail::universal_statistic(BitSequence::zeros(20), 2, 4);
  CHECK(flat.fn == 0.0);
}

TEST_CASE("excursion tabulation on a hand-traced walk") {
  // bits 0110110101 -> steps -++-++-+-+ -> partial sums
  // -1 0 +1 0 +1 +2 +1 +2 +1 +2, closed by a virtual final zero
  const sts::detail::ExcursionData data =
      sts::detail::excursion_data(BitSequence::from_string("0110110101"));
  CHECK(data.cycles == 3);

  using Row = std::array<std::uint64_t, 6>;
  CHECK(data.cycle_visits[3] == Row{2, 1, 0, 0, 0, 0});  // state -1
  CHECK(data.cycle_visits[4] == Row{1, 1, 0, 1, 0, 0});  // state +1
  CHECK(data.cycle_visits[5] == Row{2, 0, 0, 1, 0, 0});  // state +2
  for (int idx : {0, 1, 2, 6, 7}) {  // states -4,-3,-2,+3,+4: never visited
    CHECK(data.cycle_visits[idx] == Row{3, 0, 0, 0, 0, 0});
  }

  std::array<std::uint64_t, 18> expected_totals{};
  expected_totals[8] = 1;   // x = -1
  expected_totals[9] = 4;   // x = +1
  expected_totals[10] = 3;  // x = +2
  CHECK(data.total_visits == expected_totals);
}

TEST_CASE("excursion state probabilities are a distribution") {
  for (int x : {-4, -3, -2, -1, 1, 2, 3, 4}) {
    double total = 0.0;
    for (unsigned k = 0; k <= 5; ++k) {
      const double pi = sts::detail::excursion_pi(k, x);
      CHECK(pi > 0.0);
      CHECK(pi < 1.0);
      total += pi;
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
  }
  // spot values for |x| = 1: stay probability 1/2, then geometric decay
  CHECK(sts::detail::excursion_pi(0, 1) == doctest::Approx(0.5));
  CHECK(sts::detail::excursion_pi(1, 1) == doctest::Approx(0.25));
  CHECK(sts::detail::excursion_pi(2, 1) == doctest::Approx(0.125));
  CHECK(sts::detail::excursion_pi(5, 1) == doctest::Approx(0.03125));
  CHECK_THROWS_AS(sts::detail::excursion_pi(0, 0), std::invalid_argument);
}

TEST_CASE("a sawtooth walk pins both excursion tests") {
  // "10" x 1000: the walk is +1,0,+1,0,..., giving 1000 one-step cycles
  const BitSequence saw = repeat("10", 1000);
  const auto variant = sts::random_excursions_variant(saw);
  REQUIRE(variant.size() == 18);
  for (const auto& row : variant) {
    REQUIRE(row.result.applicable);
    if (row.state == 1) {
      // xi(1) == J exactly, so the statistic is 0 and P is 1
      CHECK(row.result.p == doctest::Approx(1.0));
    } else {
      // every other state is never visited; far out in the tail
      CHECK(row.result.p < 1e-6);
    }
  }

  const auto exc = sts::random_excursions(saw);
  REQUIRE(exc.size() == 8);
  for (const auto& row : exc) {
    REQUIRE(row.result.applicable);
    CHECK(row.result.p < 1e-12);  // visit profile is wildly non-random
  }
}

TEST_CASE("psi-squared and phi match string-based references") {
  std::mt19937_64 rng(45);
  const BitSequence seq = oracles::random_bits(rng, 2000);
  const std::string bits = seq.to_string();
  for (std::uint32_t m : {1u, 2u, 3u, 5u, 8u}) {
    CHECK(sts::detail::serial_psi2(seq, m) ==
          doctest::Approx(psi2_reference(bits, m)).epsilon(1e-10));
    CHECK(sts::detail::apen_phi(seq, m) ==
          doctest::Approx(phi_reference(bits, m)).epsilon(1e-10));
  }
  CHECK(sts::detail::serial_psi2(seq, 0) == 0.0);
}

TEST_CASE("approximate entropy P-value decomposes through phi") {
  std::mt19937_64 rng(46);
  const BitSequence seq = oracles::random_bits(rng, 5000);
  for (std::uint32_t m : {2u, 3u, 6u}) {
    const double apen = sts::detail::apen_phi(seq, m) -
                        sts::detail::apen_phi(seq, m + 1);
    const double chi2 =
        std::max(0.0, 2.0 * 5000.0 * (std::log(2.0) - apen));
    const double expected = rngkit::special::igamc(
        std::ldexp(1.0, static_cast<int>(m) - 1), chi2 / 2.0);
    CHECK(sts::approximate_entropy(seq, m).p ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

// --- template enumeration ----------------------------------------------------

TEST_CASE("aperiodic template counts for every supported length") {
  const std::size_t expected[] = {2, 2, 4, 6, 12, 20, 40, 74, 148};
  for (std::uint32_t m = 1; m <= 9; ++m) {
    CHECK(sts::aperiodic_templates(m).size() == expected[m - 1]);
  }
  CHECK_THROWS_AS(sts::aperiodic_templates(0), std::invalid_argument);
  CHECK_THROWS_AS(sts::aperiodic_templates(17), std::invalid_argument);

  const auto& nine = sts::aperiodic_templates9();
  const auto general = sts::aperiodic_templates(9);
  REQUIRE(general.size() == nine.size());
  CHECK(std::equal(nine.begin(), nine.end(), general.begin()));
  CHECK(std::is_sorted(nine.begin(), nine.end()));
}

TEST_CASE("template enumeration equals the string-level definition") {
  std::set<std::uint16_t> from_library;
  for (std::uint16_t t : sts::aperiodic_templates(9)) from_library.insert(t);

  std::set<std::uint16_t> from_strings;
  for (std::uint32_t v = 0; v < 512; ++v) {
    if (oracles::aperiodic_string(
            sts::template_bits(static_cast<std::uint16_t>(v), 9))) {
      from_strings.insert(static_cast<std::uint16_t>(v));
    }
  }
  CHECK(from_library == from_strings);
}

TEST_CASE("template bit strings round-trip the pattern value") {
  for (std::uint32_t m : {1u, 5u, 9u, 16u}) {
    for (std::uint16_t t : sts::aperiodic_templates(m)) {
      const std::string s = sts::template_bits(t, m);
      REQUIRE(s.size() == m);
      std::uint16_t back = 0;
      for (char c : s) {
        back = static_cast<std::uint16_t>((back << 1) | (c == '1'));
      }
      CHECK(back == t);
    }
  }
  CHECK(sts::template_bits(0b000000001, 9) == "000000001");
  CHECK(sts::template_bits(0b101, 3) == "101");
}

// --- property suites ---------------------------------------------------------

TEST_CASE("P-values stay inside the unit interval on random inputs") {
  std::mt19937_64 rng(47);
  auto check01 = [](const PResult& r) {
    if (!r.applicable) return;
    CHECK(r.p >= 0.0);
    CHECK(r.p <= 1.0);
  };
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 100 + rng() % 400;
    const BitSequence seq = oracles::random_bits(rng, n);
    check01(sts::frequency(seq));
    check01(sts::runs(seq));
    check01(sts::block_frequency(seq, 13));
    const auto cs = sts::cumulative_sums(seq);
    check01(cs[0]);
    check01(cs[1]);
    const auto s = sts::serial(seq, 5);
    check01(s[0]);
    check01(s[1]);
    check01(sts::approximate_entropy(seq, 4));
    check01(sts::longest_run(seq));
  }
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2000 + rng() % 3000;
    const BitSequence seq = oracles::random_bits(rng, n);
    check01(sts::rank(seq));
    check01(sts::fft(seq));
    check01(sts::overlapping_template(seq, 9));
    check01(sts::linear_complexity(seq, 500));
    for (const auto& row : sts::non_overlapping_template(seq, 9)) {
      check01(row.result);
    }
    for (const auto& row : sts::random_excursions(seq)) check01(row.result);
    for (const auto& row : sts::random_excursions_variant(seq)) {
      check01(row.result);
    }
    check01(sts::universal(seq));
  }
}

TEST_CASE("excursion tests handle long walks with many cycles") {
  // pinned seed chosen so the walk accumulates well over 500 cycles
  std::mt19937_64 rng(48);
  const BitSequence seq = oracles::random_bits(rng, 800000);
  const auto exc = sts::random_excursions(seq);
  REQUIRE(exc.size() == 8);
  for (const auto& row : exc) {
    REQUIRE(row.result.applicable);
    CHECK(row.result.p >= 0.0);
    CHECK(row.result.p <= 1.0);
  }
  const auto var = sts::random_excursions_variant(seq);
  REQUIRE(var.size() == 18);
  for (const auto& row : var) {
    REQUIRE(row.result.applicable);
    CHECK(row.result.p >= 0.0);
    CHECK(row.result.p <= 1.0);
  }
}

TEST_CASE("complementing the bits preserves symmetric statistics") {
  std::mt19937_64 rng(49);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 500 + rng() % 1000;
    const BitSequence seq = oracles::random_bits(rng, n);
    const BitSequence flip = complemented(seq);

    CHECK(sts::frequency(seq).p == sts::frequency(flip).p);
    // pi is computed in floating point, so symmetry holds to rounding only
    CHECK(sts::runs(seq).p ==
          doctest::Approx(sts::runs(flip).p).epsilon(1e-12));
    const auto a = sts::cumulative_sums(seq);
    const auto b = sts::cumulative_sums(flip);
    CHECK(a[0].p == b[0].p);
    CHECK(a[1].p == b[1].p);
  }
}

TEST_CASE("rotating the bits preserves the circular-window statistics") {
  std::mt19937_64 rng(50);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = 300 + rng() % 700;
    const BitSequence seq = oracles::random_bits(rng, n);
    const BitSequence rot = rotated(seq, 1 + rng() % (n - 1));

    const auto s1 = sts::serial(seq, 6);
    const auto s2 = sts::serial(rot, 6);
    CHECK(s1[0].p == s2[0].p);
    CHECK(s1[1].p == s2[1].p);
    CHECK(sts::approximate_entropy(seq, 5).p ==
          sts::approximate_entropy(rot, 5).p);
  }
}

TEST_CASE("reversing the sequence swaps the cumulative sums directions") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 50; ++trial) {
    const BitSequence seq = oracles::random_bits(rng, 400 + rng() % 400);
    const auto fwd = sts::cumulative_sums(seq);
    const auto rev = sts::cumulative_sums(reversed(seq));
    CHECK(fwd[0].p == rev[1].p);
    CHECK(fwd[1].p == rev[0].p);
  }
}

// --- battery structure ---------------------------------------------------------

TEST_CASE("run_all emits the full canonical row set") {
  std::mt19937_64 rng(52);
  const BitSequence seq = oracles::random_bits(rng, 65536);
  const SuiteConfig cfg;
  const auto rows = sts::run_all(seq, cfg);

  std::map<TestKind, std::size_t> per_test;
  for (const auto& row : rows) ++per_test[row.test];

  CHECK(per_test[TestKind::kFrequency] == 1);
  CHECK(per_test[TestKind::kBlockFrequency] == 1);
  CHECK(per_test[TestKind::kCumulativeSums] == 2);
  CHECK(per_test[TestKind::kRuns] == 1);
  CHECK(per_test[TestKind::kLongestRun] == 1);
  CHECK(per_test[TestKind::kRank] == 1);
  CHECK(per_test[TestKind::kFft] == 1);
  CHECK(per_test[TestKind::kNonOverlappingTemplate] == 148);
  CHECK(per_test[TestKind::kOverlappingTemplate] == 1);
  CHECK(per_test[TestKind::kUniversal] == 1);
  CHECK(per_test[TestKind::kApproximateEntropy] == 1);
  CHECK(per_test[TestKind::kRandomExcursions] == 8);
  CHECK(per_test[TestKind::kRandomExcursionsVariant] == 18);
  CHECK(per_test[TestKind::kSerial] == 2);
  CHECK(per_test[TestKind::kLinearComplexity] == 1);
  CHECK(rows.size() == 188);

  // canonical order: grouped by test in enum order, subtests ascending
  std::size_t i = 0;
  for (TestKind kind : sts::kAllTests) {
    std::uint32_t expected_subtest = 0;
    while (i < rows.size() && rows[i].test == kind) {
      CHECK(rows[i].subtest == expected_subtest);
      ++expected_subtest;
      ++i;
    }
    CHECK(expected_subtest == per_test[kind]);
  }
  CHECK(i == rows.size());
}

TEST_CASE("run_all labels identify sibling rows") {
  std::mt19937_64 rng(53);
  const BitSequence seq = oracles::random_bits(rng, 8192);
  const auto rows = sts::run_all(seq, SuiteConfig{});

  std::vector<std::string> cusum, serial_rows, excursions, variants, tmpls;
  for (const auto& row : rows) {
    switch (row.test) {
      case TestKind::kCumulativeSums:
        cusum.push_back(row.label);
        break;
      case TestKind::kSerial:
        serial_rows.push_back(row.label);
        break;
      case TestKind::kRandomExcursions:
        excursions.push_back(row.label);
        break;
      case TestKind::kRandomExcursionsVariant:
        variants.push_back(row.label);
        break;
      case TestKind::kNonOverlappingTemplate:
        tmpls.push_back(row.label);
        break;
      case TestKind::kFrequency:
        CHECK(row.label.empty());
        break;
      default:
        break;
    }
  }
  CHECK(cusum == std::vector<std::string>{"forward", "backward"});
  CHECK(serial_rows == std::vector<std::string>{"1", "2"});
  REQUIRE(excursions.size() == 8);
  CHECK(excursions.front() == "x=-4");
  CHECK(excursions.back() == "x=4");
  REQUIRE(variants.size() == 18);
  CHECK(variants.front() == "x=-9");
  CHECK(variants[8] == "x=-1");
  CHECK(variants[9] == "x=1");
  CHECK(variants.back() == "x=9");
  REQUIRE(tmpls.size() == 148);
  const auto& nine = sts::aperiodic_templates9();
  for (std::size_t t = 0; t < tmpls.size(); ++t) {
    CHECK(tmpls[t] == sts::template_bits(nine[t], 9));
  }
}

TEST_CASE("the row set depends on the configuration, not the bits") {
  std::mt19937_64 rng(54);
  const auto rows_a = sts::run_all(oracles::random_bits(rng, 30000),
                                   SuiteConfig{});
  const auto rows_b = sts::run_all(BitSequence::zeros(30000), SuiteConfig{});
  REQUIRE(rows_a.size() == rows_b.size());
  for (std::size_t i = 0; i < rows_a.size(); ++i) {
    CHECK(rows_a[i].test == rows_b[i].test);
    CHECK(rows_a[i].subtest == rows_b[i].subtest);
    CHECK(rows_a[i].label == rows_b[i].label);
  }
}

TEST_CASE("run_battery matches per-stream run_all and is worker-invariant") {
  std::mt19937_64 rng(55);
  const BitSequence all = oracles::random_bits(rng, 5 * 20000);
  const rngkit::StreamSet set = rngkit::split_streams(all, 20000, 5);
  const SuiteConfig cfg;

  const auto sequential = sts::run_battery(set, cfg, 1);
  REQUIRE(sequential.size() == 5);
  for (std::size_t s = 0; s < 5; ++s) {
    const auto direct = sts::run_all(set.streams[s], cfg);
    REQUIRE(sequential[s].size() == direct.size());
    for (std::size_t i = 0; i < direct.size(); ++i) {
      CHECK(sequential[s][i].result.p == direct[i].result.p);
      CHECK(sequential[s][i].result.applicable == direct[i].result.applicable);
    }
  }

  const auto threaded = sts::run_battery(set, cfg, 3);
  REQUIRE(threaded.size() == 5);
  for (std::size_t s = 0; s < 5; ++s) {
    REQUIRE(threaded[s].size() == sequential[s].size());
    for (std::size_t i = 0; i < sequential[s].size(); ++i) {
      CHECK(threaded[s][i].result.p == sequential[s][i].result.p);
    }
  }

  std::vector<std::size_t> done_values;
  sts::run_battery(set, cfg, 2,
                   [&](std::size_t done, std::size_t total) {
                     CHECK(total == 5);
                     done_values.push_back(done);
                   });
  std::sort(done_values.begin(), done_values.end());
  CHECK(done_values == std::vector<std::size_t>{1, 2, 3, 4, 5});
}

TEST_CASE("test names are the canonical spellings") {
  CHECK(sts::test_name(TestKind::kFrequency) == "Frequency");
  CHECK(sts::test_name(TestKind::kCumulativeSums) == "CumulativeSums");
  CHECK(sts::test_name(TestKind::kNonOverlappingTemplate) ==
        "NonOverlappingTemplate");
  CHECK(sts::test_name(TestKind::kRandomExcursionsVariant) ==
        "RandomExcursionsVariant");
  CHECK(sts::test_name(TestKind::kFft) == "FFT");
  std::set<std::string_view> names;
  for (TestKind kind : sts::kAllTests) names.insert(sts::test_name(kind));
  CHECK(names.size() == 15);
}
