#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rngkit/bitseq.hpp"

namespace rngkit::sts {

// Battery parameters. The defaults are the standard calibration settings for
// one-million-bit streams; tests that need a block length take it from here.
struct SuiteConfig {
  std::size_t stream_length = 1'000'000;
  std::size_t num_streams = 100;
  std::uint32_t block_frequency_m = 128;
  std::uint32_t nonoverlapping_m = 9;
  std::uint32_t overlapping_m = 9;
  std::uint32_t approx_entropy_m = 10;
  std::uint32_t serial_m = 16;
  std::uint32_t linear_complexity_m = 500;
  double alpha = 0.01;
  double uniformity_alpha = 0.0001;
  std::uint32_t histogram_bins = 10;
  bool strict_band = false;  // also reject P-values above 1 - alpha
};

// Outcome of one test on one stream. A test that cannot run on the given
// input (too short, not enough cycles, ...) reports applicable = false with
// a reason instead of inventing a P-value.
struct PResult {
  double p = 0.0;
  bool applicable = true;
  std::string reason;

  static PResult of(double p) { return {p, true, {}}; }
  static PResult na(std::string why) { return {0.0, false, std::move(why)}; }
};

// The fifteen tests, in canonical reporting order.
enum class TestKind {
  kFrequency,
  kBlockFrequency,
  kCumulativeSums,
  kRuns,
  kLongestRun,
  kRank,
  kFft,
  kNonOverlappingTemplate,
  kOverlappingTemplate,
  kUniversal,
  kApproximateEntropy,
  kRandomExcursions,
  kRandomExcursionsVariant,
  kSerial,
  kLinearComplexity,
};

inline constexpr std::array<TestKind, 15> kAllTests = {
    TestKind::kFrequency,
    TestKind::kBlockFrequency,
    TestKind::kCumulativeSums,
    TestKind::kRuns,
    TestKind::kLongestRun,
    TestKind::kRank,
    TestKind::kFft,
    TestKind::kNonOverlappingTemplate,
    TestKind::kOverlappingTemplate,
    TestKind::kUniversal,
    TestKind::kApproximateEntropy,
    TestKind::kRandomExcursions,
    TestKind::kRandomExcursionsVariant,
    TestKind::kSerial,
    TestKind::kLinearComplexity,
};

std::string_view test_name(TestKind kind);

// One subtest row produced by one stream. `subtest` is the 0-based ordinal
// within the test; `label` distinguishes sibling rows (template bits,
// excursion state, forward/backward, ...). Single-row tests use label "".
struct StreamTestResult {
  TestKind test;
  std::uint32_t subtest = 0;
  std::string label;
  PResult result;
};

// --- individual tests ---------------------------------------------------

PResult frequency(const BitSequence& seq);
PResult block_frequency(const BitSequence& seq, std::uint32_t block_len);
// [0] forward, [1] backward.
std::array<PResult, 2> cumulative_sums(const BitSequence& seq);
PResult runs(const BitSequence& seq);
PResult longest_run(const BitSequence& seq);
PResult rank(const BitSequence& seq);
PResult fft(const BitSequence& seq);

struct TemplateResult {
  std::uint16_t tmpl = 0;  // pattern value, first bit = most significant
  PResult result;
};
// One row per aperiodic template of length m, ordered by pattern value.
std::vector<TemplateResult> non_overlapping_template(const BitSequence& seq,
                                                     std::uint32_t m);
PResult overlapping_template(const BitSequence& seq, std::uint32_t m);
PResult universal(const BitSequence& seq);
PResult approximate_entropy(const BitSequence& seq, std::uint32_t m);

struct StateResult {
  int state = 0;
  PResult result;
};
// States -4..-1, +1..+4 in that order.
std::vector<StateResult> random_excursions(const BitSequence& seq);
// States -9..-1, +1..+9 in that order.
std::vector<StateResult> random_excursions_variant(const BitSequence& seq);

// [0] for block length m, [1] for m-1 (the second difference).
std::array<PResult, 2> serial(const BitSequence& seq, std::uint32_t m);
PResult linear_complexity(const BitSequence& seq, std::uint32_t block_len);

// --- battery ------------------------------------------------------------

// All tests on one stream, rows in canonical order. The row set depends only
// on the configuration, never on the bits: inapplicable subtests still
// produce rows.
std::vector<StreamTestResult> run_all(const BitSequence& seq,
                                      const SuiteConfig& cfg);

// run_all over every stream. workers = 0 picks the hardware concurrency;
// results are ordered by stream regardless of scheduling. progress, if set,
// is called as streams finish with (done, total).
std::vector<std::vector<StreamTestResult>> run_battery(
    const StreamSet& streams, const SuiteConfig& cfg, unsigned workers = 0,
    const std::function<void(std::size_t, std::size_t)>& progress = {});

// --- templates ----------------------------------------------------------

// The 148 aperiodic (unbordered) 9-bit patterns, ascending. Generated at
// namespace scope and checksummed by the tests, not hand-typed.
const std::array<std::uint16_t, 148>& aperiodic_templates9();
// Same enumeration for any m in 1..16.
std::vector<std::uint16_t> aperiodic_templates(std::uint32_t m);
// Pattern value -> "010..." (first bit = most significant).
std::string template_bits(std::uint16_t tmpl, std::uint32_t m);

// --- internals exposed for verification ---------------------------------

namespace detail {

// Pearson chi-square statistic over matched observed/expected cells.
double chi2_counts(std::span<const double> observed,
                   std::span<const double> expected);

struct LongestRunData {
  std::uint32_t block_len = 0;
  std::uint32_t num_blocks = 0;
  std::vector<std::uint64_t> counts;  // one cell per run-length category
};
LongestRunData longest_run_counts(const BitSequence& seq);

struct RankCounts {
  std::uint64_t full = 0, minus1 = 0, rest = 0, matrices = 0;
};
RankCounts rank_counts(const BitSequence& seq);

// Non-overlapping occurrence count of tmpl in each of the 8 blocks.
std::vector<std::uint64_t> nonoverlap_block_counts(const BitSequence& seq,
                                                   std::uint32_t m,
                                                   std::uint16_t tmpl);
// Overlapping occurrence count of the all-ones template per 1032-bit block.
std::vector<std::uint64_t> overlap_block_counts(const BitSequence& seq,
                                                std::uint32_t m);

struct UniversalStat {
  double fn = 0.0;
  std::uint64_t test_blocks = 0;
};
UniversalStat universal_statistic(const BitSequence& seq, std::uint32_t L,
                                  std::uint64_t Q);

// One pass over the random walk: number of zero crossings (cycles) and both
// visit tabulations needed by the excursion tests.
struct ExcursionData {
  std::uint64_t cycles = 0;  // J
  // [state -4..+4 excl. 0][k 0..5]: cycles in which the state was visited
  // exactly k times (k = 5 bucket means "5 or more").
  std::array<std::array<std::uint64_t, 6>, 8> cycle_visits{};
  // total visits to states -9..-1, +1..+9 across the whole walk
  std::array<std::uint64_t, 18> total_visits{};
};
ExcursionData excursion_data(const BitSequence& seq);

// Theoretical probability that state x (|x| in 1..4) is visited exactly k
// times (k in 0..5, 5 meaning ">= 5") in one cycle.
double excursion_pi(unsigned k, int x);

// psi-squared statistic over circular m-bit windows; m = 0 gives 0.
double serial_psi2(const BitSequence& seq, std::uint32_t m);
// phi statistic over circular m-bit windows.
double apen_phi(const BitSequence& seq, std::uint32_t m);

}  // namespace detail

}  // namespace rngkit::sts
