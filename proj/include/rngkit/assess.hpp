#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "rngkit/sts.hpp"

namespace rngkit::assess {

// Aggregate of one subtest row across all streams.
struct TestSummary {
  sts::TestKind test = sts::TestKind::kFrequency;
  std::uint32_t subtest = 0;
  std::string label;

  std::vector<std::uint32_t> histogram;  // decile counts C1..C10
  double uniformity_p = 0.0;
  bool uniformity_applicable = false;

  std::uint32_t proportion_passed = 0;
  std::uint32_t sample_size = 0;  // applicable streams only
  std::uint32_t min_pass = 0;

  bool proportion_ok = false;
  bool uniformity_ok = false;
  bool pass = false;
};

// Per-stream accept decision. The default rule is one-sided: p >= alpha.
// The strict variant also rejects suspiciously perfect values above
// 1 - alpha.
bool stream_pass(double p, double alpha);
bool stream_pass_strict(double p, double alpha);

// Smallest acceptable number of passing streams out of sample_size at
// significance alpha: floor(s * (phat - 3 * sqrt(phat * alpha / s))) with
// phat = 1 - alpha.
std::uint32_t min_pass_count(std::uint32_t sample_size, double alpha);

struct UniformityResult {
  double p = 0.0;
  bool applicable = false;
  double chi2 = 0.0;
  std::vector<std::uint32_t> histogram;
};

// Chi-square uniformity of P-values over `bins` equal cells of [0,1];
// P = 1.0 falls in the top cell. An empty sample is inapplicable.
UniformityResult uniformity_pvalue(std::span<const double> pvalues,
                                   std::uint32_t bins = 10);

// Collapses per-stream results into one summary per subtest row, in the
// canonical row order. Streams where a subtest was inapplicable are excluded
// from that row's sample.
std::vector<TestSummary> summarize(
    const std::vector<std::vector<sts::StreamTestResult>>& per_stream,
    const sts::SuiteConfig& cfg);

struct BatteryVerdict {
  std::uint32_t tests_passed = 0;
  std::uint32_t tests_total = 0;
  bool pass = false;  // all named tests passed
};

// A named test passes only if every one of its subtest rows passes.
// Rows with an empty sample count as failing.
BatteryVerdict overall_verdict(const std::vector<TestSummary>& summaries);

struct Report {
  sts::SuiteConfig config;
  std::vector<TestSummary> summaries;
  BatteryVerdict verdict;
  // Raw per-stream results; may be empty if the producer dropped them.
  std::vector<std::vector<sts::StreamTestResult>> per_stream;
  // RFC 3339; rendered in the text report only, never serialized, so that
  // repeated runs produce byte-identical structured reports.
  std::string timestamp;
};

Report make_report(const sts::SuiteConfig& cfg,
                   const std::vector<std::vector<sts::StreamTestResult>>&
                       per_stream,
                   bool keep_streams = true);

// One row per named test (multi-row tests contribute their worst row by
// uniformity P-value, except CumulativeSums and Serial which keep both
// rows): 17 rows for the standard battery.
std::vector<TestSummary> condensed_view(
    const std::vector<TestSummary>& summaries);

// Full fixed-width text report: configuration echo, per-row histogram /
// uniformity / proportion table, condensed view, overall verdict.
std::string render_text_report(const Report& report);

// Structured form. Deterministic: keys are sorted and no timestamp is
// included.
nlohmann::json to_json(const Report& report, bool include_streams = true);
Report report_from_json(const nlohmann::json& j);

}  // namespace rngkit::assess
