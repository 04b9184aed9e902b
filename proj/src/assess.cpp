#include "rngkit/assess.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <stdexcept>

#include "rngkit/special.hpp"
#include "rngkit/version.hpp"

namespace rngkit::assess {

namespace {

std::string format(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
std::string format(const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

sts::TestKind parse_test_name(const std::string& name) {
  for (sts::TestKind kind : sts::kAllTests) {
    if (sts::test_name(kind) == name) return kind;
  }
  throw std::invalid_argument("unknown test name: " + name);
}

std::string row_title(const TestSummary& s) {
  std::string title{sts::test_name(s.test)};
  if (!s.label.empty()) {
    title += "(";
    title += s.label;
    title += ")";
  }
  return title;
}

// "0*" when the uniformity check failed so hard the value rounds to zero at
// six decimals; otherwise the value, starred if the check failed.
std::string uniformity_cell(const TestSummary& s) {
  if (s.sample_size == 0) return "----";
  if (!s.uniformity_applicable) return "----";
  std::string cell;
  if (!s.uniformity_ok && s.uniformity_p < 5e-7) {
    cell = "0";
  } else {
    cell = format("%.6f", s.uniformity_p);
  }
  if (!s.uniformity_ok) cell += "*";
  return cell;
}

std::string proportion_cell(const TestSummary& s) {
  if (s.sample_size == 0) return "----";
  std::string cell = format("%u/%u", s.proportion_passed, s.sample_size);
  if (!s.proportion_ok) cell += "*";
  return cell;
}

// Deterministic "worst row" order: failing before passing, then smaller
// proportion headroom, then smaller uniformity P-value.
bool worse_than(const TestSummary& a, const TestSummary& b) {
  if (a.pass != b.pass) return !a.pass;
  const auto margin = [](const TestSummary& s) {
    return static_cast<std::int64_t>(s.proportion_passed) -
           static_cast<std::int64_t>(s.min_pass);
  };
  if (margin(a) != margin(b)) return margin(a) < margin(b);
  if (a.uniformity_p != b.uniformity_p) return a.uniformity_p < b.uniformity_p;
  return a.subtest < b.subtest;
}

}  // namespace

bool stream_pass(double p, double alpha) { return p >= alpha; }

bool stream_pass_strict(double p, double alpha) {
  return p >= alpha && p <= 1.0 - alpha;
}

std::uint32_t min_pass_count(std::uint32_t sample_size, double alpha) {
  if (sample_size == 0) return 0;
  const double s = sample_size;
  const double phat = 1.0 - alpha;
  const double bound = s * (phat - 3.0 * std::sqrt(phat * alpha / s));
  if (bound <= 0.0) return 0;
  return static_cast<std::uint32_t>(std::floor(bound));
}

UniformityResult uniformity_pvalue(std::span<const double> pvalues,
                                   std::uint32_t bins) {
  if (bins < 2) throw std::invalid_argument("need at least 2 bins");
  UniformityResult res;
  res.histogram.assign(bins, 0);
  if (pvalues.empty()) return res;  // inapplicable
  for (double p : pvalues) {
    auto cell = static_cast<std::size_t>(p * bins);
    if (cell >= bins) cell = bins - 1;  // P = 1.0 lands in the top cell
    ++res.histogram[cell];
  }
  const double expected = static_cast<double>(pvalues.size()) / bins;
  double chi2 = 0.0;
  for (std::uint32_t c : res.histogram) {
    const double diff = static_cast<double>(c) - expected;
    chi2 += diff * diff / expected;
  }
  res.chi2 = chi2;
  res.p = special::igamc((bins - 1) / 2.0, chi2 / 2.0);
  res.applicable = true;
  return res;
}

std::vector<TestSummary> summarize(
    const std::vector<std::vector<sts::StreamTestResult>>& per_stream,
    const sts::SuiteConfig& cfg) {
  std::vector<TestSummary> out;
  if (per_stream.empty()) return out;
  const std::size_t rows = per_stream[0].size();
  for (const auto& stream_rows : per_stream) {
    if (stream_rows.size() != rows) {
      throw std::logic_error("streams produced different row sets");
    }
  }

  out.reserve(rows);
  std::vector<double> ps;
  for (std::size_t r = 0; r < rows; ++r) {
    const sts::StreamTestResult& proto = per_stream[0][r];
    TestSummary summary;
    summary.test = proto.test;
    summary.subtest = proto.subtest;
    summary.label = proto.label;

    ps.clear();
    std::uint32_t passed = 0;
    for (const auto& stream_rows : per_stream) {
      const sts::StreamTestResult& row = stream_rows[r];
      if (row.test != proto.test || row.subtest != proto.subtest) {
        throw std::logic_error("streams produced different row sets");
      }
      if (!row.result.applicable) continue;
      ps.push_back(row.result.p);
      const bool ok = cfg.strict_band
                          ? stream_pass_strict(row.result.p, cfg.alpha)
                          : stream_pass(row.result.p, cfg.alpha);
      passed += ok;
    }

    const UniformityResult uni = uniformity_pvalue(ps, cfg.histogram_bins);
    summary.histogram = uni.histogram;
    summary.uniformity_p = uni.p;
    summary.uniformity_applicable = uni.applicable;
    summary.sample_size = static_cast<std::uint32_t>(ps.size());
    summary.proportion_passed = passed;
    summary.min_pass = min_pass_count(summary.sample_size, cfg.alpha);
    summary.proportion_ok =
        summary.sample_size > 0 && passed >= summary.min_pass;
    summary.uniformity_ok =
        uni.applicable && uni.p >= cfg.uniformity_alpha;
    summary.pass = summary.proportion_ok && summary.uniformity_ok;
    out.push_back(std::move(summary));
  }
  return out;
}

BatteryVerdict overall_verdict(const std::vector<TestSummary>& summaries) {
  BatteryVerdict verdict;
  // walk in order; rows of one test are contiguous
  for (std::size_t i = 0; i < summaries.size();) {
    const sts::TestKind kind = summaries[i].test;
    bool all_pass = true;
    for (; i < summaries.size() && summaries[i].test == kind; ++i) {
      all_pass = all_pass && summaries[i].pass;
    }
    ++verdict.tests_total;
    verdict.tests_passed += all_pass;
  }
  verdict.pass = verdict.tests_passed == verdict.tests_total;
  return verdict;
}

Report make_report(
    const sts::SuiteConfig& cfg,
    const std::vector<std::vector<sts::StreamTestResult>>& per_stream,
    bool keep_streams) {
  Report report;
  report.config = cfg;
  report.summaries = summarize(per_stream, cfg);
  report.verdict = overall_verdict(report.summaries);
  if (keep_streams) report.per_stream = per_stream;
  return report;
}

std::vector<TestSummary> condensed_view(
    const std::vector<TestSummary>& summaries) {
  std::vector<TestSummary> out;
  for (std::size_t i = 0; i < summaries.size();) {
    const sts::TestKind kind = summaries[i].test;
    std::size_t begin = i;
    while (i < summaries.size() && summaries[i].test == kind) ++i;
    const bool keep_all = kind == sts::TestKind::kCumulativeSums ||
                          kind == sts::TestKind::kSerial;
    if (keep_all || i - begin == 1) {
      out.insert(out.end(), summaries.begin() + begin, summaries.begin() + i);
      continue;
    }
    std::size_t worst = begin;
    for (std::size_t r = begin + 1; r < i; ++r) {
      if (worse_than(summaries[r], summaries[worst])) worst = r;
    }
    out.push_back(summaries[worst]);
  }
  return out;
}

std::string render_text_report(const Report& report) {
  std::string out;
  auto line = [&out](const std::string& s) {
    out += s;
    out += '\n';
  };
  const std::uint32_t bins = report.config.histogram_bins;
  const std::size_t width = 4 * bins + 45;
  const std::string rule(width, '-');
  const std::string dbl_rule(width, '=');

  line(dbl_rule);
  line(std::string(kToolName) + " " + std::string(kVersion) +
       " - randomness assessment report");
  line("generated: " +
       (report.timestamp.empty() ? "(not recorded)" : report.timestamp));
  line(dbl_rule);
  line("configuration");
  const sts::SuiteConfig& cfg = report.config;
  line(format("  stream_length       = %zu", cfg.stream_length));
  line(format("  num_streams         = %zu", cfg.num_streams));
  line(format("  block_frequency_m   = %u", cfg.block_frequency_m));
  line(format("  nonoverlapping_m    = %u", cfg.nonoverlapping_m));
  line(format("  overlapping_m       = %u", cfg.overlapping_m));
  line(format("  approx_entropy_m    = %u", cfg.approx_entropy_m));
  line(format("  serial_m            = %u", cfg.serial_m));
  line(format("  linear_complexity_m = %u", cfg.linear_complexity_m));
  line(format("  alpha               = %g", cfg.alpha));
  line(format("  uniformity_alpha    = %g", cfg.uniformity_alpha));
  line(format("  histogram_bins      = %u", cfg.histogram_bins));
  line(format("  strict_band         = %s", cfg.strict_band ? "on" : "off"));

  // count rows per test to know where summary rows are wanted
  std::size_t nonoverlap_rows = 0;
  for (const TestSummary& s : report.summaries) {
    nonoverlap_rows += s.test == sts::TestKind::kNonOverlappingTemplate;
  }
  if (nonoverlap_rows > 1) {
    line("note: NonOverlappingTemplate appears once per template plus a "
         "'(worst ...)' summary row;");
    line("      condensed listings keep only the worst row per multi-row "
         "test.");
  }

  line(rule);
  {
    std::string header;
    for (std::uint32_t b = 1; b <= bins; ++b) {
      header += format("%4s", ("C" + std::to_string(b)).c_str());
    }
    header += format("  %9s  %10s  %s", "P-VALUE", "PROPORTION",
                     "STATISTICAL TEST");
    line(header);
  }
  line(rule);

  auto render_row = [&](const TestSummary& s, const std::string& title) {
    std::string row;
    for (std::uint32_t b = 0; b < bins; ++b) {
      if (s.sample_size == 0) {
        row += format("%4s", "--");
      } else {
        row += format("%4u", s.histogram[b]);
      }
    }
    row += format("  %9s  %10s  %s", uniformity_cell(s).c_str(),
                  proportion_cell(s).c_str(), title.c_str());
    line(row);
  };

  for (std::size_t i = 0; i < report.summaries.size();) {
    const sts::TestKind kind = report.summaries[i].test;
    const std::size_t begin = i;
    while (i < report.summaries.size() && report.summaries[i].test == kind) {
      render_row(report.summaries[i], row_title(report.summaries[i]));
      ++i;
    }
    // multi-template test: repeat the worst row as a quick-reference summary
    if (kind == sts::TestKind::kNonOverlappingTemplate && i - begin > 1) {
      std::size_t worst = begin;
      for (std::size_t r = begin + 1; r < i; ++r) {
        if (worse_than(report.summaries[r], report.summaries[worst]))
          worst = r;
      }
      render_row(report.summaries[worst],
                 format("%s(worst of %zu templates)",
                        std::string(sts::test_name(kind)).c_str(), i - begin));
    }
  }

  line(rule);
  line("condensed view");
  line(rule);
  line(format("  %9s  %10s  %-5s %s", "P-VALUE", "PROPORTION", "PASS",
              "STATISTICAL TEST"));
  for (const TestSummary& s : condensed_view(report.summaries)) {
    line(format("  %9s  %10s  %-5s %s", uniformity_cell(s).c_str(),
                proportion_cell(s).c_str(), s.pass ? "YES" : "NO",
                row_title(s).c_str()));
  }
  line(rule);
  line(format("OVERALL: %u out of %u tests passed; verdict %s",
              report.verdict.tests_passed, report.verdict.tests_total,
              report.verdict.pass ? "YES" : "NO"));
  line(dbl_rule);
  return out;
}

nlohmann::json to_json(const Report& report, bool include_streams) {
  nlohmann::json j;
  j["schema"] = "sts-report/1";

  const sts::SuiteConfig& cfg = report.config;
  j["config"] = {
      {"stream_length", cfg.stream_length},
      {"num_streams", cfg.num_streams},
      {"block_frequency_m", cfg.block_frequency_m},
      {"nonoverlapping_m", cfg.nonoverlapping_m},
      {"overlapping_m", cfg.overlapping_m},
      {"approx_entropy_m", cfg.approx_entropy_m},
      {"serial_m", cfg.serial_m},
      {"linear_complexity_m", cfg.linear_complexity_m},
      {"alpha", cfg.alpha},
      {"uniformity_alpha", cfg.uniformity_alpha},
      {"histogram_bins", cfg.histogram_bins},
      {"strict_band", cfg.strict_band},
  };

  j["summaries"] = nlohmann::json::array();
  for (const TestSummary& s : report.summaries) {
    j["summaries"].push_back({
        {"test", std::string(sts::test_name(s.test))},
        {"subtest", s.subtest},
        {"label", s.label},
        {"histogram", s.histogram},
        {"uniformity_p", s.uniformity_p},
        {"uniformity_applicable", s.uniformity_applicable},
        {"proportion_passed", s.proportion_passed},
        {"sample_size", s.sample_size},
        {"min_pass", s.min_pass},
        {"proportion_ok", s.proportion_ok},
        {"uniformity_ok", s.uniformity_ok},
        {"pass", s.pass},
    });
  }

  j["verdict"] = {
      {"tests_passed", report.verdict.tests_passed},
      {"tests_total", report.verdict.tests_total},
      {"pass", report.verdict.pass},
  };

  if (include_streams && !report.per_stream.empty()) {
    nlohmann::json streams = nlohmann::json::array();
    for (const auto& rows : report.per_stream) {
      nlohmann::json stream = nlohmann::json::array();
      for (const sts::StreamTestResult& r : rows) {
        nlohmann::json row = {
            {"test", std::string(sts::test_name(r.test))},
            {"subtest", r.subtest},
            {"label", r.label},
            {"applicable", r.result.applicable},
        };
        if (r.result.applicable) {
          row["p"] = r.result.p;
        } else {
          row["reason"] = r.result.reason;
        }
        stream.push_back(std::move(row));
      }
      streams.push_back(std::move(stream));
    }
    j["streams"] = std::move(streams);
  }
  return j;
}

Report report_from_json(const nlohmann::json& j) {
  if (j.value("schema", "") != "sts-report/1") {
    throw std::invalid_argument("unsupported report schema");
  }
  Report report;
  const nlohmann::json& cfg = j.at("config");
  report.config.stream_length = cfg.at("stream_length").get<std::size_t>();
  report.config.num_streams = cfg.at("num_streams").get<std::size_t>();
  report.config.block_frequency_m =
      cfg.at("block_frequency_m").get<std::uint32_t>();
  report.config.nonoverlapping_m =
      cfg.at("nonoverlapping_m").get<std::uint32_t>();
  report.config.overlapping_m = cfg.at("overlapping_m").get<std::uint32_t>();
  report.config.approx_entropy_m =
      cfg.at("approx_entropy_m").get<std::uint32_t>();
  report.config.serial_m = cfg.at("serial_m").get<std::uint32_t>();
  report.config.linear_complexity_m =
      cfg.at("linear_complexity_m").get<std::uint32_t>();
  report.config.alpha = cfg.at("alpha").get<double>();
  report.config.uniformity_alpha = cfg.at("uniformity_alpha").get<double>();
  report.config.histogram_bins = cfg.at("histogram_bins").get<std::uint32_t>();
  report.config.strict_band = cfg.at("strict_band").get<bool>();

  for (const nlohmann::json& s : j.at("summaries")) {
    TestSummary summary;
    summary.test = parse_test_name(s.at("test").get<std::string>());
    summary.subtest = s.at("subtest").get<std::uint32_t>();
    summary.label = s.at("label").get<std::string>();
    summary.histogram = s.at("histogram").get<std::vector<std::uint32_t>>();
    summary.uniformity_p = s.at("uniformity_p").get<double>();
    summary.uniformity_applicable = s.at("uniformity_applicable").get<bool>();
    summary.proportion_passed = s.at("proportion_passed").get<std::uint32_t>();
    summary.sample_size = s.at("sample_size").get<std::uint32_t>();
    summary.min_pass = s.at("min_pass").get<std::uint32_t>();
    summary.proportion_ok = s.at("proportion_ok").get<bool>();
    summary.uniformity_ok = s.at("uniformity_ok").get<bool>();
    summary.pass = s.at("pass").get<bool>();
    report.summaries.push_back(std::move(summary));
  }

  const nlohmann::json& v = j.at("verdict");
  report.verdict.tests_passed = v.at("tests_passed").get<std::uint32_t>();
  report.verdict.tests_total = v.at("tests_total").get<std::uint32_t>();
  report.verdict.pass = v.at("pass").get<bool>();

  if (j.contains("streams")) {
    for (const nlohmann::json& stream : j.at("streams")) {
      std::vector<sts::StreamTestResult> rows;
      for (const nlohmann::json& r : stream) {
        sts::StreamTestResult row;
        row.test = parse_test_name(r.at("test").get<std::string>());
        row.subtest = r.at("subtest").get<std::uint32_t>();
        row.label = r.at("label").get<std::string>();
        row.result.applicable = r.at("applicable").get<bool>();
        if (row.result.applicable) {
          row.result.p = r.at("p").get<double>();
        } else {
          row.result.reason = r.at("reason").get<std::string>();
        }
        rows.push_back(std::move(row));
      }
      report.per_stream.push_back(std::move(rows));
    }
  }
  return report;
}

}  // namespace rngkit::assess
