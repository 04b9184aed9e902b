#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "rngkit/assess.hpp"
#include "rngkit/bitseq.hpp"
#include "rngkit/extract.hpp"
#include "rngkit/manifest.hpp"
#include "rngkit/sources.hpp"
#include "rngkit/sts.hpp"
#include "rngkit/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitBatteryFailed = 1;
constexpr int kExitError = 2;

std::string join_command(int argc, char** argv) {
  std::string cmd;
  for (int i = 0; i < argc; ++i) {
    if (i > 0) cmd += ' ';
    cmd += argv[i];
  }
  return cmd;
}

struct ExtractOptions {
  std::string input;
  std::string output;
  std::uint64_t threshold_bytes = 0;
  std::uint64_t cut_bits = 4000;
  std::string format = "ascii";
  bool final_newline = false;
  std::string manifest_path;
};

int cmd_extract(const ExtractOptions& opt, const std::string& command) {
  rngkit::ExtractionConfig cfg;
  cfg.threshold_bytes = opt.threshold_bytes;
  cfg.cut_bits = opt.cut_bits;
  cfg.output = opt.format == "packed" ? rngkit::OutputFormat::kPacked
                                      : rngkit::OutputFormat::kAscii;

  // Open the input before creating the output so a missing input never
  // leaves a half-created output file behind.
  rngkit::FileByteSource source(opt.input);

  rngkit::ExtractionStats stats;
  if (cfg.output == rngkit::OutputFormat::kPacked) {
    rngkit::PackedFileSink sink(opt.output);
    stats = rngkit::extract_stream(source, cfg, sink);
    sink.close();
  } else {
    rngkit::AsciiFileSink sink(opt.output, opt.final_newline);
    stats = rngkit::extract_stream(source, cfg, sink);
    sink.close();
  }

  if (stats.bits_emitted == 0) {
    std::filesystem::remove(opt.output);
    std::cerr << "error: no bits emitted (" << stats.bytes_read
              << " bytes read; threshold " << opt.threshold_bytes
              << " bytes and cut " << opt.cut_bits
              << " bits consumed everything)\n";
    return kExitError;
  }

  std::cout << "bytes_read=" << stats.bytes_read << '\n'
            << "bits_emitted=" << stats.bits_emitted << '\n'
            << "ones=" << stats.ones << '\n'
            << "zeros=" << stats.zeros << '\n'
            << "longest_run_ones=" << stats.longest_run_ones << '\n'
            << "longest_run_zeros=" << stats.longest_run_zeros << '\n';

  if (!opt.manifest_path.empty()) {
    rngkit::RunManifest manifest;
    manifest.command = command;
    manifest.config = {{"threshold_bytes", opt.threshold_bytes},
                       {"cut_bits", opt.cut_bits},
                       {"format", opt.format},
                       {"final_newline", opt.final_newline}};
    manifest.inputs.push_back(rngkit::digest_file(opt.input));
    manifest.version = std::string(rngkit::kVersion);
    manifest.timestamp = rngkit::now_rfc3339();
    rngkit::write_manifest(manifest, opt.manifest_path);
  }
  return kExitOk;
}

struct GenerateOptions {
  std::string kind = "reference-mixer";
  std::uint64_t seed = 0;
  std::uint64_t bytes = 0;
  std::string output;
};

int cmd_generate(const GenerateOptions& opt) {
  const auto kind = rngkit::sources::parse_kind(opt.kind);
  if (!kind) {
    std::cerr << "error: unknown source kind: " << opt.kind << '\n';
    return kExitError;
  }
  std::ofstream out(opt.output, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot open output file: " << opt.output << '\n';
    return kExitError;
  }
  auto generator = rngkit::sources::make_generator(*kind, opt.seed);
  std::vector<std::uint8_t> buf(1 << 20);
  std::uint64_t remaining = opt.bytes;
  while (remaining > 0) {
    const auto chunk = static_cast<std::size_t>(
        std::min<std::uint64_t>(buf.size(), remaining));
    generator->fill({buf.data(), chunk});
    out.write(reinterpret_cast<const char*>(buf.data()),
              static_cast<std::streamsize>(chunk));
    remaining -= chunk;
  }
  if (!out) {
    std::cerr << "error: write failed: " << opt.output << '\n';
    return kExitError;
  }
  return kExitOk;
}

struct AssessOptions {
  std::string input;
  std::string input_format = "ascii";
  rngkit::sts::SuiteConfig cfg;
  unsigned workers = 0;
  bool quiet = false;
  bool no_streams = false;
  bool always_zero_exit = false;
  std::string text_report_path;
  std::string json_report_path;
  std::string manifest_path;
};

int cmd_assess(const AssessOptions& opt, const std::string& command) {
  rngkit::BitSequence bits =
      opt.input_format == "packed"
          ? rngkit::read_packed(opt.input)
          : rngkit::read_ascii(opt.input);

  std::size_t dropped = 0;
  rngkit::StreamSet set = rngkit::split_streams(
      bits, opt.cfg.stream_length, opt.cfg.num_streams, &dropped);
  if (dropped > 0 && !opt.quiet) {
    std::cerr << "note: dropped " << dropped
              << " tail bits not covering a full stream\n";
  }

  auto progress = [&](std::size_t done, std::size_t total) {
    if (!opt.quiet) {
      std::cerr << "stream " << done << "/" << total << " done\n";
    }
  };
  const auto results =
      rngkit::sts::run_battery(set, opt.cfg, opt.workers, progress);

  rngkit::assess::Report report =
      rngkit::assess::make_report(opt.cfg, results, !opt.no_streams);
  report.timestamp = rngkit::now_rfc3339();

  const std::string text = rngkit::assess::render_text_report(report);
  std::cout << text;

  if (!opt.text_report_path.empty()) {
    std::ofstream out(opt.text_report_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot open text report output: "
                << opt.text_report_path << '\n';
      return kExitError;
    }
    out << text;
  }
  nlohmann::json report_json =
      rngkit::assess::to_json(report, !opt.no_streams);
  if (!opt.json_report_path.empty()) {
    std::ofstream out(opt.json_report_path, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot open report output: "
                << opt.json_report_path << '\n';
      return kExitError;
    }
    out << report_json.dump(2) << '\n';
  }
  if (!opt.manifest_path.empty()) {
    rngkit::RunManifest manifest;
    manifest.command = command;
    manifest.config = report_json.at("config");
    manifest.config["input_format"] = opt.input_format;
    manifest.config["workers"] = opt.workers;
    manifest.inputs.push_back(rngkit::digest_file(opt.input));
    manifest.version = std::string(rngkit::kVersion);
    manifest.timestamp = report.timestamp;
    rngkit::write_manifest(manifest, opt.manifest_path);
  }

  if (report.verdict.pass || opt.always_zero_exit) return kExitOk;
  return kExitBatteryFailed;
}

struct ReportOptions {
  std::string input;
  std::string output;
};

int cmd_report(const ReportOptions& opt) {
  std::ifstream in(opt.input, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open report: " << opt.input << '\n';
    return kExitError;
  }
  nlohmann::json j;
  in >> j;
  const rngkit::assess::Report report = rngkit::assess::report_from_json(j);
  const std::string text = rngkit::assess::render_text_report(report);
  if (opt.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(opt.output, std::ios::binary);
    if (!out) {
      std::cerr << "error: cannot open output: " << opt.output << '\n';
      return kExitError;
    }
    out << text;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bit extraction and statistical assessment of raw random "
               "byte streams"};
  app.set_version_flag("--version",
                       std::string(rngkit::kToolName) + " " +
                           std::string(rngkit::kVersion));
  app.require_subcommand(1);
  const std::string command = join_command(argc, argv);

  ExtractOptions ext;
  CLI::App* extract =
      app.add_subcommand("extract", "map raw bytes to bits (value mod 2)");
  extract->add_option("--input", ext.input, "raw byte file")->required();
  extract->add_option("--output", ext.output, "extracted bit file")
      ->required();
  extract->add_option("--threshold-bytes", ext.threshold_bytes,
                      "leading bytes to skip before extracting");
  extract->add_option("--cut-bits", ext.cut_bits,
                      "extracted bits to discard before the first output bit");
  extract->add_option("--format", ext.format, "output format")
      ->check(CLI::IsMember({"ascii", "packed"}));
  extract->add_flag("--final-newline", ext.final_newline,
                    "terminate ascii output with a newline");
  extract->add_option("--manifest", ext.manifest_path,
                      "write a run manifest to this path");

  GenerateOptions gen;
  CLI::App* generate =
      app.add_subcommand("generate", "produce calibration byte streams");
  generate->add_option("--kind", gen.kind, "source kind")
      ->check(CLI::IsMember({"reference-mixer", "all-zero", "alternating",
                             "ffcs-sim", "smlt-sim"}));
  generate->add_option("--seed", gen.seed, "generator seed");
  generate->add_option("--bytes", gen.bytes, "bytes to produce")->required();
  generate->add_option("--output", gen.output, "output file")->required();

  AssessOptions ass;
  CLI::App* assess =
      app.add_subcommand("assess", "run the statistical test battery");
  assess->add_option("--input", ass.input, "bit stream file")->required();
  assess->add_option("--input-format", ass.input_format,
                     "how the input encodes bits")
      ->check(CLI::IsMember({"ascii", "packed"}));
  assess->add_option("--stream-length", ass.cfg.stream_length,
                     "bits per stream");
  assess->add_option("--streams", ass.cfg.num_streams, "number of streams");
  assess->add_option("--block-frequency-m", ass.cfg.block_frequency_m,
                     "BlockFrequency block length");
  assess->add_option("--nonoverlapping-m", ass.cfg.nonoverlapping_m,
                     "NonOverlappingTemplate template length");
  assess->add_option("--overlapping-m", ass.cfg.overlapping_m,
                     "OverlappingTemplate template length");
  assess->add_option("--approx-entropy-m", ass.cfg.approx_entropy_m,
                     "ApproximateEntropy block length");
  assess->add_option("--serial-m", ass.cfg.serial_m, "Serial block length");
  assess->add_option("--linear-complexity-m", ass.cfg.linear_complexity_m,
                     "LinearComplexity block length");
  assess->add_option("--alpha", ass.cfg.alpha, "per-stream significance");
  assess->add_option("--uniformity-alpha", ass.cfg.uniformity_alpha,
                     "uniformity significance");
  assess->add_option("--histogram-bins", ass.cfg.histogram_bins,
                     "P-value histogram cells");
  assess->add_flag("--strict-band", ass.cfg.strict_band,
                   "also reject P-values above 1 - alpha");
  assess->add_option("--workers", ass.workers,
                     "worker threads (0 = hardware)");
  assess->add_flag("--quiet", ass.quiet, "suppress progress output");
  assess->add_flag("--no-streams", ass.no_streams,
                   "omit per-stream results from the structured report");
  assess->add_flag("--always-zero-exit", ass.always_zero_exit,
                   "exit 0 even when the battery fails");
  assess->add_option("--text-report", ass.text_report_path,
                     "also write the text report here");
  assess->add_option("--json-report", ass.json_report_path,
                     "write the structured report here");
  assess->add_option("--manifest", ass.manifest_path,
                     "write a run manifest to this path");

  ReportOptions rep;
  CLI::App* report =
      app.add_subcommand("report", "render a structured report as text");
  report->add_option("--input", rep.input, "structured report file")
      ->required();
  report->add_option("--output", rep.output,
                     "output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (extract->parsed()) return cmd_extract(ext, command);
    if (generate->parsed()) return cmd_generate(gen);
    if (assess->parsed()) return cmd_assess(ass, command);
    if (report->parsed()) return cmd_report(rep);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
