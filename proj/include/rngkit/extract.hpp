#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>

#include "rngkit/bitseq.hpp"

namespace rngkit {

enum class OutputFormat { kAscii, kPacked };

struct ExtractionConfig {
  // Leading bytes consumed before any bit is produced (device warm-up).
  std::uint64_t threshold_bytes = 0;
  // Produced bits discarded before the first emitted bit. The default covers
  // the longest constant prefix we have observed on real hardware plus a 23%
  // safety margin, rounded up to a multiple of 500.
  std::uint64_t cut_bits = 4000;
  OutputFormat output = OutputFormat::kAscii;
};

struct ExtractionStats {
  std::uint64_t bytes_read = 0;
  std::uint64_t bits_emitted = 0;
  std::uint64_t ones = 0;
  std::uint64_t zeros = 0;
  std::uint64_t longest_run_ones = 0;
  std::uint64_t longest_run_zeros = 0;
};

// One raw byte maps to one bit: its value mod 2.
inline int extract_bit(std::uint8_t byte) { return byte & 1; }

// Pull interface for raw bytes. read() fills as much of `out` as it can and
// returns the number of bytes written; 0 means end of input.
class ByteSource {
 public:
  virtual ~ByteSource() = default;
  virtual std::size_t read(std::span<std::uint8_t> out) = 0;
};

class FileByteSource : public ByteSource {
 public:
  explicit FileByteSource(const std::filesystem::path& path);
  std::size_t read(std::span<std::uint8_t> out) override;

 private:
  std::ifstream in_;
  std::filesystem::path path_;
};

class MemoryByteSource : public ByteSource {
 public:
  explicit MemoryByteSource(std::span<const std::uint8_t> data)
      : data_(data) {}
  std::size_t read(std::span<std::uint8_t> out) override;

 private:
  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
};

class FunctionByteSource : public ByteSource {
 public:
  using Fn = std::function<std::size_t(std::span<std::uint8_t>)>;
  explicit FunctionByteSource(Fn fn) : fn_(std::move(fn)) {}
  std::size_t read(std::span<std::uint8_t> out) override { return fn_(out); }

 private:
  Fn fn_;
};

// Receives extracted bits in batches; flush() marks a durability point.
class BitSink {
 public:
  virtual ~BitSink() = default;
  virtual void append(const BitSequence& bits) = 0;
  virtual void flush() {}
};

class MemoryBitSink : public BitSink {
 public:
  void append(const BitSequence& bits) override { bits_.append(bits); }
  const BitSequence& bits() const { return bits_; }
  BitSequence take() { return std::move(bits_); }

 private:
  BitSequence bits_;
};

class AsciiFileSink : public BitSink {
 public:
  explicit AsciiFileSink(const std::filesystem::path& path,
                         bool final_newline = false);
  ~AsciiFileSink() override;
  void append(const BitSequence& bits) override;
  void flush() override;
  void close();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  bool final_newline_;
  bool closed_ = false;
};

class PackedFileSink : public BitSink {
 public:
  explicit PackedFileSink(const std::filesystem::path& path,
                          BitOrder order = BitOrder::kMsbFirst);
  ~PackedFileSink() override;
  void append(const BitSequence& bits) override;
  void flush() override;
  void close();  // pads and writes the final partial byte

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  BitOrder order_;
  std::uint8_t pending_ = 0;
  unsigned pending_bits_ = 0;
  bool closed_ = false;
};

// Raised when the byte source or sink fails mid-stream. bytes_read() reports
// how far extraction got; everything already flushed to the sink stays valid.
class ExtractionError : public std::runtime_error {
 public:
  ExtractionError(const std::string& msg, std::uint64_t bytes_read)
      : std::runtime_error(msg), bytes_read_(bytes_read) {}
  std::uint64_t bytes_read() const { return bytes_read_; }

 private:
  std::uint64_t bytes_read_;
};

// Runs the full pipeline: skip cfg.threshold_bytes bytes, map each remaining
// byte to its parity, discard the first cfg.cut_bits produced bits, hand the
// rest to the sink in batches of at most 4096 bits (flushing after each batch
// so a crash loses at most one batch). Returns the stats of the emitted
// portion only.
ExtractionStats extract_stream(ByteSource& source, const ExtractionConfig& cfg,
                               BitSink& sink);

inline constexpr std::uint64_t kFlushGranularityBits = 4096;

struct CutRecommendation {
  std::uint64_t recommended;  // observed prefix plus 23%, rounded up
  std::uint64_t rounded;      // recommended, rounded up to a multiple of 500
};

// Given the longest constant prefix observed while qualifying a device,
// suggests how many leading bits to cut.
CutRecommendation margin_check(std::uint64_t observed_prefix_bits);

}  // namespace rngkit
