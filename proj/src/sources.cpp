#include "rngkit/sources.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rngkit::sources {

namespace {

class ReferenceMixer : public ByteGenerator {
 public:
  explicit ReferenceMixer(std::uint64_t seed) : rng_(seed) {}
  void fill(std::span<std::uint8_t> out) override {
    for (auto& byte : out) {
      if (have_ == 0) {
        word_ = rng_.next();
        have_ = 8;
      }
      byte = static_cast<std::uint8_t>(word_);  // little-endian byte order
      word_ >>= 8;
      --have_;
    }
  }

 private:
  SplitMix64 rng_;
  std::uint64_t word_ = 0;
  unsigned have_ = 0;
};

class ConstantSource : public ByteGenerator {
 public:
  explicit ConstantSource(std::uint8_t value) : value_(value) {}
  void fill(std::span<std::uint8_t> out) override {
    std::fill(out.begin(), out.end(), value_);
  }

 private:
  std::uint8_t value_;
};

class AlternatingSource : public ByteGenerator {
 public:
  void fill(std::span<std::uint8_t> out) override {
    for (auto& byte : out) {
      byte = phase_ ? 0x01 : 0x00;
      phase_ = !phase_;
    }
  }

 private:
  bool phase_ = false;
};

// Slow accelerometer-style reading: the byte value drifts by at most one
// step per sample, and most samples repeat the previous value exactly. Long
// constant runs and a heavily biased low bit are the point - this is the
// kind of stream the parity extractor must flag, not fix.
class SmltSim : public ByteGenerator {
 public:
  explicit SmltSim(std::uint64_t seed) : rng_(seed) {}
  void fill(std::span<std::uint8_t> out) override {
    for (auto& byte : out) {
      if (take_bits(6) == 0) {  // move with probability 1/64
        if (take_bits(1)) {
          if (level_ < 255) ++level_;
        } else {
          if (level_ > 0) --level_;
        }
      }
      byte = static_cast<std::uint8_t>(level_);
    }
  }

 private:
  std::uint64_t take_bits(unsigned n) {
    if (have_ < n) {
      pool_ = rng_.next();
      have_ = 64;
    }
    std::uint64_t v = pool_ & ((std::uint64_t{1} << n) - 1);
    pool_ >>= n;
    have_ -= n;
    return v;
  }

  SplitMix64 rng_;
  std::uint64_t pool_ = 0;
  unsigned have_ = 0;
  int level_ = 128;
};

// Fast free-running counter sampled by an independent clock: the upper bits
// carry a slow sinusoidal amplitude envelope (the sampled register value
// swings with supply/temperature), while the lowest bit flips fast enough to
// stay effectively uniform. Parity extraction keeps exactly that bit.
class FfcsSim : public ByteGenerator {
 public:
  explicit FfcsSim(std::uint64_t seed) : rng_(seed) {}
  void fill(std::span<std::uint8_t> out) override {
    for (auto& byte : out) {
      double envelope =
          0.5 * (1.0 + std::sin(2.0 * std::numbers::pi *
                                static_cast<double>(t_) / kEnvelopePeriod));
      std::uint64_t word = rng_.next();
      auto high7 = static_cast<double>(word & 0x7Fu);
      auto scaled = static_cast<std::uint8_t>(
          std::floor(high7 * (0.10 + 0.90 * envelope)));
      std::uint8_t low = (word >> 7) & 1u;
      byte = static_cast<std::uint8_t>((scaled << 1) | low);
      ++t_;
    }
  }

 private:
  static constexpr double kEnvelopePeriod = 100000.0;
  SplitMix64 rng_;
  std::uint64_t t_ = 0;
};

}  // namespace

std::optional<SourceKind> parse_kind(std::string_view name) {
  if (name == "reference-mixer") return SourceKind::kReferenceMixer;
  if (name == "all-zero") return SourceKind::kAllZero;
  if (name == "alternating") return SourceKind::kAlternating;
  if (name == "ffcs-sim") return SourceKind::kFfcsSim;
  if (name == "smlt-sim") return SourceKind::kSmltSim;
  return std::nullopt;
}

std::string_view kind_name(SourceKind kind) {
  switch (kind) {
    case SourceKind::kReferenceMixer:
      return "reference-mixer";
    case SourceKind::kAllZero:
      return "all-zero";
    case SourceKind::kAlternating:
      return "alternating";
    case SourceKind::kFfcsSim:
      return "ffcs-sim";
    case SourceKind::kSmltSim:
      return "smlt-sim";
  }
  throw std::logic_error("unknown source kind");
}

std::unique_ptr<ByteGenerator> make_generator(SourceKind kind,
                                              std::uint64_t seed) {
  switch (kind) {
    case SourceKind::kReferenceMixer:
      return std::make_unique<ReferenceMixer>(seed);
    case SourceKind::kAllZero:
      return std::make_unique<ConstantSource>(0x00);
    case SourceKind::kAlternating:
      return std::make_unique<AlternatingSource>();
    case SourceKind::kFfcsSim:
      return std::make_unique<FfcsSim>(seed);
    case SourceKind::kSmltSim:
      return std::make_unique<SmltSim>(seed);
  }
  throw std::logic_error("unknown source kind");
}

std::vector<std::uint8_t> generate(const SourceSpec& spec) {
  std::vector<std::uint8_t> out(spec.length);
  make_generator(spec.kind, spec.seed)->fill(out);
  return out;
}

}  // namespace rngkit::sources
