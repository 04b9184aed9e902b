#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace rngkit::sources {

// Deterministic byte generators used for calibration and regression runs.
// ReferenceMixer is a known-good 64-bit mixing generator; AllZero and
// Alternating are degenerate anchors; FfcsSim and SmltSim imitate the two
// classes of sensor byte streams the extractor is aimed at (a fast free-
// running counter with a modulated envelope, and a slowly drifting
// accelerometer-style reading).
enum class SourceKind {
  kReferenceMixer,
  kAllZero,
  kAlternating,
  kFfcsSim,
  kSmltSim,
};

struct SourceSpec {
  SourceKind kind = SourceKind::kReferenceMixer;
  std::uint64_t seed = 0;
  std::uint64_t length = 0;  // bytes to produce
};

std::optional<SourceKind> parse_kind(std::string_view name);
std::string_view kind_name(SourceKind kind);

// splitmix64: state advances by the golden-gamma constant, output is the
// finalizer of the new state. Stable across platforms and pinned by the
// regression tests.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

// Pull interface so callers can stream long outputs without materializing
// them. fill() always produces out.size() bytes; generators never run dry.
class ByteGenerator {
 public:
  virtual ~ByteGenerator() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;
};

std::unique_ptr<ByteGenerator> make_generator(SourceKind kind,
                                              std::uint64_t seed);

// Materializes spec.length bytes.
std::vector<std::uint8_t> generate(const SourceSpec& spec);

}  // namespace rngkit::sources
