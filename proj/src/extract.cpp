#include "rngkit/extract.hpp"

#include <algorithm>
#include <vector>

namespace rngkit {

FileByteSource::FileByteSource(const std::filesystem::path& path)
    : in_(path, std::ios::binary), path_(path) {
  if (!in_) {
    throw std::runtime_error("cannot open input file: " + path.string());
  }
}

std::size_t FileByteSource::read(std::span<std::uint8_t> out) {
  in_.read(reinterpret_cast<char*>(out.data()),
           static_cast<std::streamsize>(out.size()));
  if (in_.bad()) {
    throw std::runtime_error("read failed: " + path_.string());
  }
  return static_cast<std::size_t>(in_.gcount());
}

std::size_t MemoryByteSource::read(std::span<std::uint8_t> out) {
  std::size_t n = std::min(out.size(), data_.size() - pos_);
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(pos_), n,
              out.begin());
  pos_ += n;
  return n;
}

AsciiFileSink::AsciiFileSink(const std::filesystem::path& path,
                             bool final_newline)
    : out_(path, std::ios::binary), path_(path), final_newline_(final_newline) {
  if (!out_) {
    throw std::runtime_error("cannot open output file: " + path.string());
  }
}

AsciiFileSink::~AsciiFileSink() {
  try {
    close();
  } catch (...) {
    // destructor must not throw; close() explicitly to see errors
  }
}

void AsciiFileSink::append(const BitSequence& bits) {
  std::string buf;
  buf.reserve(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i)
    buf.push_back(bits[i] ? '1' : '0');
  out_.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out_) {
    throw std::runtime_error("write failed: " + path_.string());
  }
}

void AsciiFileSink::flush() { out_.flush(); }

void AsciiFileSink::close() {
  if (closed_) return;
  closed_ = true;
  if (final_newline_) out_.put('\n');
  out_.flush();
  if (!out_) {
    throw std::runtime_error("write failed: " + path_.string());
  }
  out_.close();
}

PackedFileSink::PackedFileSink(const std::filesystem::path& path,
                               BitOrder order)
    : out_(path, std::ios::binary), path_(path), order_(order) {
  if (!out_) {
    throw std::runtime_error("cannot open output file: " + path.string());
  }
}

PackedFileSink::~PackedFileSink() {
  try {
    close();
  } catch (...) {
  }
}

void PackedFileSink::append(const BitSequence& bits) {
  std::vector<unsigned char> buf;
  buf.reserve(bits.size() / 8 + 1);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i]) {
      pending_ |= order_ == BitOrder::kMsbFirst
                      ? static_cast<std::uint8_t>(1u << (7 - pending_bits_))
                      : static_cast<std::uint8_t>(1u << pending_bits_);
    }
    if (++pending_bits_ == 8) {
      buf.push_back(pending_);
      pending_ = 0;
      pending_bits_ = 0;
    }
  }
  out_.write(reinterpret_cast<const char*>(buf.data()),
             static_cast<std::streamsize>(buf.size()));
  if (!out_) {
    throw std::runtime_error("write failed: " + path_.string());
  }
}

void PackedFileSink::flush() { out_.flush(); }

void PackedFileSink::close() {
  if (closed_) return;
  closed_ = true;
  if (pending_bits_ > 0) {
    out_.put(static_cast<char>(pending_));
    pending_ = 0;
    pending_bits_ = 0;
  }
  out_.flush();
  if (!out_) {
    throw std::runtime_error("write failed: " + path_.string());
  }
  out_.close();
}

ExtractionStats extract_stream(ByteSource& source, const ExtractionConfig& cfg,
                               BitSink& sink) {
  ExtractionStats stats;
  std::uint64_t to_skip = cfg.threshold_bytes;
  std::uint64_t to_cut = cfg.cut_bits;

  std::vector<std::uint8_t> buf(1 << 16);
  BitSequence batch;
  batch.reserve(kFlushGranularityBits);

  // Tracks the run at the emitted tail so runs spanning batch boundaries
  // are measured whole.
  bool run_bit = false;
  std::uint64_t run_len = 0;
  auto close_run = [&] {
    if (run_len == 0) return;
    auto& best = run_bit ? stats.longest_run_ones : stats.longest_run_zeros;
    best = std::max(best, run_len);
  };

  auto emit = [&](bool bit) {
    batch.push_back(bit);
    if (bit)
      ++stats.ones;
    else
      ++stats.zeros;
    if (run_len > 0 && bit == run_bit) {
      ++run_len;
    } else {
      close_run();
      run_bit = bit;
      run_len = 1;
    }
    if (batch.size() == kFlushGranularityBits) {
      sink.append(batch);
      sink.flush();
      batch = BitSequence();
      batch.reserve(kFlushGranularityBits);
    }
  };

  for (;;) {
    std::size_t got;
    try {
      got = source.read(buf);
    } catch (const std::exception& e) {
      // Push out what we have so the sink keeps every bit produced so far.
      if (!batch.empty()) {
        sink.append(batch);
        sink.flush();
      }
      throw ExtractionError(std::string("byte source failed: ") + e.what(),
                            stats.bytes_read);
    }
    if (got == 0) break;
    std::size_t i = 0;
    if (to_skip > 0) {
      std::size_t skip = static_cast<std::size_t>(
          std::min<std::uint64_t>(to_skip, got));
      stats.bytes_read += skip;
      to_skip -= skip;
      i = skip;
    }
    for (; i < got; ++i) {
      ++stats.bytes_read;
      bool bit = extract_bit(buf[i]) != 0;
      if (to_cut > 0) {
        --to_cut;
        continue;
      }
      emit(bit);
    }
  }

  close_run();
  if (!batch.empty()) {
    sink.append(batch);
    sink.flush();
  }
  stats.bits_emitted = stats.ones + stats.zeros;
  return stats;
}

CutRecommendation margin_check(std::uint64_t observed_prefix_bits) {
  // ceil(z * 1.23) in integer arithmetic, then round up to a multiple of 500
  std::uint64_t recommended = (observed_prefix_bits * 123 + 99) / 100;
  std::uint64_t rounded = (recommended + 499) / 500 * 500;
  return {recommended, rounded};
}

}  // namespace rngkit
