#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace rngkit {

// Packed bit sequence. Bits are stored LSB-first inside 64-bit words; unused
// tail bits of the last word are kept zero so that word-level scans (popcount,
// equality) never see garbage.
class BitSequence {
 public:
  BitSequence() = default;

  static BitSequence zeros(std::size_t n);
  // Accepts only '0' and '1'.
  static BitSequence from_string(std::string_view bits);

  void reserve(std::size_t nbits) { words_.reserve((nbits + 63) / 64); }

  void push_back(bool bit) {
    if ((size_ & 63u) == 0) words_.push_back(0);
    words_.back() |= static_cast<std::uint64_t>(bit) << (size_ & 63u);
    ++size_;
  }

  void append(const BitSequence& other);

  bool operator[](std::size_t i) const {
    return (words_[i >> 6] >> (i & 63u)) & 1u;
  }

  void set(std::size_t i, bool v) {
    std::uint64_t mask = std::uint64_t{1} << (i & 63u);
    if (v)
      words_[i >> 6] |= mask;
    else
      words_[i >> 6] &= ~mask;
  }

  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  std::uint64_t count_ones() const;
  // Population count of bits [pos, pos + len).
  std::uint64_t count_ones(std::size_t pos, std::size_t len) const;

  // Bits pos .. pos+len-1 as an integer with bit k of the result equal to
  // bit pos+k of the sequence (len in 1..64). The mapping is a fixed
  // bijection on len-bit patterns, which is all that pattern-counting
  // callers need; callers that care about a left-to-right numeric reading
  // must assemble the value themselves.
  std::uint64_t extract_word(std::size_t pos, unsigned len) const {
    std::size_t w = pos >> 6;
    unsigned off = static_cast<unsigned>(pos & 63u);
    std::uint64_t out = words_[w] >> off;
    if (off + len > 64) out |= words_[w + 1] << (64 - off);
    if (len < 64) out &= (std::uint64_t{1} << len) - 1;
    return out;
  }

  BitSequence slice(std::size_t pos, std::size_t len) const;

  std::span<const std::uint64_t> words() const { return words_; }

  std::string to_string() const;

  bool operator==(const BitSequence&) const = default;

 private:
  std::vector<std::uint64_t> words_;
  std::size_t size_ = 0;
};

// A batch of equal-length sequences, as consumed by the test battery.
struct StreamSet {
  std::vector<BitSequence> streams;
  std::size_t stream_length = 0;

  std::size_t count() const { return streams.size(); }
};

enum class BitOrder { kMsbFirst, kLsbFirst };

// Raised by the readers on malformed input; offset() is the byte position
// of the offending character in the file.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t offset)
      : std::runtime_error(msg), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Reads a text file of '0'/'1' characters. Spaces, tabs, CR and LF are
// skipped; anything else raises ParseError with the byte offset. An input
// containing no bits at all is an error.
BitSequence read_ascii(const std::filesystem::path& path);

// Writes one character per bit, no separators. Refuses to write an empty
// sequence unless allow_empty is set.
void write_ascii(const BitSequence& seq, const std::filesystem::path& path,
                 bool final_newline = false, bool allow_empty = false);

// Reads every byte of the file as 8 bits, most significant bit first by
// default.
BitSequence read_packed(const std::filesystem::path& path,
                        BitOrder order = BitOrder::kMsbFirst);

// Inverse of read_packed; the final partial byte, if any, is zero-padded.
void write_packed(const BitSequence& seq, const std::filesystem::path& path,
                  BitOrder order = BitOrder::kMsbFirst);

// Cuts the first num_streams * stream_length bits into consecutive disjoint
// streams. Leftover tail bits are dropped; the caller is told how many via
// the optional out-parameter. Throws std::invalid_argument if the input is
// too short or a dimension is zero.
StreamSet split_streams(const BitSequence& seq, std::size_t stream_length,
                        std::size_t num_streams,
                        std::size_t* dropped_bits = nullptr);

}  // namespace rngkit
