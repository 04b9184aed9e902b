#include "rngkit/bitseq.hpp"

#include <bit>
#include <fstream>
#include <vector>

namespace rngkit {

namespace {

std::ifstream open_for_read(const std::filesystem::path& path,
                            std::ios::openmode mode) {
  std::ifstream in(path, mode);
  if (!in) {
    throw std::runtime_error("cannot open input file: " + path.string());
  }
  return in;
}

std::ofstream open_for_write(const std::filesystem::path& path,
                             std::ios::openmode mode) {
  std::ofstream out(path, mode);
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path.string());
  }
  return out;
}

}  // namespace

BitSequence BitSequence::zeros(std::size_t n) {
  BitSequence s;
  s.words_.assign((n + 63) / 64, 0);
  s.size_ = n;
  return s;
}

BitSequence BitSequence::from_string(std::string_view bits) {
  BitSequence s;
  s.reserve(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    char c = bits[i];
    if (c != '0' && c != '1') {
      throw ParseError("expected '0' or '1', got byte 0x" +
                           std::to_string(static_cast<unsigned>(c)),
                       i);
    }
    s.push_back(c == '1');
  }
  return s;
}

void BitSequence::append(const BitSequence& other) {
  if (other.size_ == 0) return;
  if ((size_ & 63u) == 0) {
    // word-aligned: splice the backing vectors directly
    words_.insert(words_.end(), other.words_.begin(), other.words_.end());
    size_ += other.size_;
    return;
  }
  reserve(size_ + other.size_);
  for (std::size_t i = 0; i < other.size_; ++i) push_back(other[i]);
}

std::uint64_t BitSequence::count_ones() const {
  std::uint64_t total = 0;
  for (std::uint64_t w : words_) total += std::popcount(w);
  return total;
}

std::uint64_t BitSequence::count_ones(std::size_t pos, std::size_t len) const {
  if (len == 0) return 0;
  std::size_t first = pos >> 6, last = (pos + len - 1) >> 6;
  std::uint64_t head_mask = ~std::uint64_t{0} << (pos & 63u);
  unsigned tail_used = static_cast<unsigned>((pos + len - 1) & 63u) + 1;
  std::uint64_t tail_mask = tail_used == 64
                                ? ~std::uint64_t{0}
                                : (std::uint64_t{1} << tail_used) - 1;
  if (first == last) {
    return std::popcount(words_[first] & head_mask & tail_mask);
  }
  std::uint64_t total = std::popcount(words_[first] & head_mask);
  for (std::size_t w = first + 1; w < last; ++w)
    total += std::popcount(words_[w]);
  total += std::popcount(words_[last] & tail_mask);
  return total;
}

BitSequence BitSequence::slice(std::size_t pos, std::size_t len) const {
  if (pos + len > size_) {
    throw std::out_of_range("slice out of range");
  }
  BitSequence out;
  out.words_.assign((len + 63) / 64, 0);
  out.size_ = len;
  for (std::size_t done = 0; done < len;) {
    unsigned chunk = static_cast<unsigned>(std::min<std::size_t>(64, len - done));
    out.words_[done >> 6] = chunk == 0 ? 0 : extract_word(pos + done, chunk);
    done += chunk;
  }
  return out;
}

std::string BitSequence::to_string() const {
  std::string s(size_, '0');
  for (std::size_t i = 0; i < size_; ++i)
    if ((*this)[i]) s[i] = '1';
  return s;
}

BitSequence read_ascii(const std::filesystem::path& path) {
  std::ifstream in = open_for_read(path, std::ios::binary);
  BitSequence seq;
  std::vector<char> buf(1 << 20);
  std::size_t offset = 0;
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    std::size_t got = static_cast<std::size_t>(in.gcount());
    for (std::size_t i = 0; i < got; ++i, ++offset) {
      char c = buf[i];
      switch (c) {
        case '0':
          seq.push_back(false);
          break;
        case '1':
          seq.push_back(true);
          break;
        case ' ':
        case '\t':
        case '\r':
        case '\n':
          break;
        default:
          throw ParseError(path.string() + ": invalid character at byte " +
                               std::to_string(offset) +
                               " (expected '0', '1' or whitespace)",
                           offset);
      }
    }
  }
  if (seq.empty()) {
    throw ParseError(path.string() + ": no bits found", 0);
  }
  return seq;
}

void write_ascii(const BitSequence& seq, const std::filesystem::path& path,
                 bool final_newline, bool allow_empty) {
  if (seq.empty() && !allow_empty) {
    throw std::invalid_argument("refusing to write an empty sequence to " +
                                path.string());
  }
  std::ofstream out = open_for_write(path, std::ios::binary);
  std::string buf;
  buf.reserve(1 << 20);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    buf.push_back(seq[i] ? '1' : '0');
    if (buf.size() == buf.capacity()) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  }
  if (final_newline) buf.push_back('\n');
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

BitSequence read_packed(const std::filesystem::path& path, BitOrder order) {
  std::ifstream in = open_for_read(path, std::ios::binary);
  BitSequence seq;
  std::vector<unsigned char> buf(1 << 20);
  bool any = false;
  while (in) {
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    std::size_t got = static_cast<std::size_t>(in.gcount());
    if (got > 0) any = true;
    for (std::size_t i = 0; i < got; ++i) {
      unsigned char b = buf[i];
      if (order == BitOrder::kMsbFirst) {
        for (int k = 7; k >= 0; --k) seq.push_back((b >> k) & 1u);
      } else {
        for (int k = 0; k < 8; ++k) seq.push_back((b >> k) & 1u);
      }
    }
  }
  if (!any) {
    throw ParseError(path.string() + ": file is empty", 0);
  }
  return seq;
}

void write_packed(const BitSequence& seq, const std::filesystem::path& path,
                  BitOrder order) {
  std::ofstream out = open_for_write(path, std::ios::binary);
  std::vector<unsigned char> buf;
  buf.reserve((seq.size() + 7) / 8);
  for (std::size_t i = 0; i < seq.size(); i += 8) {
    unsigned char b = 0;
    unsigned in_byte = static_cast<unsigned>(std::min<std::size_t>(8, seq.size() - i));
    for (unsigned k = 0; k < in_byte; ++k) {
      if (seq[i + k]) {
        b |= order == BitOrder::kMsbFirst ? (1u << (7 - k)) : (1u << k);
      }
    }
    buf.push_back(b);
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
  if (!out) {
    throw std::runtime_error("write failed: " + path.string());
  }
}

StreamSet split_streams(const BitSequence& seq, std::size_t stream_length,
                        std::size_t num_streams, std::size_t* dropped_bits) {
  if (stream_length == 0 || num_streams == 0) {
    throw std::invalid_argument("stream length and count must be positive");
  }
  std::size_t needed = stream_length * num_streams;
  if (seq.size() < needed) {
    throw std::invalid_argument(
        "not enough bits: need " + std::to_string(needed) + " (" +
        std::to_string(num_streams) + " x " + std::to_string(stream_length) +
        "), have " + std::to_string(seq.size()));
  }
  StreamSet set;
  set.stream_length = stream_length;
  set.streams.reserve(num_streams);
  for (std::size_t s = 0; s < num_streams; ++s) {
    set.streams.push_back(seq.slice(s * stream_length, stream_length));
  }
  if (dropped_bits) *dropped_bits = seq.size() - needed;
  return set;
}

}  // namespace rngkit
