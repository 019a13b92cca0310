#include "maskopt/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace maskopt {

namespace {

std::vector<unsigned char> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot open {}", path.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_all(const std::filesystem::path& path, const std::string& header,
               const void* payload, std::size_t bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot open {} for writing", path.string()));
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  out.write(static_cast<const char*>(payload), static_cast<std::streamsize>(bytes));
  if (!out) throw IoError(fmt::format("write failed for {}", path.string()));
}

// Tokenizer over the ASCII header shared by PGM and PFM.
class HeaderReader {
 public:
  HeaderReader(const std::vector<unsigned char>& buf, std::string file)
      : buf_(buf), file_(std::move(file)) {}

  std::string magic() {
    if (buf_.size() < 2) throw FormatError(fmt::format("{}: malformed header: magic", file_));
    pos_ = 2;
    return std::string(buf_.begin(), buf_.begin() + 2);
  }

  std::string token(const char* field) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    while (pos_ < buf_.size() && !std::isspace(buf_[pos_]) && buf_[pos_] != '#') ++pos_;
    if (pos_ == start) throw FormatError(fmt::format("{}: malformed header: {}", file_, field));
    return std::string(buf_.begin() + static_cast<std::ptrdiff_t>(start),
                       buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
  }

  std::size_t positive_integer(const char* field) {
    const std::string t = token(field);
    if (!std::all_of(t.begin(), t.end(), [](unsigned char ch) { return std::isdigit(ch); }) ||
        t.size() > 9) {
      throw FormatError(fmt::format("{}: malformed header: {} '{}'", file_, field, t));
    }
    const std::size_t v = std::stoul(t);
    if (v == 0) throw FormatError(fmt::format("{}: malformed header: {} is zero", file_, field));
    return v;
  }

  double real(const char* field) {
    const std::string t = token(field);
    try {
      std::size_t used = 0;
      const double v = std::stod(t, &used);
      if (used != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw FormatError(fmt::format("{}: malformed header: {} '{}'", file_, field, t));
    }
  }

  // Consumes the single whitespace byte separating header and payload.
  std::size_t payload_offset() {
    if (pos_ >= buf_.size() || !std::isspace(buf_[pos_])) {
      throw FormatError(fmt::format("{}: malformed header: missing separator", file_));
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < buf_.size()) {
      if (std::isspace(buf_[pos_])) {
        ++pos_;
      } else if (buf_[pos_] == '#') {
        while (pos_ < buf_.size() && buf_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<unsigned char>& buf_;
  std::string file_;
  std::size_t pos_ = 0;
};

struct RawPgm {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<unsigned char> bytes;
};

RawPgm read_pgm(const std::filesystem::path& path) {
  const auto buf = read_all(path);
  const std::string file = path.string();
  HeaderReader hdr(buf, file);
  const std::string magic = hdr.magic();
  if (magic != "P5") throw FormatError(fmt::format("{}: unsupported magic '{}'", file, magic));
  RawPgm out;
  out.width = hdr.positive_integer("width");
  out.height = hdr.positive_integer("height");
  const std::size_t maxval = hdr.positive_integer("maxval");
  if (maxval != 255) throw FormatError(fmt::format("{}: unsupported maxval {}", file, maxval));
  const std::size_t offset = hdr.payload_offset();
  const std::size_t n = out.width * out.height;
  if (buf.size() < offset + n) {
    throw FormatError(fmt::format("{}: truncated payload: {} of {} bytes", file,
                                  buf.size() - std::min(buf.size(), offset), n));
  }
  out.bytes.assign(buf.begin() + static_cast<std::ptrdiff_t>(offset),
                   buf.begin() + static_cast<std::ptrdiff_t>(offset + n));
  return out;
}

void write_pgm(const std::filesystem::path& path, const Extent& e,
               const std::vector<unsigned char>& bytes) {
  write_all(path, fmt::format("P5\n{} {}\n255\n", e.width, e.height), bytes.data(), bytes.size());
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
  RawPgm raw = read_pgm(path);
  std::vector<double> data(raw.bytes.begin(), raw.bytes.end());
  return GrayImage(raw.width, raw.height, std::move(data));
}

void save_image(const GrayImage& img, const std::filesystem::path& path) {
  std::vector<unsigned char> bytes(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    const double v = std::clamp(img[i], 0.0, 255.0);
    bytes[i] = static_cast<unsigned char>(std::floor(v + 0.5));
  }
  write_pgm(path, img.extent(), bytes);
}

BinaryMask load_mask(const std::filesystem::path& path) {
  RawPgm raw = read_pgm(path);
  std::vector<std::uint8_t> bits(raw.bytes.size());
  for (std::size_t i = 0; i < bits.size(); ++i) {
    const unsigned char b = raw.bytes[i];
    if (b != 0 && b != 255) {
      throw ValidationError(fmt::format("{}: mask byte {} at index {} is neither 0 nor 255",
                                        path.string(), b, i));
    }
    bits[i] = b == 255 ? 1 : 0;
  }
  return BinaryMask(raw.width, raw.height, std::move(bits));
}

void save_mask(const BinaryMask& mask, const std::filesystem::path& path) {
  std::vector<unsigned char> bytes(mask.size());
  for (std::size_t i = 0; i < mask.size(); ++i) bytes[i] = mask[i] ? 255 : 0;
  write_pgm(path, mask.extent(), bytes);
}

ProbMask load_prob_mask(const std::filesystem::path& path) {
  const auto buf = read_all(path);
  const std::string file = path.string();
  HeaderReader hdr(buf, file);
  const std::string magic = hdr.magic();
  if (magic != "Pf") throw FormatError(fmt::format("{}: unsupported magic '{}'", file, magic));
  const std::size_t w = hdr.positive_integer("width");
  const std::size_t h = hdr.positive_integer("height");
  const double scale = hdr.real("scale");
  if (scale > 0.0) throw FormatError(fmt::format("{}: unsupported byte order (big-endian)", file));
  if (scale != -1.0) throw FormatError(fmt::format("{}: unsupported scale {}", file, scale));
  const std::size_t offset = hdr.payload_offset();
  const std::size_t n = w * h;
  if (buf.size() < offset + 4 * n) {
    throw FormatError(fmt::format("{}: truncated payload: expected {} bytes", file, 4 * n));
  }
  std::vector<double> prob(n);
  for (std::size_t row = 0; row < h; ++row) {
    const std::size_t y = h - 1 - row;
    for (std::size_t x = 0; x < w; ++x) {
      std::uint32_t bits = 0;
      std::memcpy(&bits, buf.data() + offset + 4 * (row * w + x), 4);
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
      prob[y * w + x] = static_cast<double>(std::bit_cast<float>(bits));
    }
  }
  return ProbMask(w, h, std::move(prob));
}

void save_prob_mask(const ProbMask& mask, const std::filesystem::path& path) {
  const std::size_t w = mask.width();
  const std::size_t h = mask.height();
  std::vector<std::uint32_t> payload(w * h);
  for (std::size_t row = 0; row < h; ++row) {
    const std::size_t y = h - 1 - row;
    for (std::size_t x = 0; x < w; ++x) {
      std::uint32_t bits = std::bit_cast<std::uint32_t>(static_cast<float>(mask[y * w + x]));
      if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
      payload[row * w + x] = bits;
    }
  }
  write_all(path, fmt::format("Pf\n{} {}\n-1.0\n", w, h), payload.data(), payload.size() * 4);
}

}  // namespace maskopt
