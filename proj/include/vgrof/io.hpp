#ifndef VGROF_IO_HPP_
#define VGROF_IO_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iterator>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "vgrof/grid.hpp"
#include "vgrof/rng.hpp"

namespace vgrof {

/// Malformed input file; offset is the byte position where parsing failed.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset)
      : std::runtime_error(what + " at byte offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

inline constexpr std::size_t kMaxPixels = std::size_t{1} << 28;
inline constexpr std::string_view kFloatMagic = "VGF1";

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

inline void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

inline ScalarImage with_spacing(const ScalarImage& img, double h) {
  ScalarImage out(img.rows(), img.cols(), h);
  std::copy(img.values().begin(), img.values().end(), out.values().begin());
  return out;
}

namespace detail {

class HeaderCursor {
 public:
  explicit HeaderCursor(std::string_view bytes) : bytes_(bytes) {}

  std::size_t pos() const { return pos_; }
  void seek(std::size_t p) { pos_ = p; }
  bool at_end() const { return pos_ >= bytes_.size(); }
  char peek() const { return bytes_[pos_]; }

  static bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
  }

  void skip_space_and_comments() {
    while (!at_end()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (!at_end() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::uint64_t unsigned_integer(const char* what) {
    skip_space_and_comments();
    if (at_end()) throw ParseError(std::string("unexpected end of file reading ") + what, pos_);
    const std::size_t start = pos_;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(bytes_.data() + pos_, bytes_.data() + bytes_.size(), v);
    if (ec == std::errc::result_out_of_range) {
      throw ParseError(std::string("overflow in ") + what, start);
    }
    if (ec != std::errc()) throw ParseError(std::string("expected integer for ") + what, start);
    pos_ = static_cast<std::size_t>(ptr - bytes_.data());
    if (!at_end() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#') {
      throw ParseError(std::string("malformed ") + what, pos_);
    }
    return v;
  }

  double real(const char* what) {
    skip_space_and_comments();
    if (at_end()) throw ParseError(std::string("unexpected end of file reading ") + what, pos_);
    const std::size_t start = pos_;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(bytes_.data() + pos_, bytes_.data() + bytes_.size(), v);
    if (ec != std::errc()) throw ParseError(std::string("expected number for ") + what, start);
    pos_ = static_cast<std::size_t>(ptr - bytes_.data());
    return v;
  }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

inline void check_dimensions(std::uint64_t width, std::uint64_t height, std::size_t offset) {
  if (width == 0 || height == 0) throw ParseError("zero image dimension", offset);
  if (width > kMaxPixels || height > kMaxPixels || width * height > kMaxPixels) {
    throw ParseError("dimension overflow", offset);
  }
}

}  // namespace detail

/*
 * Binary (P5) or ASCII (P2) PGM, normalized to [0, 1] by maxval. Samples are
 * one byte for maxval < 256 and two bytes big-endian otherwise.
 */
inline ScalarImage parse_pgm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '2' && bytes[1] != '5')) {
    throw ParseError("not a P2/P5 PGM file", 0);
  }
  const bool binary = bytes[1] == '5';
  detail::HeaderCursor cur(bytes);
  cur.seek(2);
  if (!cur.at_end() && !detail::HeaderCursor::is_space(cur.peek()) && cur.peek() != '#') {
    throw ParseError("malformed magic number", 2);
  }
  cur.skip_space_and_comments();
  const std::size_t dims_at = cur.pos();
  const std::uint64_t width = cur.unsigned_integer("width");
  const std::uint64_t height = cur.unsigned_integer("height");
  detail::check_dimensions(width, height, dims_at);
  cur.skip_space_and_comments();
  const std::size_t maxval_at = cur.pos();
  const std::uint64_t maxval = cur.unsigned_integer("maxval");
  if (maxval == 0 || maxval > 65535) throw ParseError("maxval outside 1..65535", maxval_at);

  ScalarImage img(height, width);
  const double scale = 1.0 / static_cast<double>(maxval);
  auto out = img.values();
  if (binary) {
    if (cur.at_end() || !detail::HeaderCursor::is_space(cur.peek())) {
      throw ParseError("missing whitespace after maxval", cur.pos());
    }
    const std::size_t start = cur.pos() + 1;
    const std::size_t bps = maxval < 256 ? 1 : 2;
    const std::size_t need = out.size() * bps;
    if (bytes.size() - start < need) throw ParseError("truncated payload", bytes.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
      const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + start + k * bps);
      const std::uint32_t v = bps == 1 ? p[0] : (std::uint32_t{p[0]} << 8) | p[1];
      if (v > maxval) throw ParseError("sample exceeds maxval", start + k * bps);
      out[k] = static_cast<double>(v) * scale;
    }
  } else {
    for (std::size_t k = 0; k < out.size(); ++k) {
      cur.skip_space_and_comments();
      if (cur.at_end()) throw ParseError("truncated payload", bytes.size());
      const std::size_t at = cur.pos();
      const std::uint64_t v = cur.unsigned_integer("sample");
      if (v > maxval) throw ParseError("sample exceeds maxval", at);
      out[k] = static_cast<double>(v) * scale;
    }
  }
  return img;
}

/// 8-bit P5. Values are clamped to [0, 1] and rounded half-to-even.
inline std::string encode_pgm(const ScalarImage& img) {
  std::string out = "P5\n" + std::to_string(img.cols()) + " " + std::to_string(img.rows()) +
                    "\n255\n";
  out.reserve(out.size() + img.size());
  for (double v : img.values()) {
    const double c = std::isnan(v) ? 0.0 : std::clamp(v, 0.0, 1.0);
    out.push_back(static_cast<char>(static_cast<unsigned char>(std::nearbyint(c * 255.0))));
  }
  return out;
}

/*
 * Lossless text grid:
 *   VGF1
 *   <rows> <cols>
 *   one value per line, shortest round-trip decimal
 */
inline std::string encode_float_grid(const ScalarImage& img) {
  std::string out(kFloatMagic);
  out += "\n" + std::to_string(img.rows()) + " " + std::to_string(img.cols()) + "\n";
  char buf[64];
  for (double v : img.values()) {
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
    out.push_back('\n');
  }
  return out;
}

inline ScalarImage parse_float_grid(std::string_view bytes) {
  if (bytes.substr(0, kFloatMagic.size()) != kFloatMagic) {
    throw ParseError("not a VGF1 float grid", 0);
  }
  detail::HeaderCursor cur(bytes);
  cur.seek(kFloatMagic.size());
  cur.skip_space_and_comments();
  const std::size_t dims_at = cur.pos();
  const std::uint64_t rows = cur.unsigned_integer("rows");
  const std::uint64_t cols = cur.unsigned_integer("cols");
  detail::check_dimensions(cols, rows, dims_at);
  ScalarImage img(rows, cols);
  for (double& v : img.values()) {
    cur.skip_space_and_comments();
    if (cur.at_end()) throw ParseError("truncated payload", bytes.size());
    const std::size_t at = cur.pos();
    v = cur.real("value");
    if (!std::isfinite(v)) throw ParseError("non-finite value", at);
  }
  cur.skip_space_and_comments();
  if (!cur.at_end()) throw ParseError("trailing data", cur.pos());
  return img;
}

inline ScalarImage parse_image(std::string_view bytes) {
  if (bytes.substr(0, kFloatMagic.size()) == kFloatMagic) return parse_float_grid(bytes);
  return parse_pgm(bytes);
}

/// PGM (P2/P5) or VGF1 float grid, chosen by the file's magic number.
inline ScalarImage load_image(const std::string& path) { return parse_image(read_file(path)); }

inline bool has_suffix(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

/// ".pgm" paths are written as 8-bit P5, everything else as VGF1.
inline void save_image(const ScalarImage& img, const std::string& path) {
  write_file(path, has_suffix(path, ".pgm") ? encode_pgm(img) : encode_float_grid(img));
}

/// Adds seeded Gaussian noise with standard deviation sigma, row-major order.
inline ScalarImage add_noise(const ScalarImage& img, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("add_noise: sigma must be >= 0");
  ScalarImage out = img;
  if (sigma == 0.0) return out;
  GaussianStream gauss(seed);
  for (double& v : out.values()) v += sigma * gauss.next();
  return out;
}

/// `key = value` lines; '#' starts a comment. Duplicate keys are an error.
inline std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> out;
  auto trim = [](std::string_view s) {
    while (!s.empty() && detail::HeaderCursor::is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && detail::HeaderCursor::is_space(s.back())) s.remove_suffix(1);
    return s;
  };
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    }
    if (!out.emplace(key, value).second) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": duplicate key '" +
                                  key + "'");
    }
  }
  return out;
}

}  // namespace vgrof

#endif  // VGROF_IO_HPP_
