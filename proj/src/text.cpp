#include "clicklab/text.hpp"

#include <cstdio>

namespace clicklab {

std::optional<char32_t> decode_utf8(std::string_view bytes, std::size_t& offset) {
  if (offset >= bytes.size()) return std::nullopt;
  const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(bytes[i]); };
  const unsigned char b0 = byte(offset);
  if (b0 < 0x80) {
    ++offset;
    return static_cast<char32_t>(b0);
  }
  int len;
  char32_t cp;
  if ((b0 & 0xe0) == 0xc0) {
    len = 2;
    cp = b0 & 0x1f;
  } else if ((b0 & 0xf0) == 0xe0) {
    len = 3;
    cp = b0 & 0x0f;
  } else if ((b0 & 0xf8) == 0xf0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return std::nullopt;
  }
  if (offset + static_cast<std::size_t>(len) > bytes.size()) return std::nullopt;
  for (int i = 1; i < len; ++i) {
    const unsigned char b = byte(offset + static_cast<std::size_t>(i));
    if ((b & 0xc0) != 0x80) return std::nullopt;
    cp = (cp << 6) | (b & 0x3f);
  }
  // Reject overlong encodings, surrogates, and out-of-range values.
  static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len]) return std::nullopt;
  if (cp >= 0xd800 && cp <= 0xdfff) return std::nullopt;
  if (cp > 0x10ffff) return std::nullopt;
  offset += static_cast<std::size_t>(len);
  return cp;
}

Utf8Scan scan_utf8(std::string_view bytes) {
  Utf8Scan scan;
  std::size_t offset = 0;
  while (offset < bytes.size()) {
    if (!decode_utf8(bytes, offset)) return scan;
    ++scan.code_points;
  }
  scan.valid = true;
  return scan;
}

bool is_letter(char32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
  if (cp < 0x80) return false;
  // Latin-1 supplement letters, excluding multiplication/division signs.
  if (cp >= 0x00c0 && cp <= 0x00ff) return cp != 0x00d7 && cp != 0x00f7;
  // Latin Extended-A and Extended-B (covers Czech diacritics).
  if (cp >= 0x0100 && cp <= 0x024f) return true;
  // Greek and Coptic letters.
  if (cp >= 0x0386 && cp <= 0x03ff) return cp != 0x0387;
  // Cyrillic.
  if (cp >= 0x0400 && cp <= 0x04ff) return true;
  return false;
}

std::string ascii_lowercase(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) out.push_back(ascii_lower(c));
  return out;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    const auto uc = static_cast<unsigned char>(c);
    const bool separator =
        uc < 0x80 && !(c >= 'a' && c <= 'z') && !(c >= 'A' && c <= 'Z') && !(c >= '0' && c <= '9');
    if (separator) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.push_back(ascii_lower(c));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

std::vector<std::string_view> split_tsv(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == '\t') {
      fields.push_back(line.substr(start, i - start));
      start = i + 1;
    }
  }
  return fields;
}

bool field_writable(std::string_view field) {
  return field.find('\t') == std::string_view::npos &&
         field.find('\n') == std::string_view::npos &&
         field.find('\r') == std::string_view::npos;
}

std::string format_sig9(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.9g", value);
  return buffer;
}

}  // namespace clicklab
