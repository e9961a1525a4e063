#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace clicklab {

// UTF-8 handling. Invalid byte sequences are a hard error upstream, so the
// decoder here reports failure instead of substituting replacement chars.

struct Utf8Scan {
  bool valid = false;
  std::size_t code_points = 0;
};

Utf8Scan scan_utf8(std::string_view bytes);

inline bool valid_utf8(std::string_view bytes) { return scan_utf8(bytes).valid; }

// Number of code points; caller must have validated the input.
inline std::size_t utf8_length(std::string_view bytes) { return scan_utf8(bytes).code_points; }

// Decodes one code point starting at offset; advances offset. Returns
// nullopt for malformed input.
std::optional<char32_t> decode_utf8(std::string_view bytes, std::size_t& offset);

// Letter test used by the query eligibility predicate. Covers ASCII plus the
// Latin, Greek and Cyrillic blocks that occur in European search logs; the
// pluggable eligibility predicate is the extension point for anything wider.
bool is_letter(char32_t cp);

// Locale-independent ASCII helpers.
inline char ascii_lower(char c) { return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c; }
std::string ascii_lowercase(std::string_view text);

// Splits on runs of ASCII whitespace and punctuation, lowercases ASCII,
// keeps multi-byte UTF-8 sequences intact.
std::vector<std::string> tokenize(std::string_view text);

// Tab-separated field access. Fields must not contain tab or newline; the
// writers validate this.
std::vector<std::string_view> split_tsv(std::string_view line);
bool field_writable(std::string_view field);

// Shortest decimal with 9 significant digits ("%.9g"), used wherever output
// bytes must be deterministic.
std::string format_sig9(double value);

}  // namespace clicklab
