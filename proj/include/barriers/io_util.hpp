#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace barriers {

std::uint64_t fnv1a64(std::string_view bytes);
std::string to_hex(std::uint64_t value);

/// Shortest decimal with 17 significant digits (%.17g); round-trips doubles.
std::string format_g17(double value);
/// Fixed-point with the given number of decimal places (%.*f).
std::string format_fixed(double value, int places);

std::string read_text_file(const std::filesystem::path& path);                 // throws IoError
void write_text_file(const std::filesystem::path& path, std::string_view data);  // throws IoError

/// Splits one CSV line. Handles RFC-4180 quoting ("" escapes a quote inside a
/// quoted field); embedded newlines are not supported.
std::vector<std::string> csv_split(std::string_view line);
/// Quotes a field if it contains a comma, quote, or newline.
std::string csv_quote(std::string_view field);

/// JSON string escaping (control characters, quote, backslash).
std::string json_escape(std::string_view text);

/// Writes <dir>/manifest.json listing every given file (paths relative to
/// dir, sorted) with its byte size and fnv1a64 content hash.
void write_manifest(const std::filesystem::path& dir, std::vector<std::string> relative_paths);

}  // namespace barriers
