#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace herald {

std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Collapses every run of ASCII whitespace to one space and trims the ends.
std::string collapse_whitespace(std::string_view s);

/// ASCII lowercase; bytes >= 0x80 pass through so UTF-8 stays intact.
std::string ascii_lower(std::string_view s);

/// Whitespace-collapsed, ASCII-lowercased form used for loose text comparison.
std::string loose_form(std::string_view s);

/// Text between the first `<tag>` / `</tag>` pair, without surrounding newlines.
std::optional<std::string> extract_tagged(std::string_view text, std::string_view tag);

/// Bodies of consecutive `<tag index="0">` ... `</tag>` blocks, stopping at
/// the first missing index.
std::vector<std::string> extract_indexed(std::string_view text, std::string_view tag);

/// Wraps `body` as "<tag>\n" body "\n</tag>".
std::string tagged(std::string_view tag, std::string_view body);

std::string read_file(const std::filesystem::path& path);

/// Writes through a sibling temp file, fsyncs and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace herald
