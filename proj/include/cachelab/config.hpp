#pragma once

// Flat `key = value` configuration text. '#' starts a comment; blank lines
// are ignored; a repeated key keeps its last value.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace cachelab {

using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config_text(std::string_view text);
ConfigMap read_config_file(const std::filesystem::path& path);
/// Splits a `key=value` override.
std::pair<std::string, std::string> parse_override(std::string_view text);

std::uint64_t parse_u64(const std::string& key, const std::string& value);
double parse_double(const std::string& key, const std::string& value);
/// Comma-separated integers and inclusive ranges, e.g. "1-4,9". Empty is allowed.
std::vector<std::uint32_t> parse_u32_list(const std::string& key, const std::string& value);
std::string format_u32_list(const std::vector<std::uint32_t>& values);

}  // namespace cachelab
