// Private helpers for reading JSON documents with field-path error messages.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

namespace rulesynth::detail {

using nlohmann::ordered_json;

/// Parses text, converting byte offsets of syntax errors into line/column.
ordered_json parse_json(std::string_view text);

const ordered_json& require_array(const ordered_json& obj, const char* key, const std::string& path);
const ordered_json& require_object(const ordered_json& obj, const char* key, const std::string& path);
std::string require_string(const ordered_json& obj, const char* key, const std::string& path);
std::optional<std::string> opt_string(const ordered_json& obj, const char* key, const std::string& path);
std::optional<int> opt_int(const ordered_json& obj, const char* key, const std::string& path);
std::optional<double> opt_number(const ordered_json& obj, const char* key, const std::string& path);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace rulesynth::detail
