#include "json_util.hpp"

#include <fstream>
#include <sstream>

#include "rulesynth/error.hpp"

namespace rulesynth::detail {

ordered_json parse_json(std::string_view text) {
  try {
    return ordered_json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    int line = 1;
    int column = 1;
    for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string msg = e.what();
    if (auto pos = msg.find("parse error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ParseError(msg, line, column);
  }
}

const ordered_json& require_array(const ordered_json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw SchemaError(path + ": missing field \"" + key + "\"");
  const auto& v = obj[key];
  if (!v.is_array()) throw SchemaError(path + "." + key + ": expected an array");
  return v;
}

const ordered_json& require_object(const ordered_json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw SchemaError(path + ": missing field \"" + key + "\"");
  const auto& v = obj[key];
  if (!v.is_object()) throw SchemaError(path + "." + key + ": expected an object");
  return v;
}

std::string require_string(const ordered_json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key)) throw SchemaError(path + ": missing field \"" + key + "\"");
  const auto& v = obj[key];
  if (!v.is_string()) throw SchemaError(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::optional<std::string> opt_string(const ordered_json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  const auto& v = obj[key];
  if (!v.is_string()) throw SchemaError(path + "." + key + ": expected a string");
  return v.get<std::string>();
}

std::optional<int> opt_int(const ordered_json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  const auto& v = obj[key];
  if (!v.is_number_integer()) throw SchemaError(path + "." + key + ": expected an integer");
  return v.get<int>();
}

std::optional<double> opt_number(const ordered_json& obj, const char* key, const std::string& path) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  const auto& v = obj[key];
  if (!v.is_number()) throw SchemaError(path + "." + key + ": expected a number");
  return v.get<double>();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
}

}  // namespace rulesynth::detail
