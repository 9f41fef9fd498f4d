// rulesynth/pdg_io.hpp - PDG interchange format (JSON text, one graph per document).
//
//   { "origin": {"file": ..., "method": ..., "line": ...},          (optional)
//     "nodes": [ {"id", "kind", "label", "dataType", "dataValue",
//                 "numPara", "declaringType", "changeTag"}, ... ],
//     "edges": [ {"src", "dst", "label", "paraIndex"}, ... ] }
//
// Absent optional keys mean "unknown". Edge labels are recv/para/def/dep/
// cond/throw; change tags unchanged/deleted/added (omitted = none).

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rulesynth/pdg.hpp"

namespace rulesynth {

/// Parses and validates one interchange document. Throws ParseError for
/// malformed text (with line/column) and SchemaError naming the offending
/// field or invariant.
Pdg read_pdg(std::string_view text);
std::string write_pdg(const Pdg& g);

Pdg load_pdg_file(const std::filesystem::path& path);
void save_pdg_file(const Pdg& g, const std::filesystem::path& path);

}  // namespace rulesynth
