#include "rulesynth/corpus.hpp"

#include <algorithm>

#include "json_util.hpp"
#include "rulesynth/error.hpp"
#include "rulesynth/frontend.hpp"
#include "rulesynth/pdg_io.hpp"

namespace rulesynth {

namespace fs = std::filesystem;

namespace {

bool is_example(const fs::path& p) { return p.extension() == ".mj" || p.extension() == ".pdg"; }

// The single before.* or after.* file of a change directory.
fs::path change_side(const fs::path& dir, const std::string& stem) {
  std::vector<fs::path> found;
  for (const char* ext : {".mj", ".pdg"})
    if (fs::is_regular_file(dir / (stem + ext))) found.push_back(dir / (stem + ext));
  if (found.empty()) throw SchemaError(dir.string() + ": missing " + stem + ".mj or " + stem + ".pdg");
  if (found.size() > 1) throw SchemaError(dir.string() + ": both " + stem + ".mj and " + stem + ".pdg present");
  return found.front();
}

}  // namespace

Pdg load_example(const fs::path& path, const std::string& display_name) {
  if (path.extension() == ".pdg") return load_pdg_file(path);
  if (path.extension() != ".mj") throw SchemaError(path.string() + ": expected a .mj or .pdg file");
  const std::string name = display_name.empty() ? path.filename().string() : display_name;
  return build_pdg(MethodSource{name, detail::read_file(path)});
}

std::vector<fs::path> example_files(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::is_directory(dir)) return out;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && is_example(entry.path())) out.push_back(entry.path());
  std::sort(out.begin(), out.end());
  return out;
}

Corpus load_corpus(const fs::path& root, const AlignOptions& options) {
  if (!fs::is_directory(root)) throw SchemaError(root.string() + ": corpus directory not found");
  auto rel = [&](const fs::path& p) { return fs::relative(p, root).generic_string(); };
  Corpus c;
  std::vector<Pdg> afters;
  const fs::path changes = root / "changes";
  if (fs::is_directory(changes)) {
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(changes))
      if (entry.is_directory()) dirs.push_back(entry.path());
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) {
      const fs::path before = change_side(d, "before");
      const fs::path after = change_side(d, "after");
      auto [b, a] = diff_pdgs(load_example(before, rel(before)), load_example(after, rel(after)), options);
      c.violating.push_back(std::move(b));
      afters.push_back(std::move(a));
    }
  }
  for (const auto& f : example_files(root / "violating")) c.violating.push_back(load_example(f, rel(f)));
  c.conforming = std::move(afters);
  for (const auto& f : example_files(root / "conforming")) c.conforming.push_back(load_example(f, rel(f)));
  if (c.violating.empty()) throw SchemaError(root.string() + ": corpus has no violating examples");
  return c;
}

SynthConfig load_config_file(const fs::path& path, SynthConfig base) {
  const std::string where = path.string();
  detail::ordered_json doc;
  try {
    doc = detail::parse_json(detail::read_file(path));
  } catch (const ParseError& e) {
    throw e.in(where);
  }
  if (!doc.is_object()) throw SchemaError(where + ": expected an object");
  for (const auto& [k, v] : doc.items()) {
    if (k != "delta" && k != "maxPartitions" && k != "radius" && k != "maxModels" && k != "solverCap")
      throw SchemaError(where + ": unknown setting \"" + k + "\"");
  }
  auto positive = [&](const char* key) -> std::optional<long long> {
    auto v = detail::opt_int(doc, key, where);
    if (v && *v <= 0) throw SchemaError(where + "." + key + ": must be positive");
    return v;
  };
  if (auto d = detail::opt_number(doc, "delta", where)) base.delta = *d;
  if (auto v = positive("maxPartitions")) base.max_partitions = static_cast<std::size_t>(*v);
  if (auto v = positive("radius")) base.radius = static_cast<int>(*v);
  if (auto v = positive("maxModels")) base.max_models_per_example = static_cast<std::size_t>(*v);
  if (auto v = positive("solverCap")) base.align.max_search_nodes = static_cast<std::uint64_t>(*v);
  try {
    check_config(base);
  } catch (const SchemaError& e) {
    throw SchemaError(where + ": " + e.what());
  }
  return base;
}

std::string write_config(const SynthConfig& c) {
  detail::ordered_json doc = detail::ordered_json::object();
  doc["delta"] = c.delta;
  doc["maxPartitions"] = c.max_partitions;
  doc["radius"] = c.radius;
  doc["maxModels"] = c.max_models_per_example;
  doc["solverCap"] = c.align.max_search_nodes;
  return doc.dump(2) + "\n";
}

}  // namespace rulesynth
