#include "rulesynth/pdg_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "rulesynth/error.hpp"
#include "json_util.hpp"

namespace rulesynth {

using nlohmann::ordered_json;

namespace {

NodeKind parse_kind(const std::string& s, const std::string& path) {
  if (s == "data") return NodeKind::Data;
  if (s == "action") return NodeKind::Action;
  throw SchemaError(path + ": expected \"data\" or \"action\", got \"" + s + "\"");
}

ChangeTag parse_tag(const std::string& s, const std::string& path) {
  if (s == "unchanged") return ChangeTag::Unchanged;
  if (s == "deleted") return ChangeTag::Deleted;
  if (s == "added") return ChangeTag::Added;
  throw SchemaError(path + ": unknown change tag \"" + s + "\"");
}

}  // namespace

Pdg read_pdg(std::string_view text) {
  const ordered_json doc = detail::parse_json(text);
  if (!doc.is_object()) throw SchemaError("<root>: expected an object");

  std::optional<Origin> origin;
  if (doc.contains("origin")) {
    const auto& o = doc["origin"];
    if (!o.is_object()) throw SchemaError("origin: expected an object");
    Origin org;
    org.file = detail::opt_string(o, "file", "origin").value_or("");
    org.method = detail::opt_string(o, "method", "origin").value_or("");
    org.line = detail::opt_int(o, "line", "origin").value_or(0);
    origin = org;
  }

  std::vector<Node> nodes;
  const auto& jn = detail::require_array(doc, "nodes", "<root>");
  for (std::size_t i = 0; i < jn.size(); ++i) {
    const std::string path = "nodes[" + std::to_string(i) + "]";
    const auto& o = jn[i];
    if (!o.is_object()) throw SchemaError(path + ": expected an object");
    Node n;
    n.id = detail::require_string(o, "id", path);
    n.kind = parse_kind(detail::require_string(o, "kind", path), path + ".kind");
    n.label = detail::opt_string(o, "label", path).value_or("");
    n.data_type = detail::opt_string(o, "dataType", path);
    n.data_value = detail::opt_string(o, "dataValue", path);
    n.num_para = detail::opt_int(o, "numPara", path);
    n.declaring_type = detail::opt_string(o, "declaringType", path);
    if (auto tag = detail::opt_string(o, "changeTag", path)) n.change_tag = parse_tag(*tag, path + ".changeTag");
    nodes.push_back(std::move(n));
  }

  std::vector<Edge> edges;
  const auto& je = detail::require_array(doc, "edges", "<root>");
  for (std::size_t i = 0; i < je.size(); ++i) {
    const std::string path = "edges[" + std::to_string(i) + "]";
    const auto& o = je[i];
    if (!o.is_object()) throw SchemaError(path + ": expected an object");
    Edge e;
    e.src = detail::require_string(o, "src", path);
    e.dst = detail::require_string(o, "dst", path);
    const std::string label = detail::require_string(o, "label", path);
    auto index = detail::opt_int(o, "paraIndex", path);
    if (label == "para") {
      e.label = EdgeLabel::para(index.value_or(0));
    } else {
      auto parsed = parse_edge_label(label);
      if (!parsed || parsed->kind == EdgeKind::Para)
        throw SchemaError(path + ".label: unknown edge label \"" + label + "\"");
      if (index) throw SchemaError(path + ".paraIndex: only allowed on para edges");
      e.label = *parsed;
    }
    edges.push_back(std::move(e));
  }

  Pdg g(std::move(nodes), std::move(edges), std::move(origin));
  if (auto problems = validate(g); !problems.empty()) {
    std::string msg = "invalid PDG: " + problems.front();
    if (problems.size() > 1) msg += " (and " + std::to_string(problems.size() - 1) + " more)";
    throw SchemaError(msg);
  }
  return g;
}

std::string write_pdg(const Pdg& g) {
  ordered_json doc = ordered_json::object();
  if (g.origin()) {
    ordered_json o = ordered_json::object();
    o["file"] = g.origin()->file;
    o["method"] = g.origin()->method;
    o["line"] = g.origin()->line;
    doc["origin"] = o;
  }
  ordered_json nodes = ordered_json::array();
  for (const Node& n : g.nodes()) {
    ordered_json o = ordered_json::object();
    o["id"] = n.id;
    o["kind"] = std::string(to_string(n.kind));
    if (!n.label.empty()) o["label"] = n.label;
    if (n.data_type) o["dataType"] = *n.data_type;
    if (n.data_value) o["dataValue"] = *n.data_value;
    if (n.num_para) o["numPara"] = *n.num_para;
    if (n.declaring_type) o["declaringType"] = *n.declaring_type;
    if (n.change_tag != ChangeTag::None) o["changeTag"] = std::string(to_string(n.change_tag));
    nodes.push_back(std::move(o));
  }
  doc["nodes"] = std::move(nodes);
  ordered_json edges = ordered_json::array();
  for (const Edge& e : g.edges()) {
    ordered_json o = ordered_json::object();
    o["src"] = e.src;
    o["dst"] = e.dst;
    if (e.label.kind == EdgeKind::Para) {
      o["label"] = "para";
      o["paraIndex"] = e.label.para_index;
    } else {
      o["label"] = to_string(e.label);
    }
    edges.push_back(std::move(o));
  }
  doc["edges"] = std::move(edges);
  return doc.dump(2) + "\n";
}

Pdg load_pdg_file(const std::filesystem::path& path) {
  const std::string text = detail::read_file(path);
  try {
    Pdg g = read_pdg(text);
    if (!g.origin()) g = g.with_origin(Origin{path.string(), "", 0});
    return g;
  } catch (const ParseError& e) {
    throw e.in(path.string());
  } catch (const SchemaError& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

void save_pdg_file(const Pdg& g, const std::filesystem::path& path) { detail::write_file(path, write_pdg(g)); }

}  // namespace rulesynth
