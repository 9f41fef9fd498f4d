#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "json_util.hpp"
#include "rulesynth/error.hpp"
#include "rulesynth/rule.hpp"

namespace rulesynth {

using nlohmann::ordered_json;

void check_rule_valid(const Rule& r) {
  check_conjunct(r.pre, "pre");
  if (!r.pre.bound_vars.empty()) throw SchemaError("pre: preconditions have no bound variables");
  const std::set<std::string> pre_vars(r.pre.free_vars.begin(), r.pre.free_vars.end());
  for (std::size_t i = 0; i < r.post.size(); ++i) {
    const std::string where = "post[" + std::to_string(i) + "]";
    check_conjunct(r.post[i], where);
    for (const auto& v : r.post[i].free_vars)
      if (!pre_vars.count(v)) throw SchemaError(where + ".freeVars: " + v + " is not a precondition variable");
    for (const auto& v : r.post[i].bound_vars)
      if (pre_vars.count(v)) throw SchemaError(where + ".boundVars: " + v + " shadows a precondition variable");
  }
}

namespace {

ordered_json predicate_json(const NodePredicates& p) {
  ordered_json o = ordered_json::object();
  o["kind"] = std::string(to_string(p.kind));
  if (!p.label.is_bot()) o["label"] = encode(p.label);
  if (!p.data_type.is_bot()) o["dataType"] = encode(p.data_type);
  if (!p.data_value.is_bot()) o["dataValue"] = encode(p.data_value);
  if (!p.num_para.is_bot()) o["numPara"] = encode(p.num_para);
  if (!p.declaring_type.is_bot()) o["declaringType"] = encode(p.declaring_type);
  if (!p.trans_control_dep.is_bot()) o["transControlDep"] = encode(p.trans_control_dep);
  if (!p.output_ignored.is_bot()) o["outputIgnored"] = encode(p.output_ignored);
  return o;
}

NodePredicates predicate_from_json(const ordered_json& o, const std::string& path) {
  if (!o.is_object()) throw SchemaError(path + ": expected an object");
  static const std::set<std::string> known = {"kind",          "label",           "dataType",     "dataValue",
                                              "numPara",       "declaringType",   "transControlDep",
                                              "outputIgnored"};
  for (const auto& [k, v] : o.items())
    if (!known.count(k)) throw SchemaError(path + ": unknown field \"" + k + "\"");
  NodePredicates p;
  const std::string kind = detail::require_string(o, "kind", path);
  if (kind == "data") {
    p.kind = NodeKind::Data;
  } else if (kind == "action") {
    p.kind = NodeKind::Action;
  } else {
    throw SchemaError(path + ".kind: expected \"data\" or \"action\"");
  }
  if (auto s = detail::opt_string(o, "label", path)) p.label = decode_const_string(*s, path + ".label");
  if (auto s = detail::opt_string(o, "dataType", path)) p.data_type = decode_affix(*s, path + ".dataType");
  if (auto s = detail::opt_string(o, "dataValue", path)) p.data_value = decode_const_string(*s, path + ".dataValue");
  if (auto s = detail::opt_string(o, "numPara", path)) p.num_para = decode_const_int(*s, path + ".numPara");
  if (auto s = detail::opt_string(o, "declaringType", path))
    p.declaring_type = decode_affix(*s, path + ".declaringType");
  if (auto s = detail::opt_string(o, "transControlDep", path))
    p.trans_control_dep = decode_label_set(*s, path + ".transControlDep");
  if (auto s = detail::opt_string(o, "outputIgnored", path))
    p.output_ignored = decode_const_bool(*s, path + ".outputIgnored");
  return p;
}

ordered_json conjunct_json(const QuantifiedConjunct& q, bool with_bound) {
  ordered_json o = ordered_json::object();
  o["freeVars"] = q.free_vars;
  if (with_bound) o["boundVars"] = q.bound_vars;
  ordered_json nodes = ordered_json::object();
  for (const auto& v : q.free_vars) nodes[v] = predicate_json(q.nodes.at(v));
  for (const auto& v : q.bound_vars) nodes[v] = predicate_json(q.nodes.at(v));
  o["nodes"] = std::move(nodes);
  ordered_json edges = ordered_json::array();
  for (const auto& e : q.edges) edges.push_back(ordered_json::array({e.src, to_string(e.label), e.dst}));
  o["edges"] = std::move(edges);
  return o;
}

std::vector<std::string> string_list(const ordered_json& o, const char* key, const std::string& path, bool required) {
  std::vector<std::string> out;
  if (!o.contains(key)) {
    if (required) throw SchemaError(path + ": missing field \"" + key + "\"");
    return out;
  }
  const auto& arr = o[key];
  if (!arr.is_array()) throw SchemaError(path + "." + key + ": expected an array");
  for (std::size_t i = 0; i < arr.size(); ++i) {
    if (!arr[i].is_string())
      throw SchemaError(path + "." + key + "[" + std::to_string(i) + "]: expected a string");
    out.push_back(arr[i].get<std::string>());
  }
  return out;
}

QuantifiedConjunct conjunct_from_json(const ordered_json& o, const std::string& path, bool with_bound) {
  if (!o.is_object()) throw SchemaError(path + ": expected an object");
  QuantifiedConjunct q;
  q.free_vars = string_list(o, "freeVars", path, true);
  if (with_bound) {
    q.bound_vars = string_list(o, "boundVars", path, false);
  } else if (o.contains("boundVars")) {
    throw SchemaError(path + ".boundVars: preconditions have no bound variables");
  }
  const auto& nodes = detail::require_object(o, "nodes", path);
  for (const auto& [var, pred] : nodes.items()) q.nodes[var] = predicate_from_json(pred, path + ".nodes." + var);
  const auto& edges = detail::require_array(o, "edges", path);
  for (std::size_t i = 0; i < edges.size(); ++i) {
    const std::string ep = path + ".edges[" + std::to_string(i) + "]";
    const auto& e = edges[i];
    if (!e.is_array() || e.size() != 3 || !e[0].is_string() || !e[1].is_string() || !e[2].is_string())
      throw SchemaError(ep + ": expected [var, label, var]");
    auto label = parse_edge_label(e[1].get<std::string>());
    if (!label) throw SchemaError(ep + ": unknown edge label \"" + e[1].get<std::string>() + "\"");
    q.edges.push_back(EdgeAtom{e[0].get<std::string>(), *label, e[2].get<std::string>()});
  }
  std::sort(q.edges.begin(), q.edges.end());
  q.edges.erase(std::unique(q.edges.begin(), q.edges.end()), q.edges.end());
  check_conjunct(q, path);
  return q;
}

ordered_json rule_json(const Rule& r, bool with_provenance) {
  check_rule_valid(r);
  ordered_json doc = ordered_json::object();
  doc["name"] = r.name;
  doc["pre"] = conjunct_json(r.pre, false);
  ordered_json post = ordered_json::array();
  for (const auto& q : r.post) post.push_back(conjunct_json(q, true));
  doc["post"] = std::move(post);
  if (with_provenance) {
    ordered_json p = ordered_json::object();
    p["violating"] = r.provenance.violating;
    p["conforming"] = r.provenance.conforming;
    p["refinements"] = r.provenance.refinements;
    ordered_json settings = ordered_json::object();
    for (const auto& [k, v] : r.provenance.settings) settings[k] = v;
    p["settings"] = std::move(settings);
    doc["provenance"] = std::move(p);
  }
  return doc;
}

std::string conjunct_head(const std::string& name, const QuantifiedConjunct& q) {
  std::string s = name + "(";
  bool first = true;
  for (const auto* vars : {&q.free_vars, &q.bound_vars}) {
    for (const auto& v : *vars) {
      s += (first ? "" : ", ") + v;
      first = false;
    }
  }
  return s + ")";
}

std::string indented(std::string s) {
  for (std::size_t pos = s.find('\n'); pos != std::string::npos; pos = s.find('\n', pos + 3)) s.replace(pos, 1, "\n  ");
  return s;
}

std::string var_list(const std::vector<std::string>& vars) {
  std::string s;
  for (const auto& v : vars) s += (s.empty() ? "" : ", ") + v;
  return s;
}

}  // namespace

std::string write_rule(const Rule& r) { return rule_json(r, true).dump(2) + "\n"; }

std::string write_rule_body(const Rule& r) { return rule_json(r, false).dump(2) + "\n"; }

Rule read_rule(std::string_view text) {
  const ordered_json doc = detail::parse_json(text);
  if (!doc.is_object()) throw SchemaError("<root>: expected an object");
  Rule r;
  r.name = detail::require_string(doc, "name", "<root>");
  r.pre = conjunct_from_json(detail::require_object(doc, "pre", "<root>"), "pre", false);
  const auto& post = detail::require_array(doc, "post", "<root>");
  for (std::size_t i = 0; i < post.size(); ++i)
    r.post.push_back(conjunct_from_json(post[i], "post[" + std::to_string(i) + "]", true));
  if (doc.contains("provenance")) {
    const auto& p = doc["provenance"];
    if (!p.is_object()) throw SchemaError("provenance: expected an object");
    r.provenance.violating = string_list(p, "violating", "provenance", false);
    r.provenance.conforming = string_list(p, "conforming", "provenance", false);
    r.provenance.refinements = string_list(p, "refinements", "provenance", false);
    if (p.contains("settings")) {
      const auto& s = p["settings"];
      if (!s.is_object()) throw SchemaError("provenance.settings: expected an object");
      for (const auto& [k, v] : s.items()) {
        if (!v.is_string()) throw SchemaError("provenance.settings." + k + ": expected a string");
        r.provenance.settings[k] = v.get<std::string>();
      }
    }
  }
  check_rule_valid(r);
  return r;
}

Rule load_rule_file(const std::string& path) {
  const std::string text = detail::read_file(path);
  try {
    return read_rule(text);
  } catch (const ParseError& e) {
    throw e.in(path);
  } catch (const SchemaError& e) {
    throw SchemaError(path + ": " + e.what());
  }
}

void save_rule_file(const Rule& r, const std::string& path) { detail::write_file(path, write_rule(r)); }

std::string render_rule(const Rule& r) {
  std::ostringstream out;
  out << "rule " << r.name << "\n";
  out << "R = exists " << var_list(r.pre.free_vars) << ". [ " << conjunct_head("pre", r.pre);
  if (!r.post.empty()) {
    out << " /\\ !(";
    for (std::size_t i = 0; i < r.post.size(); ++i) {
      out << (i ? " \\/ " : " ");
      if (!r.post[i].bound_vars.empty()) out << "exists " << var_list(r.post[i].bound_vars) << ". ";
      out << conjunct_head("post_" + std::to_string(i + 1), r.post[i]);
    }
    out << " )";
  }
  out << " ]\n\n";
  out << conjunct_head("pre", r.pre) << " :=\n  " << indented(render_atoms(r.pre, true)) << "\n";
  if (r.post.empty()) {
    out << "\npostcondition: False\n";
  } else {
    for (std::size_t i = 0; i < r.post.size(); ++i) {
      out << "\n" << conjunct_head("post_" + std::to_string(i + 1), r.post[i]) << " :=\n  "
          << indented(render_atoms(r.post[i], true)) << "\n";
    }
  }
  return out.str();
}

}  // namespace rulesynth
