#include <cctype>
#include <map>
#include <string>
#include <vector>

#include "ast.hpp"
#include "rulesynth/error.hpp"
#include "rulesynth/frontend.hpp"

namespace rulesynth {

namespace {

using frontend::CatchClause;
using frontend::Expr;
using frontend::Method;
using frontend::Stmt;

bool is_relational(const std::string& op) {
  return op == "<" || op == "<=" || op == ">" || op == ">=" || op == "==" || op == "!=";
}

class Builder {
 public:
  Pdg build(const Method& m, const std::string& file) {
    scopes_.emplace_back();
    for (const auto& p : m.params) {
      std::size_t n = add_data(p.type, std::nullopt);
      scopes_.back()[p.name] = Binding{p.type, n};
    }
    stmt(*m.body);
    std::vector<Node> nodes = std::move(nodes_);
    for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].id = "n" + std::to_string(i);
    std::vector<Edge> edges;
    edges.reserve(edges_.size());
    for (const auto& [s, d, l] : edges_) edges.push_back(Edge{nodes[s].id, nodes[d].id, l});
    return Pdg(std::move(nodes), std::move(edges), Origin{file, m.name, m.line});
  }

 private:
  struct Binding {
    std::string type;
    std::optional<std::size_t> node;  // unset until first assignment
  };

  struct RawEdge {
    std::size_t src;
    std::size_t dst;
    EdgeLabel label;
  };

  [[noreturn]] static void unsupported(const std::string& what, int line) {
    throw UnsupportedConstruct("unsupported construct: " + what + " (line " + std::to_string(line) + ")");
  }

  std::size_t add_data(const std::string& type, std::optional<std::string> value) {
    Node n;
    n.kind = NodeKind::Data;
    if (!type.empty()) n.data_type = type;
    n.data_value = std::move(value);
    nodes_.push_back(std::move(n));
    return nodes_.size() - 1;
  }

  std::size_t add_action(const std::string& label, std::optional<int> num_para,
                         std::optional<std::string> declaring = std::nullopt) {
    Node n;
    n.kind = NodeKind::Action;
    n.label = label;
    n.num_para = num_para;
    n.declaring_type = std::move(declaring);
    nodes_.push_back(std::move(n));
    const std::size_t id = nodes_.size() - 1;
    if (!control_.empty()) add_edge(control_.back(), id, EdgeLabel::dep());
    return id;
  }

  void add_edge(std::size_t src, std::size_t dst, EdgeLabel label) {
    for (const auto& e : edges_)
      if (e.src == src && e.dst == dst && e.label == label) return;
    edges_.push_back(RawEdge{src, dst, label});
  }

  Binding* lookup(const std::string& name) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return &f->second;
    }
    return nullptr;
  }

  // A value read from an identifier: a local, a parameter, or an implicit
  // field / outer variable that gets one untyped node per method.
  std::size_t read_name(const std::string& name) {
    if (Binding* b = lookup(name)) {
      if (!b->node) b->node = add_data(b->type, std::nullopt);
      return *b->node;
    }
    auto it = implicit_.find(name);
    if (it != implicit_.end()) return it->second;
    const std::size_t n = add_data("", std::nullopt);
    implicit_[name] = n;
    return n;
  }

  // Dotted chain of plain names, e.g. `android.util.Log`; empty if `e` is
  // anything else.
  static std::string qualified_name(const Expr& e) {
    if (e.kind == Expr::Kind::Name) return e.text;
    if (e.kind == Expr::Kind::Field && e.receiver) {
      std::string q = qualified_name(*e.receiver);
      return q.empty() ? q : q + "." + e.text;
    }
    return {};
  }

  bool names_type(const Expr& recv) {
    if (recv.kind == Expr::Kind::Name) {
      return recv.text != "this" && !lookup(recv.text) &&
             std::isupper(static_cast<unsigned char>(recv.text.front()));
    }
    if (recv.kind == Expr::Kind::Field) {
      const Expr* root = &recv;
      while (root->kind == Expr::Kind::Field) root = root->receiver.get();
      return root->kind == Expr::Kind::Name && root->text != "this" && !lookup(root->text) &&
             !qualified_name(recv).empty();
    }
    return false;
  }

  void note_throwing(std::size_t call) {
    if (!try_calls_.empty()) try_calls_.back().push_back(call);
  }

  std::size_t finish_op(std::size_t action, bool want_value, const std::string& result_type) {
    if (!want_value) return action;
    const std::size_t r = add_data(result_type, std::nullopt);
    add_edge(action, r, EdgeLabel::def());
    return r;
  }

  std::vector<std::size_t> eval_args(const std::vector<frontend::ExprPtr>& args) {
    std::vector<std::size_t> out;
    out.reserve(args.size());
    for (const auto& a : args) out.push_back(*eval(*a, true));
    return out;
  }

  void wire_args(std::size_t action, const std::vector<std::size_t>& args) {
    for (std::size_t i = 0; i < args.size(); ++i) add_edge(args[i], action, EdgeLabel::para(static_cast<int>(i)));
  }

  // Returns the data node holding the value when `want_value`; otherwise the
  // value (if any) is not materialized.
  std::optional<std::size_t> eval(const Expr& e, bool want_value) {
    switch (e.kind) {
      case Expr::Kind::Literal:
        return add_data(e.type, e.text);
      case Expr::Kind::Name:
        return read_name(e.text);
      case Expr::Kind::Field:
        unsupported("field access '" + qualified_name(e) + "'", e.line);
      case Expr::Kind::Call: {
        std::optional<std::size_t> recv;
        std::optional<std::string> declaring;
        if (e.receiver) {
          if (names_type(*e.receiver)) {
            declaring = qualified_name(*e.receiver);
          } else {
            recv = eval(*e.receiver, true);
          }
        }
        const auto args = eval_args(e.args);
        const std::size_t call = add_action(e.text, static_cast<int>(args.size()), declaring);
        if (recv) add_edge(*recv, call, EdgeLabel::recv());
        wire_args(call, args);
        note_throwing(call);
        return finish_op(call, want_value, "");
      }
      case Expr::Kind::New: {
        const auto args = eval_args(e.args);
        const std::size_t call = add_action(e.text + ".<init>", static_cast<int>(args.size()), e.text);
        wire_args(call, args);
        note_throwing(call);
        // A constructed object is always materialized so that later calls on
        // it and `new Foo().bar()` chains have a receiver node.
        return finish_op(call, true, e.text);
      }
      case Expr::Kind::Unary: {
        const std::size_t v = *eval(*e.args[0], true);
        const std::size_t op = add_action(e.text, 1);
        add_edge(v, op, EdgeLabel::para(0));
        return finish_op(op, want_value, e.text == "!" ? "boolean" : type_of(v));
      }
      case Expr::Kind::Binary: {
        const std::size_t l = *eval(*e.args[0], true);
        const std::size_t r = *eval(*e.args[1], true);
        const std::size_t op = add_action(e.text, 2);
        add_edge(l, op, EdgeLabel::para(0));
        add_edge(r, op, EdgeLabel::para(1));
        std::string type;
        if (is_relational(e.text) || e.text == "&&" || e.text == "||") {
          type = "boolean";
        } else if (e.text == "+" && (type_of(l) == "String" || type_of(r) == "String")) {
          type = "String";
        } else if (type_of(l) == type_of(r)) {
          type = type_of(l);
        }
        return finish_op(op, want_value, type);
      }
    }
    return std::nullopt;
  }

  std::string type_of(std::size_t n) const { return nodes_[n].data_type.value_or(""); }

  void assign(Binding& b, std::size_t value) {
    if (!b.type.empty() && !nodes_[value].data_type) nodes_[value].data_type = b.type;
    b.node = value;
  }

  std::size_t control(std::string_view label, const Expr* cond) {
    std::optional<std::size_t> guard;
    if (cond) guard = eval(*cond, true);
    const std::size_t c = add_action(std::string(label), std::nullopt);
    if (guard) add_edge(*guard, c, EdgeLabel::cond());
    return c;
  }

  void nested(std::size_t ctrl, const Stmt& s) {
    control_.push_back(ctrl);
    scoped(s);
    control_.pop_back();
  }

  void scoped(const Stmt& s) {
    scopes_.emplace_back();
    stmt(s);
    scopes_.pop_back();
  }

  void stmt(const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Nothing:
        return;
      case Stmt::Kind::Block:
        scopes_.emplace_back();
        for (const auto& c : s.body) stmt(*c);
        scopes_.pop_back();
        return;
      case Stmt::Kind::Decl: {
        Binding b{s.type, std::nullopt};
        if (s.value) assign(b, *eval(*s.value, true));
        scopes_.back()[s.name] = b;
        return;
      }
      case Stmt::Kind::Assign: {
        Binding* b = lookup(s.name);
        if (!b) unsupported("assignment to undeclared variable or field '" + s.name + "'", s.line);
        std::size_t v;
        if (s.op.empty()) {
          v = *eval(*s.value, true);
        } else {
          const std::size_t old = read_name(s.name);
          const std::size_t r = *eval(*s.value, true);
          const std::size_t op = add_action(s.op, 2);
          add_edge(old, op, EdgeLabel::para(0));
          add_edge(r, op, EdgeLabel::para(1));
          v = finish_op(op, true, "");
        }
        assign(*b, v);
        return;
      }
      case Stmt::Kind::Expr:
        eval(*s.value, false);
        return;
      case Stmt::Kind::If: {
        const std::size_t c = control(kIfLabel, s.value.get());
        nested(c, *s.body[0]);
        if (s.body.size() > 1) nested(c, *s.body[1]);
        return;
      }
      case Stmt::Kind::While: {
        const std::size_t c = control(kLoopLabel, s.value.get());
        nested(c, *s.body[0]);
        return;
      }
      case Stmt::Kind::DoWhile: {
        const std::size_t c = control(kLoopLabel, nullptr);
        nested(c, *s.body[0]);
        const std::size_t guard = *eval(*s.value, true);
        add_edge(guard, c, EdgeLabel::cond());
        return;
      }
      case Stmt::Kind::For: {
        scopes_.emplace_back();
        if (s.init) stmt(*s.init);
        const std::size_t c = control(kLoopLabel, s.value.get());
        control_.push_back(c);
        scoped(*s.body[0]);
        if (s.update) stmt(*s.update);
        control_.pop_back();
        scopes_.pop_back();
        return;
      }
      case Stmt::Kind::Return:
      case Stmt::Kind::Throw: {
        std::optional<std::size_t> v;
        if (s.value) v = eval(*s.value, true);
        const std::size_t a = add_action(s.kind == Stmt::Kind::Return ? "return" : "throw", v ? 1 : 0);
        if (v) add_edge(*v, a, EdgeLabel::para(0));
        return;
      }
      case Stmt::Kind::Try: {
        try_calls_.emplace_back();
        scoped(*s.body[0]);
        const std::vector<std::size_t> calls = std::move(try_calls_.back());
        try_calls_.pop_back();
        // Calls inside a nested try may also escape to the enclosing one.
        if (!try_calls_.empty()) try_calls_.back().insert(try_calls_.back().end(), calls.begin(), calls.end());
        for (const CatchClause& c : s.catches) {
          const std::size_t handler = add_action(std::string(kCatchLabel), std::nullopt);
          for (std::size_t call : calls) add_edge(call, handler, EdgeLabel::thrw());
          control_.push_back(handler);
          scopes_.emplace_back();
          const std::size_t ex = add_data(c.type, std::nullopt);
          add_edge(handler, ex, EdgeLabel::def());
          scopes_.back()[c.name] = Binding{c.type, ex};
          stmt(*c.body);
          scopes_.pop_back();
          control_.pop_back();
        }
        if (s.finally_block) scoped(*s.finally_block);
        return;
      }
    }
  }

  std::vector<Node> nodes_;
  std::vector<RawEdge> edges_;
  std::vector<std::map<std::string, Binding>> scopes_;
  std::map<std::string, std::size_t> implicit_;
  std::vector<std::size_t> control_;
  std::vector<std::vector<std::size_t>> try_calls_;
};

}  // namespace

Pdg build_raw_pdg(const MethodSource& m) {
  try {
    frontend::Method method = frontend::parse_method(m.body);
    return Builder().build(method, m.name);
  } catch (const ParseError& e) {
    if (m.name.empty()) throw;
    throw e.in(m.name);
  } catch (const UnsupportedConstruct& e) {
    if (m.name.empty()) throw;
    throw UnsupportedConstruct(m.name + ": " + e.what());
  }
}

Pdg build_pdg(const MethodSource& m) { return dedup_getters(normalize_relops(build_raw_pdg(m))); }

}  // namespace rulesynth
