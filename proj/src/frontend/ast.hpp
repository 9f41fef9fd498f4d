// Private AST for the mini-language.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rulesynth::frontend {

struct Expr {
  enum class Kind {
    Literal,  // text = value, type = literal type (may be empty for null)
    Name,     // text = identifier
    Field,    // receiver.text without a call; only legal as a static-call qualifier
    Call,     // [receiver.]text(args)
    New,      // new type(args)
    Unary,    // text = operator, args[0]
    Binary,   // text = operator, args[0], args[1]
  };

  Kind kind = Kind::Literal;
  int line = 0;
  int column = 0;
  std::string text;
  std::string type;
  std::unique_ptr<Expr> receiver;
  std::vector<std::unique_ptr<Expr>> args;
};

using ExprPtr = std::unique_ptr<Expr>;

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct CatchClause {
  std::string type;
  std::string name;
  int line = 0;
  StmtPtr body;
};

struct Stmt {
  enum class Kind {
    Decl,    // type name [= value]
    Assign,  // name = value, or name op= value when op is set
    Expr,
    If,
    While,
    DoWhile,
    For,
    Return,
    Throw,
    Try,
    Block,
    Nothing,  // empty statement, break, continue
  };

  Kind kind = Kind::Nothing;
  int line = 0;
  int column = 0;
  std::string type;
  std::string name;
  std::string op;
  ExprPtr value;  // initializer, assigned value, condition, returned value
  std::vector<StmtPtr> body;  // block items; If: [then, else?]; loops: [body]; For: [init?, update?] in init/update
  StmtPtr init;
  StmtPtr update;
  std::vector<CatchClause> catches;
  StmtPtr finally_block;
};

struct Param {
  std::string type;
  std::string name;
};

struct Method {
  std::string name;
  std::string return_type;
  int line = 0;
  std::vector<Param> params;
  StmtPtr body;
};

/// Parses exactly one method declaration.
Method parse_method(const std::string& source);

}  // namespace rulesynth::frontend
