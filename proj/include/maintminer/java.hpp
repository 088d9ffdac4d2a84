#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "maintminer/error.hpp"

namespace maintminer::java {

class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line) : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

enum class TokenKind { Identifier, Keyword, Literal, Operator, End };

struct Token {
  TokenKind kind = TokenKind::End;
  std::string text;
  int line = 1;
};

struct Comment {
  bool javadoc = false;
  std::string text;  // markers stripped, whitespace collapsed
  int line = 1;
  std::size_t next_token = 0;  // index of the first token after the comment
};

struct Lexed {
  std::vector<Token> tokens;  // always ends with an End token
  std::vector<Comment> comments;
};

Lexed lex(std::string_view source);

/// Statement tree of a body. Leaves carry their normalized token text, inner
/// nodes the text of their header (condition, resources, case label, ...).
enum class NodeKind {
  Body,
  Statement,
  Return,
  Throw,
  Break,
  Continue,
  Assert,
  Yield,
  LocalType,
  If,
  Then,
  Else,
  For,
  ForEach,
  While,
  Do,
  Switch,
  Case,
  Try,
  Catch,
  Finally,
  Synchronized,
  Labeled,
};

std::string_view to_string(NodeKind k);

struct Node {
  NodeKind kind = NodeKind::Body;
  std::string value;
  std::vector<Node> children;
};

struct Modifiers {
  std::set<std::string> keywords;
  std::vector<std::string> annotations;  // normalized text, in source order
};

struct Param {
  std::string type;
  std::string name;
  Modifiers modifiers;
};

struct Field {
  std::string name;
  std::string type;
  Modifiers modifiers;
  std::optional<std::string> javadoc;
  std::string initializer;  // normalized tokens, empty when absent
  bool enum_constant = false;
};

enum class MethodKind { Method, Constructor, Initializer, StaticInitializer };

struct Method {
  MethodKind kind = MethodKind::Method;
  std::string name;
  std::string return_type;  // empty for constructors and initializers
  std::vector<Param> params;
  Modifiers modifiers;
  std::string type_params;
  std::vector<std::string> throws;
  std::optional<std::string> javadoc;
  std::optional<Node> body;
  std::vector<std::string> comments;  // non-doc comments inside the body
  std::size_t body_open = 0, body_close = 0;

  /// name(type,type,...)
  std::string signature() const;
};

struct TypeDecl {
  std::string kind;  // class, interface, enum, record, @interface
  std::string name;
  Modifiers modifiers;
  std::string type_params;
  std::string superclass;
  std::vector<std::string> interfaces;
  std::optional<std::string> javadoc;
  std::vector<Field> fields;
  std::vector<Method> methods;
  std::vector<TypeDecl> types;
  std::vector<std::string> comments;  // inside the body but outside members
  std::size_t body_open = 0, body_close = 0;
};

struct CompilationUnit {
  std::string package;
  std::vector<std::string> imports;
  std::vector<TypeDecl> types;
  std::vector<std::string> comments;  // outside every type body
};

/// Throws ParseError on input that is not a compilation unit.
CompilationUnit parse(std::string_view source);

}  // namespace maintminer::java
