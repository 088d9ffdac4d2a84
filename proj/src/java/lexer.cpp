#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_set>

#include "maintminer/java.hpp"

namespace maintminer::java {

namespace {

const std::unordered_set<std::string_view>& keywords() {
  static const std::unordered_set<std::string_view> k{
      "abstract", "assert",     "boolean",   "break",      "byte",     "case",      "catch",   "char",
      "class",    "const",      "continue",  "default",    "do",       "double",    "else",    "enum",
      "extends",  "final",      "finally",   "float",      "for",      "goto",      "if",      "implements",
      "import",   "instanceof", "int",       "interface",  "long",     "native",    "new",     "package",
      "private",  "protected",  "public",    "return",     "short",    "static",    "strictfp", "super",
      "switch",   "synchronized", "this",    "throw",      "throws",   "transient", "try",     "void",
      "volatile", "while",      "true",      "false",      "null"};
  return k;
}

constexpr std::array<std::string_view, 24> kOperators{">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++",
                                                      "--",   "&&",  "||",  "==",  "!=",  "<=", ">=", "+=",
                                                      "-=",   "*=",  "/=",  "%=",  "&=",  "|=", "^=", "<<"};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80; }
bool ident_part(unsigned char c) { return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80; }

std::string collapse(std::string_view s) {
  std::string out;
  bool space = false;
  for (char ch : s) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      space = !out.empty();
      continue;
    }
    if (space) out += ' ';
    space = false;
    out += ch;
  }
  return out;
}

// Body of a block comment with the leading '*' of each line removed.
std::string block_text(std::string_view body) {
  std::string out;
  std::size_t start = 0;
  while (start <= body.size()) {
    auto end = body.find('\n', start);
    if (end == std::string_view::npos) end = body.size();
    auto line = body.substr(start, end - start);
    std::size_t i = 0;
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    while (i < line.size() && line[i] == '*') ++i;
    out.append(line.substr(i));
    out += '\n';
    start = end + 1;
  }
  return collapse(out);
}

}  // namespace

Lexed lex(std::string_view s) {
  Lexed out;
  int line = 1;
  std::size_t i = 0;
  auto push = [&](TokenKind k, std::size_t from, std::size_t to, int at) {
    out.tokens.push_back({k, std::string(s.substr(from, to - from)), at});
  };
  if (s.size() >= 3 && static_cast<unsigned char>(s[0]) == 0xEF && static_cast<unsigned char>(s[1]) == 0xBB &&
      static_cast<unsigned char>(s[2]) == 0xBF)
    i = 3;
  while (i < s.size()) {
    const unsigned char c = static_cast<unsigned char>(s[i]);
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(c) || c == 0x1A) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      auto end = s.find('\n', i);
      if (end == std::string_view::npos) end = s.size();
      out.comments.push_back({false, collapse(s.substr(i + 2, end - i - 2)), line, out.tokens.size()});
      i = end;
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '*') {
      const auto end = s.find("*/", i + 2);
      if (end == std::string_view::npos) throw ParseError("unterminated comment", line);
      const bool doc = i + 2 < end && s[i + 2] == '*';
      const int at = line;
      line += static_cast<int>(std::count(s.begin() + static_cast<std::ptrdiff_t>(i), s.begin() + static_cast<std::ptrdiff_t>(end), '\n'));
      out.comments.push_back({doc, block_text(s.substr(i + (doc ? 3 : 2), end - i - (doc ? 3 : 2))), at, out.tokens.size()});
      i = end + 2;
      continue;
    }
    const std::size_t from = i;
    const int at = line;
    if (ident_start(c)) {
      while (i < s.size() && ident_part(static_cast<unsigned char>(s[i]))) ++i;
      const auto word = s.substr(from, i - from);
      push(keywords().count(word) ? TokenKind::Keyword : TokenKind::Identifier, from, i, at);
      continue;
    }
    if (std::isdigit(c) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      const bool hex = c == '0' && i + 1 < s.size() && (s[i + 1] == 'x' || s[i + 1] == 'X');
      while (i < s.size()) {
        const unsigned char d = static_cast<unsigned char>(s[i]);
        if (std::isalnum(d) || d == '_' || d == '.') {
          ++i;
          continue;
        }
        const unsigned char prev = static_cast<unsigned char>(s[i - 1]);
        if ((d == '+' || d == '-') && (hex ? (prev == 'p' || prev == 'P') : (prev == 'e' || prev == 'E'))) {
          ++i;
          continue;
        }
        break;
      }
      push(TokenKind::Literal, from, i, at);
      continue;
    }
    if (c == '"' && s.substr(i, 3) == "\"\"\"") {
      const auto end = s.find("\"\"\"", i + 3);
      std::size_t close = end;
      // Escaped quotes inside a text block.
      while (close != std::string_view::npos && close > 0 && s[close - 1] == '\\') close = s.find("\"\"\"", close + 1);
      if (close == std::string_view::npos) throw ParseError("unterminated text block", line);
      line += static_cast<int>(std::count(s.begin() + static_cast<std::ptrdiff_t>(i), s.begin() + static_cast<std::ptrdiff_t>(close), '\n'));
      i = close + 3;
      push(TokenKind::Literal, from, i, at);
      continue;
    }
    if (c == '"' || c == '\'') {
      ++i;
      while (i < s.size() && s[i] != static_cast<char>(c)) {
        if (s[i] == '\\') ++i;
        else if (s[i] == '\n') throw ParseError("unterminated literal", line);
        ++i;
      }
      if (i >= s.size()) throw ParseError("unterminated literal", line);
      ++i;
      push(TokenKind::Literal, from, i, at);
      continue;
    }
    std::size_t len = 1;
    for (auto op : kOperators)
      if (s.substr(i, op.size()) == op) {
        len = op.size();
        break;
      }
    if (len == 1 && s.substr(i, 2) == ">>") len = 2;
    i += len;
    push(TokenKind::Operator, from, i, at);
  }
  out.tokens.push_back({TokenKind::End, "", line});
  return out;
}

std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Body: return "Body";
    case NodeKind::Statement: return "Statement";
    case NodeKind::Return: return "Return";
    case NodeKind::Throw: return "Throw";
    case NodeKind::Break: return "Break";
    case NodeKind::Continue: return "Continue";
    case NodeKind::Assert: return "Assert";
    case NodeKind::Yield: return "Yield";
    case NodeKind::LocalType: return "LocalType";
    case NodeKind::If: return "If";
    case NodeKind::Then: return "Then";
    case NodeKind::Else: return "Else";
    case NodeKind::For: return "For";
    case NodeKind::ForEach: return "ForEach";
    case NodeKind::While: return "While";
    case NodeKind::Do: return "Do";
    case NodeKind::Switch: return "Switch";
    case NodeKind::Case: return "Case";
    case NodeKind::Try: return "Try";
    case NodeKind::Catch: return "Catch";
    case NodeKind::Finally: return "Finally";
    case NodeKind::Synchronized: return "Synchronized";
    case NodeKind::Labeled: return "Labeled";
  }
  return "?";
}

}  // namespace maintminer::java
