#include <algorithm>
#include <functional>

#include "maintminer/java.hpp"

namespace maintminer::java {

std::string Method::signature() const {
  std::string s = name + "(";
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (i) s += ',';
    s += params[i].type;
  }
  return s + ")";
}

namespace {

const std::set<std::string> kModifierWords{"public",   "protected",    "private",   "static",   "abstract",
                                           "final",    "native",       "synchronized", "transient", "volatile",
                                           "strictfp", "default",      "sealed"};

bool is_type_start_keyword(std::string_view t) {
  return t == "class" || t == "interface" || t == "enum";
}

class Parser {
 public:
  explicit Parser(const Lexed& lx) : lx_(lx), t_(lx.tokens) {}

  CompilationUnit unit() {
    CompilationUnit cu;
    if (starts_package()) {
      modifiers();
      expect("package");
      cu.package = qualified();
      expect(";");
    }
    while (at("import")) {
      ++p_;
      std::string text;
      if (at("static")) {
        ++p_;
        text = "static ";
      }
      text += qualified();
      if (at(".") && peek(1).text == "*") {
        p_ += 2;
        text += ".*";
      }
      expect(";");
      cu.imports.push_back(text);
    }
    while (!end()) {
      if (accept(";")) continue;
      if (module_declaration()) continue;
      const std::size_t start = p_;
      auto mods = modifiers();
      if (!type_keyword_here()) fail("expected a type declaration");
      cu.types.push_back(type_decl(std::move(mods), start));
    }
    assign_comments(cu);
    return cu;
  }

 private:
  const Lexed& lx_;
  const std::vector<Token>& t_;
  std::size_t p_ = 0;
  std::vector<char> used_doc_ = std::vector<char>(lx_.comments.size(), 0);

  const Token& peek(std::size_t k = 0) const { return t_[std::min(p_ + k, t_.size() - 1)]; }
  bool end() const { return peek().kind == TokenKind::End; }
  bool at(std::string_view s) const { return peek().kind != TokenKind::End && peek().text == s; }
  bool accept(std::string_view s) {
    if (!at(s)) return false;
    ++p_;
    return true;
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what + (end() ? " at end of input" : " near '" + peek().text + "'"), peek().line);
  }
  void expect(std::string_view s) {
    if (!accept(s)) fail("expected '" + std::string(s) + "'");
  }
  std::string identifier() {
    if (peek().kind != TokenKind::Identifier) fail("expected an identifier");
    return t_[p_++].text;
  }

  static std::string join(const std::vector<Token>& t, std::size_t from, std::size_t to) {
    std::string s;
    for (std::size_t i = from; i < to; ++i) {
      if (i > from) s += ' ';
      s += t[i].text;
    }
    return s;
  }

  bool starts_package() const {
    std::size_t k = p_;
    while (t_[k].text == "@" && t_[k + 1].text != "interface") {
      k += 2;
      while (t_[k].text == "." && t_[k + 1].kind == TokenKind::Identifier) k += 2;
      if (t_[k].text == "(") k = skip_balanced(k);
    }
    return t_[k].text == "package" && t_[k].kind == TokenKind::Keyword;
  }

  // Index just past the group opened at k.
  std::size_t skip_balanced(std::size_t k) const {
    int depth = 0;
    for (; t_[k].kind != TokenKind::End; ++k) {
      const auto& s = t_[k].text;
      if (t_[k].kind != TokenKind::Operator) continue;
      if (s == "(" || s == "[" || s == "{") ++depth;
      if (s == ")" || s == "]" || s == "}")
        if (--depth == 0) return k + 1;
    }
    throw ParseError("unbalanced brackets", t_[k].line);
  }

  bool module_declaration() {
    std::size_t k = p_;
    if (t_[k].text == "open") ++k;
    if (t_[k].text != "module" || t_[k + 1].kind != TokenKind::Identifier) return false;
    while (t_[k].text != "{" && t_[k].kind != TokenKind::End) ++k;
    if (t_[k].kind == TokenKind::End) return false;
    p_ = skip_balanced(k);
    return true;
  }

  std::string qualified() {
    std::string s = identifier();
    while (at(".") && peek(1).kind == TokenKind::Identifier) {
      ++p_;
      s += "." + identifier();
    }
    return s;
  }

  std::string annotation() {
    const std::size_t from = p_;
    expect("@");
    qualified();
    if (at("(")) p_ = skip_balanced(p_);
    std::string s;
    for (std::size_t i = from; i < p_; ++i) s += t_[i].text;
    return s;
  }

  void skip_annotations() {
    while (at("@") && peek(1).text != "interface") annotation();
  }

  Modifiers modifiers() {
    Modifiers m;
    while (true) {
      if (at("@") && peek(1).text != "interface") {
        m.annotations.push_back(annotation());
      } else if (peek().text == "non" && peek(1).text == "-" && peek(2).text == "sealed") {
        p_ += 3;
        m.keywords.insert("non-sealed");
      } else if (kModifierWords.count(peek().text) &&
                 (peek().kind == TokenKind::Keyword || peek(1).kind != TokenKind::Operator)) {
        if (peek().text == "sealed" && peek(1).kind == TokenKind::Operator) break;
        if (peek().text == "default" && (peek(1).text == ":" || peek(1).text == "->")) break;
        m.keywords.insert(t_[p_++].text);
      } else {
        break;
      }
    }
    return m;
  }

  bool type_keyword_here() const {
    if (is_type_start_keyword(peek().text) && peek().kind == TokenKind::Keyword) return true;
    if (peek().text == "@" && peek(1).text == "interface") return true;
    return peek().text == "record" && peek(1).kind == TokenKind::Identifier && peek(2).text != "=" &&
           peek(2).text != ";" && peek(2).text != ",";
  }

  // Generic argument or parameter list starting at '<'; returns its text.
  std::string angle_group() {
    std::string s;
    int depth = 0;
    do {
      if (end()) fail("unterminated type arguments");
      const std::string& tok = peek().text;
      if (tok == "<") ++depth;
      else if (tok == ">") --depth;
      else if (tok == ">>") depth -= 2;
      else if (tok == ">>>") depth -= 3;
      if (tok == "extends" || tok == "super" || tok == "&")
        s += " " + tok + " ";
      else if (tok != "@")
        s += tok;
      else {
        annotation();
        continue;
      }
      ++p_;
    } while (depth > 0);
    if (depth < 0) fail("unbalanced type arguments");
    return s;
  }

  std::string type() {
    skip_annotations();
    std::string s;
    if (peek().kind == TokenKind::Keyword && peek().text != "void" &&
        !(peek().text == "int" || peek().text == "long" || peek().text == "short" || peek().text == "byte" ||
          peek().text == "char" || peek().text == "boolean" || peek().text == "float" || peek().text == "double"))
      fail("expected a type");
    if (peek().kind != TokenKind::Identifier && peek().kind != TokenKind::Keyword) fail("expected a type");
    s = t_[p_++].text;
    if (at("<")) s += angle_group();
    while (at(".") && (peek(1).kind == TokenKind::Identifier || peek(1).text == "@")) {
      ++p_;
      skip_annotations();
      s += "." + identifier();
      if (at("<")) s += angle_group();
    }
    s += dims();
    return s;
  }

  std::string dims() {
    std::string s;
    while (true) {
      const std::size_t save = p_;
      skip_annotations();
      if (at("[") && peek(1).text == "]") {
        p_ += 2;
        s += "[]";
      } else {
        p_ = save;
        return s;
      }
    }
  }

  // The last doc comment directly before a declaration documents it.
  std::optional<std::string> doc_at(std::size_t start) {
    for (std::size_t i = lx_.comments.size(); i-- > 0;) {
      const auto& c = lx_.comments[i];
      if (c.javadoc && c.next_token == start && !used_doc_[i]) {
        used_doc_[i] = 1;
        return c.text;
      }
    }
    return std::nullopt;
  }

  TypeDecl type_decl(Modifiers mods, std::size_t start) {
    TypeDecl td;
    td.modifiers = std::move(mods);
    td.javadoc = doc_at(start);
    if (accept("@")) {
      expect("interface");
      td.kind = "@interface";
    } else {
      td.kind = t_[p_++].text;
    }
    td.name = identifier();
    if (at("<")) td.type_params = angle_group();
    std::vector<Field> components;
    if (td.kind == "record") {
      expect("(");
      while (!at(")")) {
        const std::size_t fs = p_;
        Field f;
        f.modifiers = modifiers();
        f.type = type();
        if (accept("...")) f.type += "...";
        f.name = identifier();
        f.javadoc = doc_at(fs);
        components.push_back(std::move(f));
        if (!accept(",")) break;
      }
      expect(")");
    }
    while (!at("{")) {
      if (accept("extends")) {
        if (td.kind == "interface") {
          do td.interfaces.push_back(type());
          while (accept(","));
        } else {
          td.superclass = type();
        }
      } else if (accept("implements")) {
        do td.interfaces.push_back(type());
        while (accept(","));
      } else if (peek().text == "permits") {
        ++p_;
        do type();
        while (accept(","));
      } else {
        fail("unexpected token in type header");
      }
    }
    td.fields = std::move(components);
    class_body(td);
    return td;
  }

  void class_body(TypeDecl& td) {
    td.body_open = p_;
    expect("{");
    if (td.kind == "enum") enum_constants(td);
    while (!at("}")) {
      if (end()) fail("unterminated class body");
      member(td);
    }
    td.body_close = p_;
    ++p_;
  }

  void enum_constants(TypeDecl& td) {
    while (!at(";") && !at("}")) {
      const std::size_t start = p_;
      Field f;
      f.modifiers = modifiers();
      f.javadoc = doc_at(start);
      f.name = identifier();
      f.type = td.name;
      f.enum_constant = true;
      const std::size_t from = p_;
      if (at("(")) p_ = skip_balanced(p_);
      if (at("{")) p_ = skip_balanced(p_);
      f.initializer = join(t_, from, p_);
      td.fields.push_back(std::move(f));
      if (!accept(",")) break;
    }
    accept(";");
  }

  void member(TypeDecl& td) {
    if (accept(";")) return;
    const std::size_t start = p_;
    if (at("{") || (at("static") && peek(1).text == "{")) {
      Method m;
      m.kind = accept("static") ? MethodKind::StaticInitializer : MethodKind::Initializer;
      m.javadoc = doc_at(start);
      method_body(m);
      td.methods.push_back(std::move(m));
      return;
    }
    auto mods = modifiers();
    if (type_keyword_here()) {
      td.types.push_back(type_decl(std::move(mods), start));
      return;
    }
    std::string tparams;
    if (at("<")) tparams = angle_group();
    if (peek().kind == TokenKind::Identifier && (peek(1).text == "(" || (peek(1).text == "{" && td.kind == "record"))) {
      Method m;
      m.kind = MethodKind::Constructor;
      m.modifiers = std::move(mods);
      m.type_params = tparams;
      m.javadoc = doc_at(start);
      m.name = identifier();
      if (at("(")) parameters(m);
      method_tail(m);
      td.methods.push_back(std::move(m));
      return;
    }
    std::string ty = type();
    if (peek().kind == TokenKind::Identifier && peek(1).text == "(") {
      Method m;
      m.kind = MethodKind::Method;
      m.modifiers = std::move(mods);
      m.type_params = tparams;
      m.javadoc = doc_at(start);
      m.return_type = ty;
      m.name = identifier();
      parameters(m);
      m.return_type += dims();
      method_tail(m);
      td.methods.push_back(std::move(m));
      return;
    }
    auto doc = doc_at(start);
    while (true) {
      Field f;
      f.modifiers = mods;
      f.javadoc = doc;
      f.name = identifier();
      f.type = ty + dims();
      if (accept("=")) f.initializer = initializer();
      td.fields.push_back(std::move(f));
      if (accept(";")) break;
      expect(",");
    }
  }

  // Tokens up to the next declarator ',' or ';' at bracket depth 0.
  std::string initializer() {
    const std::size_t from = p_;
    int depth = 0;
    while (true) {
      if (end()) fail("unterminated initializer");
      const auto& tok = peek();
      if (tok.kind == TokenKind::Operator) {
        if (tok.text == "(" || tok.text == "[" || tok.text == "{") ++depth;
        if (tok.text == ")" || tok.text == "]" || tok.text == "}") --depth;
        if (depth < 0) fail("unbalanced initializer");
        if (depth == 0 && tok.text == ";") break;
        // A comma inside generic arguments is not a declarator separator.
        if (depth == 0 && tok.text == "," && peek(1).kind == TokenKind::Identifier &&
            (peek(2).text == "=" || peek(2).text == "," || peek(2).text == ";" || peek(2).text == "["))
          break;
      }
      ++p_;
    }
    return join(t_, from, p_);
  }

  void parameters(Method& m) {
    expect("(");
    while (!at(")")) {
      Param prm;
      prm.modifiers = modifiers();
      prm.type = type();
      if (accept("...")) prm.type += "...";
      if (at("this")) {
        ++p_;
        if (!accept(",")) break;
        continue;
      }
      if (peek().kind == TokenKind::Identifier && peek(1).text == "." && peek(2).text == "this") {
        p_ += 3;
        if (!accept(",")) break;
        continue;
      }
      prm.name = identifier();
      prm.type += dims();
      m.params.push_back(std::move(prm));
      if (!accept(",")) break;
    }
    expect(")");
  }

  void method_tail(Method& m) {
    if (accept("throws")) {
      do m.throws.push_back(type());
      while (accept(","));
    }
    if (accept("default")) {
      while (!at(";")) {
        if (end()) fail("unterminated default value");
        if (at("(") || at("{") || at("["))
          p_ = skip_balanced(p_);
        else
          ++p_;
      }
    }
    if (accept(";")) return;
    method_body(m);
  }

  void method_body(Method& m) {
    m.body_open = p_;
    Node body{NodeKind::Body, "", {}};
    expect("{");
    while (!at("}")) {
      if (end()) fail("unterminated method body");
      statement(body.children);
    }
    m.body_close = p_;
    ++p_;
    m.body = std::move(body);
  }

  // Statement text up to (excluding) the terminating ';' at depth 0, consuming it.
  std::string until_semicolon() {
    const std::size_t from = p_;
    int depth = 0;
    while (true) {
      if (end()) fail("missing ';'");
      const auto& tok = peek();
      if (tok.kind == TokenKind::Operator) {
        if (tok.text == "(" || tok.text == "[" || tok.text == "{") ++depth;
        if (tok.text == ")" || tok.text == "]" || tok.text == "}") --depth;
        if (depth < 0) fail("unbalanced statement");
        if (depth == 0 && tok.text == ";") break;
      }
      ++p_;
    }
    auto s = join(t_, from, p_);
    ++p_;
    return s;
  }

  std::string paren_text() {
    if (!at("(")) fail("expected '('");
    const std::size_t from = p_ + 1;
    p_ = skip_balanced(p_);
    return join(t_, from, p_ - 1);
  }

  void block_into(std::vector<Node>& out) {
    expect("{");
    while (!at("}")) {
      if (end()) fail("unterminated block");
      statement(out);
    }
    ++p_;
  }

  bool local_type_here() {
    std::size_t k = p_;
    while (true) {
      const auto& s = t_[k].text;
      if (s == "final" || s == "abstract" || s == "static" || s == "strictfp" || s == "sealed") {
        ++k;
      } else if (s == "non" && t_[k + 1].text == "-" && t_[k + 2].text == "sealed") {
        k += 3;
      } else if (s == "@" && t_[k + 1].text != "interface") {
        k += 2;
        while (t_[k].text == "." && t_[k + 1].kind == TokenKind::Identifier) k += 2;
        if (t_[k].text == "(") k = skip_balanced(k);
      } else {
        break;
      }
    }
    const auto& s = t_[k];
    if (s.kind == TokenKind::Keyword && is_type_start_keyword(s.text)) return true;
    return s.text == "record" && t_[k + 1].kind == TokenKind::Identifier &&
           (t_[k + 2].text == "(" || t_[k + 2].text == "<");
  }

  void statement(std::vector<Node>& out) {
    const auto& tok = peek();
    const std::string& w = tok.text;
    if (tok.kind == TokenKind::Operator && w == "{") {
      block_into(out);
      return;
    }
    if (accept(";")) return;
    if (tok.kind == TokenKind::Keyword) {
      if (w == "if") {
        ++p_;
        Node n{NodeKind::If, paren_text(), {}};
        Node then{NodeKind::Then, "", {}};
        statement(then.children);
        n.children.push_back(std::move(then));
        if (accept("else")) {
          Node els{NodeKind::Else, "", {}};
          statement(els.children);
          n.children.push_back(std::move(els));
        }
        out.push_back(std::move(n));
        return;
      }
      if (w == "for") {
        ++p_;
        const std::size_t open = p_;
        std::string header = paren_text();
        bool classic = false;
        int depth = 0;
        for (std::size_t k = open + 1; k + 1 < p_; ++k) {
          const auto& s = t_[k].text;
          if (s == "(" || s == "[" || s == "{") ++depth;
          if (s == ")" || s == "]" || s == "}") --depth;
          if (depth == 0 && s == ";") classic = true;
        }
        Node n{classic ? NodeKind::For : NodeKind::ForEach, header, {}};
        statement(n.children);
        out.push_back(std::move(n));
        return;
      }
      if (w == "while") {
        ++p_;
        Node n{NodeKind::While, paren_text(), {}};
        statement(n.children);
        out.push_back(std::move(n));
        return;
      }
      if (w == "do") {
        ++p_;
        Node n{NodeKind::Do, "", {}};
        statement(n.children);
        expect("while");
        n.value = paren_text();
        expect(";");
        out.push_back(std::move(n));
        return;
      }
      if (w == "switch") {
        ++p_;
        out.push_back(switch_block(paren_text()));
        accept(";");
        return;
      }
      if (w == "try") {
        ++p_;
        Node n{NodeKind::Try, at("(") ? paren_text() : "", {}};
        block_into(n.children);
        while (accept("catch")) {
          Node c{NodeKind::Catch, paren_text(), {}};
          block_into(c.children);
          n.children.push_back(std::move(c));
        }
        if (accept("finally")) {
          Node f{NodeKind::Finally, "", {}};
          block_into(f.children);
          n.children.push_back(std::move(f));
        }
        out.push_back(std::move(n));
        return;
      }
      if (w == "synchronized" && peek(1).text == "(") {
        ++p_;
        Node n{NodeKind::Synchronized, paren_text(), {}};
        block_into(n.children);
        out.push_back(std::move(n));
        return;
      }
      const NodeKind simple = w == "return"     ? NodeKind::Return
                              : w == "throw"    ? NodeKind::Throw
                              : w == "break"    ? NodeKind::Break
                              : w == "continue" ? NodeKind::Continue
                              : w == "assert"   ? NodeKind::Assert
                                                : NodeKind::Statement;
      if (simple != NodeKind::Statement) {
        out.push_back({simple, until_semicolon(), {}});
        return;
      }
      if (w == "else") fail("'else' without 'if'");
      if (w == "case" || (w == "default" && (peek(1).text == ":" || peek(1).text == "->")))
        fail("case label outside switch");
    }
    if (local_type_here()) {
      const std::size_t start = p_;
      auto mods = modifiers();
      auto td = type_decl(std::move(mods), start);
      out.push_back({NodeKind::LocalType, td.kind + " " + td.name, {}});
      return;
    }
    if (tok.kind == TokenKind::Identifier && peek(1).text == ":" && peek(1).kind == TokenKind::Operator) {
      Node n{NodeKind::Labeled, t_[p_].text, {}};
      p_ += 2;
      statement(n.children);
      out.push_back(std::move(n));
      return;
    }
    if (tok.kind == TokenKind::Identifier && w == "yield") {
      const auto& next = peek(1).text;
      if (next != "=" && next != "." && next != "[" && next != "++" && next != "--" && next != "(" &&
          next != "+=" && next != "-=") {
        out.push_back({NodeKind::Yield, until_semicolon(), {}});
        return;
      }
    }
    out.push_back({NodeKind::Statement, until_semicolon(), {}});
  }

  Node switch_block(std::string selector) {
    Node sw{NodeKind::Switch, std::move(selector), {}};
    expect("{");
    while (!at("}")) {
      if (end()) fail("unterminated switch");
      if (!(at("case") || at("default"))) fail("expected a case label");
      const std::size_t from = p_;
      int depth = 0;
      while (true) {
        if (end()) fail("unterminated case label");
        const auto& s = peek().text;
        if (s == "(" || s == "[" || s == "{") ++depth;
        if (s == ")" || s == "]" || s == "}") --depth;
        if (depth == 0 && (s == ":" || s == "->") && p_ > from) break;
        ++p_;
      }
      Node c{NodeKind::Case, join(t_, from, p_), {}};
      if (accept("->")) {
        if (at("{"))
          block_into(c.children);
        else if (at("throw"))
          statement(c.children);
        else
          c.children.push_back({NodeKind::Statement, until_semicolon(), {}});
      } else {
        expect(":");
        while (!at("}") && !at("case") && !(at("default") && (peek(1).text == ":" || peek(1).text == "->"))) {
          if (end()) fail("unterminated switch");
          statement(c.children);
        }
      }
      sw.children.push_back(std::move(c));
    }
    ++p_;
    return sw;
  }

  void assign_comments(CompilationUnit& cu) {
    for (std::size_t i = 0; i < lx_.comments.size(); ++i) {
      if (used_doc_[i]) continue;
      const auto& c = lx_.comments[i];
      const std::size_t at = c.next_token;
      std::vector<std::string>* target = &cu.comments;
      std::function<void(TypeDecl&)> visit = [&](TypeDecl& td) {
        if (!(td.body_open < at && at <= td.body_close)) return;
        target = &td.comments;
        for (auto& m : td.methods)
          if (m.body && m.body_open < at && at <= m.body_close) target = &m.comments;
        for (auto& inner : td.types) visit(inner);
      };
      for (auto& td : cu.types) visit(td);
      target->push_back(c.text);
    }
  }
};

}  // namespace

CompilationUnit parse(std::string_view source) {
  const Lexed lx = lex(source);
  return Parser(lx).unit();
}

}  // namespace maintminer::java
