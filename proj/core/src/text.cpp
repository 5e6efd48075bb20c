#include "ibq/text.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace ibq {

BadSyntax::BadSyntax(int l, int c, std::string exp)
    : std::runtime_error("line " + std::to_string(l) + ", column " + std::to_string(c) + ": expected " + exp),
      line(l),
      column(c),
      expected(std::move(exp)) {}

namespace {

enum class Tok { Ident, Number, LParen, RParen, Comma, Dot, Semi, Eq, Neq, Dash, End };

struct Token {
  Tok kind;
  std::string text;
  int line, col;
};

const std::set<std::string>& keywords() {
  static const std::set<std::string> k = {"top", "bot", "not", "and", "or",  "some",  "all",     "min",
                                          "max", "inv", "sub", "equiv", "rsub", "logic", "nominal"};
  return k;
}

std::vector<Token> lex(std::string_view s) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (s[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < s.size()) {
    char c = s[i];
    if (c == '#') {
      while (i < s.size() && s[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    int l = line, cl = col;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_')) ++j;
      out.push_back({Tok::Ident, std::string(s.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) ++j;
      out.push_back({Tok::Number, std::string(s.substr(i, j - i)), l, cl});
      advance(j - i);
      continue;
    }
    if (c == '!' && i + 1 < s.size() && s[i + 1] == '=') {
      out.push_back({Tok::Neq, "!=", l, cl});
      advance(2);
      continue;
    }
    Tok k;
    switch (c) {
      case '(': k = Tok::LParen; break;
      case ')': k = Tok::RParen; break;
      case ',': k = Tok::Comma; break;
      case '.': k = Tok::Dot; break;
      case ';': k = Tok::Semi; break;
      case '=': k = Tok::Eq; break;
      case '-': k = Tok::Dash; break;
      default:
        throw BadSyntax(l, cl, "a token (found '" + std::string(1, c) + "')");
    }
    out.push_back({k, std::string(1, c), l, cl});
    advance(1);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

enum class Space { Concept, Role, Individual };

const char* space_name(Space s) {
  switch (s) {
    case Space::Concept: return "concept";
    case Space::Role: return "role";
    default: return "individual";
  }
}

class Parser {
 public:
  explicit Parser(std::string_view text) : toks_(lex(text)) {}

  KnowledgeBase kb() {
    KnowledgeBase out;
    while (peek().kind != Tok::End) statement(out);
    if (!out.nominals.empty()) mark_nominals(out);
    if (!out.logic_declared) out.logic = infer_profile(out);
    return out;
  }

  Concept concept_only() {
    auto c = parse_concept_expr();
    expect_end();
    return c;
  }

  Role role_only() {
    auto r = role();
    expect_end();
    return r;
  }

  Assertion assertion_only() {
    auto a = assertion_stmt();
    expect_end();
    return a;
  }

  Abox abox_only() {
    Abox out;
    if (peek().kind == Tok::End) return out;
    out.push_back(assertion_stmt());
    while (peek().kind == Tok::Semi) {
      next();
      if (peek().kind == Tok::End) break;
      out.push_back(assertion_stmt());
    }
    expect_end();
    return out;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] void fail(const std::string& expected) const {
    throw BadSyntax(peek().line, peek().col, expected);
  }

  bool is_kw(const Token& t, const char* kw) const { return t.kind == Tok::Ident && t.text == kw; }

  void expect(Tok k, const char* what) {
    if (peek().kind != k) fail(what);
    next();
  }

  void expect_end() {
    if (peek().kind != Tok::End) fail("end of input");
  }

  std::string name(Space space) {
    const Token& t = peek();
    if (t.kind != Tok::Ident || keywords().count(t.text)) fail(std::string(space_name(space)) + " name");
    auto [it, fresh] = spaces_.emplace(t.text, space);
    if (!fresh && it->second != space)
      fail(std::string(space_name(space)) + " name ('" + t.text + "' is already used as " +
           space_name(it->second) + ")");
    next();
    return t.text;
  }

  Role role() {
    bool inv = false;
    if (is_kw(peek(), "inv")) {
      next();
      inv = true;
    }
    return Role{name(Space::Role), inv};
  }

  unsigned number() {
    if (peek().kind != Tok::Number) fail("a number");
    auto v = static_cast<unsigned>(std::stoul(next().text));
    return v;
  }

  Concept parse_concept_expr() {
    const Token& t = peek();
    if (t.kind == Tok::LParen) {
      next();
      Concept acc = parse_concept_expr();
      if (peek().kind == Tok::RParen) {
        next();
        return acc;
      }
      std::string op;
      if (is_kw(peek(), "and")) op = "and";
      else if (is_kw(peek(), "or")) op = "or";
      else fail("'and', 'or' or ')'");
      while (is_kw(peek(), op.c_str())) {
        next();
        Concept rhs = parse_concept_expr();
        acc = op == "and" ? Concept::conj(acc, rhs) : Concept::disj(acc, rhs);
      }
      expect(Tok::RParen, "')'");
      return acc;
    }
    if (t.kind != Tok::Ident) fail("a concept");
    if (t.text == "top") return next(), Concept::top();
    if (t.text == "bot") return next(), Concept::bottom();
    if (t.text == "not") {
      next();
      return Concept::negation(parse_concept_expr());
    }
    if (t.text == "some" || t.text == "all") {
      bool some = t.text == "some";
      next();
      Role r = role();
      Concept c = parse_concept_expr();
      return some ? Concept::exists(r, c) : Concept::forall(r, c);
    }
    if (t.text == "min" || t.text == "max") {
      bool min = t.text == "min";
      next();
      unsigned n = number();
      Role r = role();
      Concept c = parse_concept_expr();
      return min ? Concept::at_least(n, r, c) : Concept::at_most(n, r, c);
    }
    return Concept::atomic(name(Space::Concept));
  }

  std::pair<std::string, std::optional<std::string>> args() {
    expect(Tok::LParen, "'('");
    std::string a = name(Space::Individual);
    std::optional<std::string> b;
    if (peek().kind == Tok::Comma) {
      next();
      b = name(Space::Individual);
    }
    expect(Tok::RParen, "')'");
    return {a, b};
  }

  // Role-shaped assertion starting at the current token (after optional `not`).
  Assertion role_assertion(bool negated) {
    Role r = role();
    auto [a, b] = args();
    if (!b) fail("',' and a second individual");
    if (negated) return NegRoleAssertion{r, a, *b};
    return RoleAssertion{r, a, *b};
  }

  bool looks_like_role_assertion(std::size_t k) const {
    // NAME ( ident ,
    return peek(k).kind == Tok::Ident && peek(k + 1).kind == Tok::LParen && peek(k + 2).kind == Tok::Ident &&
           peek(k + 3).kind == Tok::Comma;
  }

  Assertion assertion_stmt() {
    if (peek().kind == Tok::Ident && (peek(1).kind == Tok::Eq || peek(1).kind == Tok::Neq)) {
      std::string a = name(Space::Individual);
      bool eq = next().kind == Tok::Eq;
      std::string b = name(Space::Individual);
      if (eq) return Equality{a, b};
      return Inequality{a, b};
    }
    if (is_kw(peek(), "inv")) return role_assertion(false);
    if (is_kw(peek(), "not") && is_kw(peek(1), "inv")) {
      next();
      return role_assertion(true);
    }
    if (is_kw(peek(), "not") && looks_like_role_assertion(1)) {
      next();
      return role_assertion(true);
    }
    if (looks_like_role_assertion(0)) return role_assertion(false);
    Concept c = parse_concept_expr();
    auto [a, b] = args();
    if (b) fail("')' (concept assertions take one individual)");
    return ConceptAssertion{c, a};
  }

  void statement(KnowledgeBase& kb) {
    const Token& t = peek();
    if (is_kw(t, "logic")) {
      if (kb.logic_declared) throw DuplicateDeclaration("logic declared twice (line " + std::to_string(t.line) + ")");
      next();
      std::string text;
      if (peek().kind != Tok::Ident) fail("a logic name");
      text = next().text;
      if (peek().kind == Tok::Dash) {
        next();
        if (peek().kind != Tok::Ident) fail("a logic name");
        text += "-" + next().text;
      }
      try {
        kb.logic = LogicProfile::parse(text);
      } catch (const std::invalid_argument&) {
        throw BadSyntax(t.line, t.col, "one of el, fl0, alc, alch, alci, alcq, alchi, alchq, alciq, alchiq, horn-alchiq");
      }
      kb.logic_declared = true;
      expect(Tok::Dot, "'.'");
      return;
    }
    if (is_kw(t, "nominal")) {
      next();
      std::string n = name(Space::Concept);
      if (std::find(kb.nominals.begin(), kb.nominals.end(), n) != kb.nominals.end())
        throw DuplicateDeclaration("nominal '" + n + "' declared twice");
      kb.nominals.push_back(n);
      expect(Tok::Dot, "'.'");
      return;
    }
    // R rsub S.
    std::size_t k = is_kw(t, "inv") ? 2 : 1;
    if (is_kw(peek(k), "rsub")) {
      Role a = role();
      next();
      Role b = role();
      expect(Tok::Dot, "'.'");
      kb.tbox.push_back(RoleInclusion{a, b});
      return;
    }
    bool assertion_start = (t.kind == Tok::Ident && (peek(1).kind == Tok::Eq || peek(1).kind == Tok::Neq)) ||
                           is_kw(t, "inv") || (is_kw(t, "not") && is_kw(peek(1), "inv")) ||
                           (is_kw(t, "not") && looks_like_role_assertion(1)) || looks_like_role_assertion(0);
    if (assertion_start) {
      kb.abox.push_back(assertion_stmt());
      expect(Tok::Dot, "'.'");
      return;
    }
    Concept c = parse_concept_expr();
    if (is_kw(peek(), "sub") || is_kw(peek(), "equiv")) {
      bool sub = next().text == "sub";
      Concept d = parse_concept_expr();
      expect(Tok::Dot, "'.'");
      if (sub) kb.tbox.push_back(ConceptInclusion{c, d});
      else kb.tbox.push_back(ConceptEquivalence{c, d});
      return;
    }
    if (peek().kind != Tok::LParen) fail("'sub', 'equiv' or '('");
    auto [a, b] = args();
    if (b) fail("')' (concept assertions take one individual)");
    expect(Tok::Dot, "'.'");
    kb.abox.push_back(ConceptAssertion{c, a});
  }

  static Concept flag(const Concept& c, const std::set<std::string>& noms) {
    using K = ConceptKind;
    switch (c.kind()) {
      case K::Atomic:
        return noms.count(c.name()) ? Concept::atomic(c.name(), true) : c;
      case K::Not:
        return Concept::negation(flag(c.sub(), noms));
      case K::And:
        return Concept::conj(flag(c.left(), noms), flag(c.right(), noms));
      case K::Or:
        return Concept::disj(flag(c.left(), noms), flag(c.right(), noms));
      case K::Exists:
        return Concept::exists(c.role(), flag(c.sub(), noms));
      case K::ForAll:
        return Concept::forall(c.role(), flag(c.sub(), noms));
      case K::AtLeast:
        return Concept::at_least(c.number(), c.role(), flag(c.sub(), noms));
      case K::AtMost:
        return Concept::at_most(c.number(), c.role(), flag(c.sub(), noms));
      default:
        return c;
    }
  }

  static void mark_nominals(KnowledgeBase& kb) {
    std::set<std::string> noms(kb.nominals.begin(), kb.nominals.end());
    for (auto& ax : kb.tbox) {
      if (auto* x = std::get_if<ConceptInclusion>(&ax)) {
        x->sub = flag(x->sub, noms);
        x->sup = flag(x->sup, noms);
      } else if (auto* x = std::get_if<ConceptEquivalence>(&ax)) {
        x->lhs = flag(x->lhs, noms);
        x->rhs = flag(x->rhs, noms);
      }
    }
    for (auto& as : kb.abox)
      if (auto* x = std::get_if<ConceptAssertion>(&as)) x->c = flag(x->c, noms);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, Space> spaces_;
};

}  // namespace

KnowledgeBase parse_kb(std::string_view text) { return Parser(text).kb(); }
Concept parse_concept(std::string_view text) { return Parser(text).concept_only(); }
Role parse_role(std::string_view text) { return Parser(text).role_only(); }
Assertion parse_assertion(std::string_view text) { return Parser(text).assertion_only(); }
Abox parse_abox(std::string_view text) { return Parser(text).abox_only(); }

Signature parse_signature(std::string_view text) {
  Signature sig;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string kind, nm, extra;
    if (!(ls >> kind)) continue;
    if (kind != "concept" && kind != "role") throw BadSyntax(lineno, 1, "'concept' or 'role'");
    if (!(ls >> nm) || !std::isalpha(static_cast<unsigned char>(nm[0])) ||
        !std::all_of(nm.begin(), nm.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }))
      throw BadSyntax(lineno, static_cast<int>(kind.size()) + 2, "a name");
    if (ls >> extra) throw BadSyntax(lineno, 1, "end of line");
    (kind == "concept" ? sig.concepts : sig.roles).insert(nm);
  }
  for (auto& c : sig.concepts)
    if (sig.roles.count(c)) throw BadSyntax(lineno, 1, "disjoint concept and role names ('" + c + "')");
  return sig;
}

// --- render --------------------------------------------------------------------

std::string render(const Role& r) { return r.inverted ? "inv " + r.base : r.base; }

std::string render(const Concept& c) {
  using K = ConceptKind;
  switch (c.kind()) {
    case K::Top: return "top";
    case K::Bottom: return "bot";
    case K::Atomic: return c.name();
    case K::Not: return "not " + render(c.sub());
    case K::And: return "(" + render(c.left()) + " and " + render(c.right()) + ")";
    case K::Or: return "(" + render(c.left()) + " or " + render(c.right()) + ")";
    case K::Exists: return "some " + render(c.role()) + " " + render(c.sub());
    case K::ForAll: return "all " + render(c.role()) + " " + render(c.sub());
    case K::AtLeast:
      return "min " + std::to_string(c.number()) + " " + render(c.role()) + " " + render(c.sub());
    case K::AtMost:
      return "max " + std::to_string(c.number()) + " " + render(c.role()) + " " + render(c.sub());
  }
  return "";
}

std::string render(const TBoxAxiom& a) {
  if (auto* x = std::get_if<ConceptInclusion>(&a)) return render(x->sub) + " sub " + render(x->sup);
  if (auto* x = std::get_if<ConceptEquivalence>(&a)) return render(x->lhs) + " equiv " + render(x->rhs);
  auto& r = std::get<RoleInclusion>(a);
  return render(r.sub) + " rsub " + render(r.sup);
}

std::string render(const Assertion& a) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConceptAssertion>) {
          return render(x.c) + "(" + x.ind + ")";
        } else if constexpr (std::is_same_v<T, RoleAssertion>) {
          return render(x.role) + "(" + x.from + "," + x.to + ")";
        } else if constexpr (std::is_same_v<T, NegRoleAssertion>) {
          return "not " + render(x.role) + "(" + x.from + "," + x.to + ")";
        } else if constexpr (std::is_same_v<T, Equality>) {
          return x.a + " = " + x.b;
        } else {
          return x.a + " != " + x.b;
        }
      },
      a);
}

std::string render(const KnowledgeBase& kb) {
  std::string out;
  if (kb.logic_declared) out += "logic " + kb.logic.name() + ".\n";
  for (auto& n : kb.nominals) out += "nominal " + n + ".\n";
  for (auto& ax : kb.tbox) out += render(ax) + ".\n";
  for (auto& as : kb.abox) out += render(as) + ".\n";
  return out;
}

std::string render(const Signature& s) {
  std::string out;
  for (auto& c : s.concepts) out += "concept " + c + "\n";
  for (auto& r : s.roles) out += "role " + r + "\n";
  return out;
}

std::string render_canonical(const Abox& a, std::string_view sep) {
  std::vector<std::pair<std::size_t, std::string>> items;
  items.reserve(a.size());
  for (auto& as : a) items.emplace_back(as.index(), render(as));
  std::sort(items.begin(), items.end());
  items.erase(std::unique(items.begin(), items.end()), items.end());
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i].second;
  }
  return out;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace ibq
