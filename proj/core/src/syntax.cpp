#include "ibq/syntax.hpp"

#include <algorithm>
#include <map>
#include <numeric>

namespace ibq {

namespace {

template <class T>
int cmp3(const T& a, const T& b) {
  return a < b ? -1 : (b < a ? 1 : 0);
}

int compare_role(const Role& a, const Role& b) {
  if (int c = cmp3(a.base, b.base)) return c;
  return cmp3(a.inverted, b.inverted);
}

}  // namespace

Concept::Concept() : Concept(top()) {}

Concept Concept::top() {
  static const auto node = std::make_shared<const Node>();
  return Concept(node);
}

Concept Concept::bottom() {
  auto n = std::make_shared<Node>();
  n->kind = ConceptKind::Bottom;
  return Concept(n);
}

Concept Concept::atomic(std::string name, bool nominal) {
  auto n = std::make_shared<Node>();
  n->kind = ConceptKind::Atomic;
  n->name = std::move(name);
  n->nominal = nominal;
  return Concept(n);
}

Concept Concept::negation(Concept c) {
  auto n = std::make_shared<Node>();
  n->kind = ConceptKind::Not;
  n->lhs = std::make_shared<const Concept>(std::move(c));
  return Concept(n);
}

Concept Concept::conj(Concept a, Concept b) {
  auto n = std::make_shared<Node>();
  n->kind = ConceptKind::And;
  n->lhs = std::make_shared<const Concept>(std::move(a));
  n->rhs = std::make_shared<const Concept>(std::move(b));
  return Concept(n);
}

Concept Concept::disj(Concept a, Concept b) {
  auto n = std::make_shared<Node>();
  n->kind = ConceptKind::Or;
  n->lhs = std::make_shared<const Concept>(std::move(a));
  n->rhs = std::make_shared<const Concept>(std::move(b));
  return Concept(n);
}

Concept Concept::quantified(ConceptKind k, unsigned num, Role r, Concept c) {
  auto n = std::make_shared<Node>();
  n->kind = k;
  n->n = num;
  n->role = std::move(r);
  n->lhs = std::make_shared<const Concept>(std::move(c));
  return Concept(n);
}

Concept Concept::exists(Role r, Concept c) { return quantified(ConceptKind::Exists, 1, std::move(r), std::move(c)); }
Concept Concept::forall(Role r, Concept c) { return quantified(ConceptKind::ForAll, 0, std::move(r), std::move(c)); }
Concept Concept::at_least(unsigned k, Role r, Concept c) {
  return quantified(ConceptKind::AtLeast, k, std::move(r), std::move(c));
}
Concept Concept::at_most(unsigned k, Role r, Concept c) {
  return quantified(ConceptKind::AtMost, k, std::move(r), std::move(c));
}

bool Concept::is_quantified() const {
  switch (kind()) {
    case ConceptKind::Exists:
    case ConceptKind::ForAll:
    case ConceptKind::AtLeast:
    case ConceptKind::AtMost:
      return true;
    default:
      return false;
  }
}

int compare(const Concept& a, const Concept& b) {
  if (a.node_ == b.node_) return 0;
  if (int c = cmp3(a.kind(), b.kind())) return c;
  switch (a.kind()) {
    case ConceptKind::Top:
    case ConceptKind::Bottom:
      return 0;
    case ConceptKind::Atomic:
      if (int c = cmp3(a.name(), b.name())) return c;
      return cmp3(a.is_nominal(), b.is_nominal());
    case ConceptKind::Not:
      return compare(a.sub(), b.sub());
    case ConceptKind::And:
    case ConceptKind::Or:
      if (int c = compare(a.left(), b.left())) return c;
      return compare(a.right(), b.right());
    default:
      if (int c = cmp3(a.number(), b.number())) return c;
      if (int c = compare_role(a.role(), b.role())) return c;
      return compare(a.sub(), b.sub());
  }
}

int compare(const TBoxAxiom& a, const TBoxAxiom& b) {
  if (int c = cmp3(a.index(), b.index())) return c;
  if (auto* x = std::get_if<ConceptInclusion>(&a)) {
    auto& y = std::get<ConceptInclusion>(b);
    if (int c = compare(x->sub, y.sub)) return c;
    return compare(x->sup, y.sup);
  }
  if (auto* x = std::get_if<ConceptEquivalence>(&a)) {
    auto& y = std::get<ConceptEquivalence>(b);
    if (int c = compare(x->lhs, y.lhs)) return c;
    return compare(x->rhs, y.rhs);
  }
  auto& x = std::get<RoleInclusion>(a);
  auto& y = std::get<RoleInclusion>(b);
  if (int c = compare_role(x.sub, y.sub)) return c;
  return compare_role(x.sup, y.sup);
}

int compare(const Assertion& a, const Assertion& b) {
  if (int c = cmp3(a.index(), b.index())) return c;
  return std::visit(
      [&](const auto& x) -> int {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b);
        if constexpr (std::is_same_v<T, ConceptAssertion>) {
          if (int c = compare(x.c, y.c)) return c;
          return cmp3(x.ind, y.ind);
        } else if constexpr (std::is_same_v<T, RoleAssertion> || std::is_same_v<T, NegRoleAssertion>) {
          if (int c = compare_role(x.role, y.role)) return c;
          if (int c = cmp3(x.from, y.from)) return c;
          return cmp3(x.to, y.to);
        } else {
          if (int c = cmp3(x.a, y.a)) return c;
          return cmp3(x.b, y.b);
        }
      },
      a);
}

std::vector<std::string> individuals_of(const Assertion& a) {
  return std::visit(
      [](const auto& x) -> std::vector<std::string> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConceptAssertion>) {
          return {x.ind};
        } else if constexpr (std::is_same_v<T, RoleAssertion> || std::is_same_v<T, NegRoleAssertion>) {
          return {x.from, x.to};
        } else {
          return {x.a, x.b};
        }
      },
      a);
}

std::vector<std::string> individuals_of(const Abox& a) {
  std::set<std::string> seen;
  for (auto& as : a)
    for (auto& i : individuals_of(as)) seen.insert(i);
  return {seen.begin(), seen.end()};
}

bool KnowledgeBase::operator==(const KnowledgeBase& other) const {
  auto eq_range = [](const auto& x, const auto& y) {
    return x.size() == y.size() && std::equal(x.begin(), x.end(), y.begin(),
                                              [](const auto& p, const auto& q) { return compare(p, q) == 0; });
  };
  return eq_range(tbox, other.tbox) && eq_range(abox, other.abox) && logic == other.logic &&
         logic_declared == other.logic_declared && nominals == other.nominals;
}

bool Signature::subset_of(const Signature& other) const {
  return std::includes(other.concepts.begin(), other.concepts.end(), concepts.begin(), concepts.end()) &&
         std::includes(other.roles.begin(), other.roles.end(), roles.begin(), roles.end());
}

Signature& Signature::operator|=(const Signature& other) {
  concepts.insert(other.concepts.begin(), other.concepts.end());
  roles.insert(other.roles.begin(), other.roles.end());
  return *this;
}

// --- LogicProfile -----------------------------------------------------------

LogicProfile LogicProfile::parse(const std::string& text) {
  LogicProfile p;
  if (text == "el") {
    p.el = p.horn = true;
    return p;
  }
  if (text == "fl0") {
    p.fl0 = true;
    return p;
  }
  std::string rest = text;
  if (rest.rfind("horn-", 0) == 0) {
    p.horn = true;
    rest = rest.substr(5);
  }
  if (rest.rfind("alc", 0) != 0) throw std::invalid_argument("unknown logic '" + text + "'");
  rest = rest.substr(3);
  // Letters must appear in the order h, o, i, q.
  const std::string order = "hoiq";
  std::size_t pos = 0;
  for (char ch : rest) {
    auto at = order.find(ch, pos);
    if (at == std::string::npos) throw std::invalid_argument("unknown logic '" + text + "'");
    pos = at + 1;
    if (ch == 'h') p.H = true;
    if (ch == 'o') p.O = true;
    if (ch == 'i') p.I = true;
    if (ch == 'q') p.Q = true;
  }
  return p;
}

std::string LogicProfile::name() const {
  if (el) return "el";
  if (fl0) return "fl0";
  std::string s = horn ? "horn-alc" : "alc";
  if (H) s += 'h';
  if (O) s += 'o';
  if (I) s += 'i';
  if (Q) s += 'q';
  return s;
}

bool LogicProfile::subsumed_by(const LogicProfile& o) const {
  if (O && !o.O) return false;
  if (I && !o.I) return false;
  if (H && !o.H) return false;
  if (Q && !o.Q) return false;
  if (o.el && !el) return false;
  if (o.fl0 && !fl0) return false;
  if (o.horn && !horn) return false;
  return true;
}

// --- desugar / nnf -------------------------------------------------------------

Concept desugar(const Concept& c) {
  using K = ConceptKind;
  switch (c.kind()) {
    case K::Top:
    case K::Atomic:
      return c;
    case K::Bottom:
      return Concept::negation(Concept::top());
    case K::Not:
      return Concept::negation(desugar(c.sub()));
    case K::And:
      return Concept::conj(desugar(c.left()), desugar(c.right()));
    case K::Or:
      return Concept::negation(
          Concept::conj(Concept::negation(desugar(c.left())), Concept::negation(desugar(c.right()))));
    case K::Exists:
      return Concept::at_least(1, c.role(), desugar(c.sub()));
    case K::ForAll:
      return Concept::negation(Concept::at_least(1, c.role(), Concept::negation(desugar(c.sub()))));
    case K::AtLeast:
      if (c.number() == 0) return Concept::top();
      return Concept::at_least(c.number(), c.role(), desugar(c.sub()));
    case K::AtMost:
      return Concept::negation(Concept::at_least(c.number() + 1, c.role(), desugar(c.sub())));
  }
  return c;
}

Concept nnf(const Concept& c) {
  using K = ConceptKind;
  switch (c.kind()) {
    case K::Top:
    case K::Bottom:
    case K::Atomic:
      return c;
    case K::Not:
      return nnf_negated(c.sub());
    case K::And:
      return Concept::conj(nnf(c.left()), nnf(c.right()));
    case K::Or:
      return Concept::disj(nnf(c.left()), nnf(c.right()));
    case K::Exists:
      return Concept::at_least(1, c.role(), nnf(c.sub()));
    case K::ForAll:
      return Concept::at_most(0, c.role(), nnf_negated(c.sub()));
    case K::AtLeast:
      if (c.number() == 0) return Concept::top();
      return Concept::at_least(c.number(), c.role(), nnf(c.sub()));
    case K::AtMost:
      return Concept::at_most(c.number(), c.role(), nnf(c.sub()));
  }
  return c;
}

Concept nnf_negated(const Concept& c) {
  using K = ConceptKind;
  switch (c.kind()) {
    case K::Top:
      return Concept::bottom();
    case K::Bottom:
      return Concept::top();
    case K::Atomic:
      return Concept::negation(c);
    case K::Not:
      return nnf(c.sub());
    case K::And:
      return Concept::disj(nnf_negated(c.left()), nnf_negated(c.right()));
    case K::Or:
      return Concept::conj(nnf_negated(c.left()), nnf_negated(c.right()));
    case K::Exists:
      return Concept::at_most(0, c.role(), nnf(c.sub()));
    case K::ForAll:
      return Concept::at_least(1, c.role(), nnf_negated(c.sub()));
    case K::AtLeast:
      if (c.number() == 0) return Concept::bottom();
      return Concept::at_most(c.number() - 1, c.role(), nnf(c.sub()));
    case K::AtMost:
      return Concept::at_least(c.number() + 1, c.role(), nnf(c.sub()));
  }
  return c;
}

// --- signatures ------------------------------------------------------------------

static void collect(const Concept& c, Signature& s) {
  using K = ConceptKind;
  switch (c.kind()) {
    case K::Top:
    case K::Bottom:
      return;
    case K::Atomic:
      s.concepts.insert(c.name());
      return;
    case K::Not:
      collect(c.sub(), s);
      return;
    case K::And:
    case K::Or:
      collect(c.left(), s);
      collect(c.right(), s);
      return;
    default:
      s.roles.insert(c.role().base);
      collect(c.sub(), s);
  }
}

Signature signature_of(const Concept& c) {
  Signature s;
  collect(c, s);
  return s;
}

Signature signature_of(const TBoxAxiom& a) {
  Signature s;
  if (auto* x = std::get_if<ConceptInclusion>(&a)) {
    collect(x->sub, s);
    collect(x->sup, s);
  } else if (auto* x = std::get_if<ConceptEquivalence>(&a)) {
    collect(x->lhs, s);
    collect(x->rhs, s);
  } else {
    auto& r = std::get<RoleInclusion>(a);
    s.roles.insert(r.sub.base);
    s.roles.insert(r.sup.base);
  }
  return s;
}

Signature signature_of(const Assertion& a) {
  Signature s;
  if (auto* x = std::get_if<ConceptAssertion>(&a)) collect(x->c, s);
  if (auto* x = std::get_if<RoleAssertion>(&a)) s.roles.insert(x->role.base);
  if (auto* x = std::get_if<NegRoleAssertion>(&a)) s.roles.insert(x->role.base);
  return s;
}

Signature signature_of(const Abox& a) {
  Signature s;
  for (auto& as : a) s |= signature_of(as);
  return s;
}

Signature signature_of(const KnowledgeBase& kb) {
  Signature s;
  for (auto& ax : kb.tbox) s |= signature_of(ax);
  s |= signature_of(kb.abox);
  for (auto& n : kb.nominals) s.concepts.insert(n);
  return s;
}

// --- components --------------------------------------------------------------

namespace {
struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a), b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};
}  // namespace

std::vector<Abox> connected_components(const Abox& a) {
  std::map<std::string, std::size_t> id;
  for (auto& as : a)
    for (auto& i : individuals_of(as)) id.emplace(i, id.size());
  UnionFind uf(id.size());
  for (auto& as : a) {
    auto inds = individuals_of(as);
    for (std::size_t k = 1; k < inds.size(); ++k) uf.unite(id[inds[0]], id[inds[k]]);
  }
  // Components ordered by first appearance of their root in the input.
  std::map<std::size_t, std::size_t> slot;
  std::vector<Abox> out;
  for (auto& as : a) {
    auto inds = individuals_of(as);
    auto root = uf.find(id[inds[0]]);
    auto [it, fresh] = slot.emplace(root, out.size());
    if (fresh) out.emplace_back();
    out[it->second].push_back(as);
  }
  return out;
}

bool is_connected(const Abox& a) { return connected_components(a).size() <= 1; }

// --- profile inference -------------------------------------------------------------

namespace {

struct Features {
  bool inverse = false, hierarchy = false, cardinality = false, nominal = false;
  bool el_only = true, fl0_only = true;
};

void scan(const Concept& c, Features& f) {
  using K = ConceptKind;
  switch (c.kind()) {
    case K::Top:
    case K::Bottom:
      return;
    case K::Atomic:
      if (c.is_nominal()) f.nominal = true;
      return;
    case K::Not:
      f.el_only = f.fl0_only = false;
      scan(c.sub(), f);
      return;
    case K::And:
      scan(c.left(), f);
      scan(c.right(), f);
      return;
    case K::Or:
      f.el_only = f.fl0_only = false;
      scan(c.left(), f);
      scan(c.right(), f);
      return;
    case K::Exists:
      f.fl0_only = false;
      break;
    case K::ForAll:
      f.el_only = false;
      break;
    case K::AtLeast:
      if (c.number() >= 2) f.cardinality = true;
      if (c.number() != 1) f.el_only = false;
      f.fl0_only = false;
      break;
    case K::AtMost:
      if (c.number() >= 1) f.cardinality = true;
      f.el_only = f.fl0_only = false;
      break;
  }
  if (c.role().inverted) {
    f.inverse = true;
    f.el_only = f.fl0_only = false;
  }
  scan(c.sub(), f);
}

void flatten_or(const Concept& c, std::vector<Concept>& out) {
  if (c.kind() == ConceptKind::Or) {
    flatten_or(c.left(), out);
    flatten_or(c.right(), out);
  } else {
    out.push_back(c);
  }
}

void flatten_and(const Concept& c, std::vector<Concept>& out) {
  if (c.kind() == ConceptKind::And) {
    flatten_and(c.left(), out);
    flatten_and(c.right(), out);
  } else {
    out.push_back(c);
  }
}

// Horn check mirroring the clausifier's structural transformation: a rule is
// Horn when every produced rule, including fresh-name definitions, has at most
// one head atom.
bool horn_top(const Concept& e);
bool horn_neg_def(const Concept& c);

bool horn_disjunction(const std::vector<Concept>& ds, int extra_heads) {
  using K = ConceptKind;
  int heads = extra_heads;
  for (auto& d : ds) {
    switch (d.kind()) {
      case K::Top:
        return true;  // tautology, no rule
      case K::Bottom:
      case K::Not:
        break;
      case K::Atomic:
        heads += 1;
        break;
      case K::And:
        heads += 1;
        if (!horn_top(d)) return false;
        break;
      case K::AtLeast: {
        heads += 1;
        auto& f = d.sub();
        if (!f.is_literal() && f.kind() != K::Top && !horn_top(f)) return false;
        break;
      }
      case K::AtMost: {
        if (d.number() == 0) {
          Concept g = nnf_negated(d.sub());
          if (g.kind() == K::Top) return true;
          if (g.kind() == K::Atomic) heads += 1;
          if (!g.is_literal() && g.kind() != K::Bottom) {
            heads += 1;
            if (!horn_top(g)) return false;
          }
        } else {
          int n = static_cast<int>(d.number());
          heads += n * (n + 1) / 2;
          auto& f = d.sub();
          if (f.kind() == K::Not) heads += n + 1;
          if (!f.is_literal() && f.kind() != K::Top && !horn_neg_def(f)) return false;
        }
        break;
      }
      default:
        heads += 1;
    }
  }
  return heads <= 1;
}

bool horn_top(const Concept& e) {
  std::vector<Concept> conjuncts;
  flatten_and(e, conjuncts);
  for (auto& c : conjuncts) {
    std::vector<Concept> ds;
    flatten_or(c, ds);
    if (!horn_disjunction(ds, 0)) return false;
  }
  return true;
}

// c ⊑ Q becomes ⊤ ⊑ nnf(¬c) ⊔ Q, distributed over top-level conjunctions.
bool horn_neg_def(const Concept& c) {
  std::vector<Concept> conjuncts;
  flatten_and(nnf_negated(c), conjuncts);
  for (auto& e : conjuncts) {
    std::vector<Concept> ds;
    flatten_or(e, ds);
    if (!horn_disjunction(ds, 1)) return false;
  }
  return true;
}

}  // namespace

LogicProfile infer_profile(const KnowledgeBase& kb) {
  Features f;
  bool horn = true;
  for (auto& ax : kb.tbox) {
    if (auto* x = std::get_if<ConceptInclusion>(&ax)) {
      scan(x->sub, f);
      scan(x->sup, f);
      horn = horn && horn_top(nnf(Concept::disj(Concept::negation(x->sub), x->sup)));
    } else if (auto* x = std::get_if<ConceptEquivalence>(&ax)) {
      scan(x->lhs, f);
      scan(x->rhs, f);
      horn = horn && horn_top(nnf(Concept::disj(Concept::negation(x->lhs), x->rhs))) &&
             horn_top(nnf(Concept::disj(Concept::negation(x->rhs), x->lhs)));
    } else {
      auto& r = std::get<RoleInclusion>(ax);
      f.hierarchy = true;
      f.el_only = f.fl0_only = false;
      if (r.sub.inverted != r.sup.inverted) f.inverse = true;
    }
  }
  for (auto& as : kb.abox) {
    if (auto* x = std::get_if<ConceptAssertion>(&as)) {
      scan(x->c, f);
      if (!x->c.is_literal()) horn = horn && horn_top(nnf(x->c));
    } else if (auto* x = std::get_if<RoleAssertion>(&as)) {
      if (x->role.inverted) f.el_only = f.fl0_only = false;
    } else if (std::holds_alternative<NegRoleAssertion>(as) || std::holds_alternative<Inequality>(as)) {
      f.el_only = f.fl0_only = false;
    }
  }
  if (!kb.nominals.empty()) f.nominal = true;
  LogicProfile p;
  p.O = f.nominal;
  p.I = f.inverse;
  p.H = f.hierarchy;
  p.Q = f.cardinality;
  bool plain = !p.O && !p.I && !p.H && !p.Q;
  p.el = plain && f.el_only;
  p.fl0 = plain && f.fl0_only && !p.el;
  p.horn = p.el || horn;
  return p;
}

Abox eliminate_equalities(const Abox& a) {
  std::map<std::string, std::string> parent;
  auto find = [&](std::string x) {
    while (parent.count(x) && parent[x] != x) x = parent[x];
    return x;
  };
  for (auto& as : a) {
    if (auto* e = std::get_if<Equality>(&as)) {
      auto x = find(e->a), y = find(e->b);
      if (x == y) continue;
      if (y < x) std::swap(x, y);
      parent[y] = x;
    }
  }
  Abox out;
  for (auto& as : a) {
    if (std::holds_alternative<Equality>(as)) {
      // Keep the individual alive even if the equality was its only mention.
      continue;
    }
    Assertion copy = as;
    std::visit(
        [&](auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, ConceptAssertion>) {
            x.ind = find(x.ind);
          } else if constexpr (std::is_same_v<T, RoleAssertion> || std::is_same_v<T, NegRoleAssertion>) {
            x.from = find(x.from);
            x.to = find(x.to);
          } else {
            x.a = find(x.a);
            x.b = find(x.b);
          }
        },
        copy);
    out.push_back(std::move(copy));
  }
  return out;
}

}  // namespace ibq
