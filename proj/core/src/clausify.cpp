#include <algorithm>
#include <deque>
#include <functional>
#include <set>

#include "ibq/rules.hpp"
#include "ibq/text.hpp"

namespace ibq {

namespace {

void flatten(const Concept& c, ConceptKind k, std::vector<Concept>& out) {
  if (c.kind() == k) {
    flatten(c.left(), k, out);
    flatten(c.right(), k, out);
  } else {
    out.push_back(c);
  }
}

std::vector<Concept> conjuncts(const Concept& c) {
  std::vector<Concept> out;
  flatten(c, ConceptKind::And, out);
  return out;
}

std::vector<Concept> disjuncts(const Concept& c) {
  std::vector<Concept> out;
  flatten(c, ConceptKind::Or, out);
  return out;
}

RoleAtom ar(const Role& r, Var s, Var t) {
  if (r.inverted) return RoleAtom{r.base, t, s};
  return RoleAtom{r.base, s, t};
}

class Clausifier {
 public:
  explicit Clausifier(const ClausifyOptions& opt) : opt_(opt) {}

  void inclusion(const Concept& sub, const Concept& sup) {
    top(Concept::disj(nnf_negated(sub), nnf(sup)));
    drain();
  }

  void role_inclusion(const Role& sub, const Role& sup) {
    if (sub == sup) return;
    HTRule r;
    r.body.push_back(ar(sub, kCenter, 1));
    r.head.push_back(ar(sup, kCenter, 1));
    emit(std::move(r));
  }

  // Returns the literal that replaces C in a concept assertion.
  std::optional<Assertion> assertion(const Concept& c, const std::string& ind) {
    Concept n = nnf(c);
    // ⊤(a) is kept: it carries no constraint but keeps `a` in the domain.
    if (n.kind() == ConceptKind::Top || n.is_literal()) return ConceptAssertion{n, ind};
    auto q = pos_name(n);
    drain();
    return ConceptAssertion{Concept::atomic(q), ind};
  }

  Clausified result() && {
    Clausified out;
    out.rules = std::move(rules_);
    out.fresh = std::move(fresh_);
    return out;
  }

 private:
  void top(const Concept& e) {
    for (auto& c : conjuncts(e)) disjunction(disjuncts(c), std::nullopt);
  }

  // Builds one rule from a flat disjunction ⊤ ⊑ d1 ⊔ ... ⊔ dn (⊔ extra(x)).
  void disjunction(const std::vector<Concept>& ds, const std::optional<std::string>& extra) {
    using K = ConceptKind;
    HTRule r;
    Var next_y = 1;
    auto head_atom = [&](RuleAtom a) { r.head.push_back(std::move(a)); };
    auto body_atom = [&](RuleAtom a) { r.body.push_back(std::move(a)); };
    for (auto& d : ds) {
      switch (d.kind()) {
        case K::Top:
          return;
        case K::Bottom:
          break;
        case K::Atomic:
          head_atom(ConceptAtom{RuleConcept::atomic(d.name()), kCenter});
          break;
        case K::Not:
          body_atom(ConceptAtom{RuleConcept::atomic(d.sub().name()), kCenter});
          break;
        case K::And:
          head_atom(ConceptAtom{RuleConcept::atomic(pos_name(d)), kCenter});
          break;
        case K::AtLeast: {
          const Concept& f = d.sub();
          if (f.kind() == K::Bottom) break;
          Filler fill;
          if (f.kind() == K::Top) fill = {FillerKind::Top, ""};
          else if (f.kind() == K::Atomic) fill = {FillerKind::Atomic, f.name()};
          else if (f.kind() == K::Not) fill = {FillerKind::Negated, f.sub().name()};
          else fill = {FillerKind::Atomic, pos_name(f)};
          head_atom(ConceptAtom{RuleConcept::at_least(d.number(), d.role(), fill), kCenter});
          break;
        }
        case K::AtMost: {
          const Concept& f = d.sub();
          if (f.kind() == K::Bottom) return;  // ≤n R.⊥ is ⊤
          unsigned count = d.number() + 1;
          std::vector<Var> ys;
          for (unsigned k = 0; k < count; ++k) ys.push_back(next_y++);
          // Complex fillers: conjunctive/existential ones are named from
          // below (C ⊑ Q, used in the body); the rest via their negation.
          std::optional<std::string> below, above;
          if (!f.is_literal() && f.kind() != K::Top) {
            if (f.kind() == K::And || f.kind() == K::AtLeast) below = neg_name(f);
            else above = pos_name(nnf_negated(f));
          }
          for (Var y : ys) {
            body_atom(ar(d.role(), kCenter, y));
            if (f.kind() == K::Atomic) body_atom(ConceptAtom{RuleConcept::atomic(f.name()), y});
            else if (f.kind() == K::Not) head_atom(ConceptAtom{RuleConcept::atomic(f.sub().name()), y});
            else if (below) body_atom(ConceptAtom{RuleConcept::atomic(*below), y});
            else if (above) head_atom(ConceptAtom{RuleConcept::atomic(*above), y});
          }
          for (std::size_t i = 0; i < ys.size(); ++i)
            for (std::size_t j = i + 1; j < ys.size(); ++j) head_atom(EqAtom{ys[i], ys[j]});
          break;
        }
        default:
          throw UnsupportedConstruct("unexpected concept in normal form: " + render(d));
      }
    }
    if (extra) r.head.push_back(ConceptAtom{RuleConcept::atomic(*extra), kCenter});
    emit(std::move(r));
  }

  void emit(HTRule r) {
    auto dedup = [](std::vector<RuleAtom>& v) {
      std::vector<RuleAtom> out;
      for (auto& a : v)
        if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
      v = std::move(out);
    };
    dedup(r.body);
    dedup(r.head);
    for (auto& h : r.head)
      if (std::find(r.body.begin(), r.body.end(), h) != r.body.end()) return;  // tautology
    if (std::find(rules_.begin(), rules_.end(), r) != rules_.end()) return;
    rules_.push_back(std::move(r));
  }

  std::string fresh(const Concept& source) {
    std::string n = opt_.fresh_prefix + std::to_string(++counter_);
    fresh_.emplace(n, source);
    return n;
  }

  // Q with Q ⊑ c.
  std::string pos_name(const Concept& c) {
    auto it = pos_.find(c);
    if (it != pos_.end()) return it->second;
    auto q = fresh(c);
    pos_.emplace(c, q);
    pending_.push_back([this, c, q] {
      for (auto& conj : conjuncts(c)) {
        auto ds = disjuncts(conj);
        ds.insert(ds.begin(), Concept::negation(Concept::atomic(q)));
        disjunction(ds, std::nullopt);
      }
    });
    return q;
  }

  // Q with c ⊑ Q.
  std::string neg_name(const Concept& c) {
    auto it = neg_.find(c);
    if (it != neg_.end()) return it->second;
    auto q = fresh(c);
    neg_.emplace(c, q);
    pending_.push_back([this, c, q] {
      for (auto& conj : conjuncts(nnf_negated(c))) disjunction(disjuncts(conj), q);
    });
    return q;
  }

  void drain() {
    while (!pending_.empty()) {
      auto job = std::move(pending_.front());
      pending_.pop_front();
      job();
    }
  }

  ClausifyOptions opt_;
  RuleSet rules_;
  std::map<std::string, Concept> fresh_;
  std::map<Concept, std::string> pos_, neg_;
  std::deque<std::function<void()>> pending_;
  int counter_ = 0;
};

void reject_nominals(const KnowledgeBase& kb) {
  if (!kb.nominals.empty() || kb.logic.O)
    throw UnsupportedConstruct("nominals are not supported by the reasoning engines");
}

}  // namespace

Abox normalize_abox(const Abox& a) {
  Abox out;
  for (auto& as : eliminate_equalities(a)) {
    if (auto* r = std::get_if<RoleAssertion>(&as)) {
      if (r->role.inverted) out.push_back(RoleAssertion{Role{r->role.base, false}, r->to, r->from});
      else out.push_back(as);
    } else if (auto* r = std::get_if<NegRoleAssertion>(&as)) {
      if (r->role.inverted) out.push_back(NegRoleAssertion{Role{r->role.base, false}, r->to, r->from});
      else out.push_back(as);
    } else {
      out.push_back(as);
    }
  }
  return out;
}

Clausified clausify_alchiq(const KnowledgeBase& kb, const ClausifyOptions& opt) {
  reject_nominals(kb);
  Clausifier c(opt);
  for (auto& ax : kb.tbox) {
    if (auto* x = std::get_if<ConceptInclusion>(&ax)) {
      c.inclusion(x->sub, x->sup);
    } else if (auto* x = std::get_if<ConceptEquivalence>(&ax)) {
      c.inclusion(x->lhs, x->rhs);
      c.inclusion(x->rhs, x->lhs);
    } else {
      auto& r = std::get<RoleInclusion>(ax);
      c.role_inclusion(r.sub, r.sup);
    }
  }
  Abox abox;
  for (auto& as : normalize_abox(kb.abox)) {
    if (auto* x = std::get_if<ConceptAssertion>(&as)) {
      if (auto lit = c.assertion(x->c, x->ind)) abox.push_back(*lit);
    } else {
      abox.push_back(as);
    }
  }
  Clausified out = std::move(c).result();
  out.abox = std::move(abox);
  return out;
}

Clausified clausify_el(const KnowledgeBase& kb, const ClausifyOptions& opt) {
  reject_nominals(kb);
  for (auto& as : kb.abox) {
    if (std::holds_alternative<NegRoleAssertion>(as) || std::holds_alternative<Inequality>(as))
      throw UnsupportedConstruct("EL ABoxes contain only concept and role assertions: " + render(as));
    if (auto* r = std::get_if<RoleAssertion>(&as); r && r->role.inverted)
      throw UnsupportedConstruct("inverse roles are outside EL: " + render(as));
  }
  for (auto& ax : kb.tbox)
    if (std::holds_alternative<RoleInclusion>(ax)) throw UnsupportedConstruct("role inclusions are outside EL");
  Clausified out = clausify_alchiq(kb, opt);
  for (auto& r : out.rules)
    if (!is_el_rule(r)) throw UnsupportedConstruct("not an EL-rule: " + render(r));
  for (auto& as : out.abox)
    if (auto* x = std::get_if<ConceptAssertion>(&as); x && x->c.kind() == ConceptKind::Not)
      throw UnsupportedConstruct("negated assertion outside EL: " + render(as));
  return out;
}

Var max_branch_var(const HTRule& r) {
  Var m = 0;
  auto scan = [&](const std::vector<RuleAtom>& atoms) {
    for (auto& a : atoms) {
      if (auto* c = std::get_if<ConceptAtom>(&a)) m = std::max(m, c->var);
      if (auto* x = std::get_if<RoleAtom>(&a)) m = std::max({m, x->from, x->to});
      if (auto* e = std::get_if<EqAtom>(&a)) m = std::max({m, e->a, e->b});
    }
  };
  scan(r.body);
  scan(r.head);
  return m;
}

std::optional<std::string> validate_ht_shape(const HTRule& r) {
  std::set<Var> guarded;
  for (auto& a : r.body) {
    if (auto* c = std::get_if<ConceptAtom>(&a)) {
      if (c->c.kind != RuleConcept::Kind::Atomic) return "body concept atom is not a positive atomic concept";
    } else if (auto* x = std::get_if<RoleAtom>(&a)) {
      bool ok = (x->from == kCenter && x->to > 0) || (x->to == kCenter && x->from > 0);
      if (!ok) return "body role atom does not connect x with a branch variable";
      guarded.insert(x->from == kCenter ? x->to : x->from);
    } else {
      return "equality atom in the body";
    }
  }
  auto check_var = [&](Var v) -> bool { return v == kCenter || guarded.count(v) > 0; };
  for (auto& a : r.body) {
    if (auto* c = std::get_if<ConceptAtom>(&a); c && !check_var(c->var))
      return "branch variable y" + std::to_string(c->var) + " does not occur in a body role atom";
  }
  for (auto& a : r.head) {
    if (auto* c = std::get_if<ConceptAtom>(&a)) {
      if (!check_var(c->var))
        return "branch variable y" + std::to_string(c->var) + " does not occur in a body role atom";
      if (c->var == kCenter) {
        if (c->c.kind == RuleConcept::Kind::Negated) return "negated concept in the head";
        if (c->c.kind == RuleConcept::Kind::AtLeast && c->c.n == 0) return "cardinality 0 in the head";
      } else if (c->c.kind != RuleConcept::Kind::Atomic) {
        return "head atom at a branch variable is not atomic";
      }
    } else if (auto* x = std::get_if<RoleAtom>(&a)) {
      bool ok = (x->from == kCenter && x->to > 0) || (x->to == kCenter && x->from > 0);
      if (!ok) return "head role atom does not connect x with a branch variable";
      if (!check_var(x->from) || !check_var(x->to)) return "head role atom uses an unguarded variable";
    } else {
      auto& e = std::get<EqAtom>(a);
      if (e.a == kCenter || e.b == kCenter) return "equality atom involving x";
      if (!check_var(e.a) || !check_var(e.b)) return "equality atom uses an unguarded variable";
    }
  }
  return std::nullopt;
}

bool is_el_rule(const HTRule& r) {
  if (validate_ht_shape(r)) return false;
  for (auto& a : r.body) {
    if (auto* x = std::get_if<RoleAtom>(&a); x && x->from != kCenter) return false;
  }
  if (r.head.size() > 1) return false;
  if (r.head.empty()) return true;
  auto* c = std::get_if<ConceptAtom>(&r.head[0]);
  if (!c || c->var != kCenter) return false;
  if (c->c.kind == RuleConcept::Kind::Atomic) return true;
  return c->c.kind == RuleConcept::Kind::AtLeast && c->c.n == 1 && !c->c.role.inverted &&
         c->c.filler.kind != FillerKind::Negated;
}

bool is_horn(const RuleSet& rs) {
  return std::all_of(rs.begin(), rs.end(), [](const HTRule& r) { return r.head.size() <= 1; });
}

FeatureProfile feature_profile(const RuleSet& rs) {
  FeatureProfile f;
  for (auto& r : rs) {
    for (auto& a : r.body)
      if (auto* x = std::get_if<RoleAtom>(&a); x && x->from != kCenter) f.has_inverse_positions = true;
    for (auto& a : r.head) {
      if (std::holds_alternative<EqAtom>(a)) f.has_eq_heads = true;
      if (auto* x = std::get_if<RoleAtom>(&a)) {
        f.has_role_heads = true;
        if (x->from != kCenter) f.has_inverse_positions = true;
      }
      if (auto* c = std::get_if<ConceptAtom>(&a);
          c && c->c.kind == RuleConcept::Kind::AtLeast && c->c.role.inverted)
        f.has_inverse_positions = true;
    }
  }
  return f;
}

Signature signature_of(const HTRule& r) {
  Signature s;
  auto scan = [&](const std::vector<RuleAtom>& atoms) {
    for (auto& a : atoms) {
      if (auto* c = std::get_if<ConceptAtom>(&a)) {
        if (c->c.kind == RuleConcept::Kind::AtLeast) {
          s.roles.insert(c->c.role.base);
          if (c->c.filler.kind != FillerKind::Top) s.concepts.insert(c->c.filler.name);
        } else {
          s.concepts.insert(c->c.name);
        }
      } else if (auto* x = std::get_if<RoleAtom>(&a)) {
        s.roles.insert(x->role);
      }
    }
  };
  scan(r.body);
  scan(r.head);
  return s;
}

Signature signature_of(const RuleSet& rs) {
  Signature s;
  for (auto& r : rs) s |= signature_of(r);
  return s;
}

std::string render(const RuleConcept& c) {
  switch (c.kind) {
    case RuleConcept::Kind::Atomic:
      return c.name;
    case RuleConcept::Kind::Negated:
      return "not " + c.name;
    default: {
      std::string f = c.filler.kind == FillerKind::Top ? "top"
                      : c.filler.kind == FillerKind::Negated ? "not " + c.filler.name
                                                             : c.filler.name;
      std::string head = c.n == 1 ? "some " : "min " + std::to_string(c.n) + " ";
      std::string fill = c.filler.kind == FillerKind::Negated ? "(" + f + ")" : f;
      return "(" + head + render(c.role) + " " + fill + ")";
    }
  }
}

static std::string var_name(Var v, Var branch_count) {
  if (v == kCenter) return "x";
  if (branch_count == 1) return "y";
  return "y" + std::to_string(v);
}

std::string render(const RuleAtom& a, Var branch_count) {
  if (auto* c = std::get_if<ConceptAtom>(&a)) return render(c->c) + "(" + var_name(c->var, branch_count) + ")";
  if (auto* x = std::get_if<RoleAtom>(&a))
    return x->role + "(" + var_name(x->from, branch_count) + "," + var_name(x->to, branch_count) + ")";
  auto& e = std::get<EqAtom>(a);
  return var_name(e.a, branch_count) + " = " + var_name(e.b, branch_count);
}

std::string render(const HTRule& r) {
  Var k = max_branch_var(r);
  std::string out;
  if (r.body.empty()) out = "TRUE";
  for (std::size_t i = 0; i < r.body.size(); ++i) out += (i ? ", " : "") + render(r.body[i], k);
  out += " -> ";
  if (r.head.empty()) out += "FALSE";
  for (std::size_t i = 0; i < r.head.size(); ++i) out += (i ? " | " : "") + render(r.head[i], k);
  return out;
}

std::string render(const RuleSet& rs) {
  std::string out;
  for (auto& r : rs) out += render(r) + "\n";
  return out;
}

}  // namespace ibq
