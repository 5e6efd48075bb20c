#include "ibq/engine.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "ibq/text.hpp"

namespace ibq {

std::string to_string(IbqMode m) {
  switch (m) {
    case IbqMode::AlchiqOmegaA: return "alchiq-a";
    case IbqMode::HornOmegaE: return "horn-e";
    case IbqMode::ElOmegaE: return "el-e";
  }
  return "?";
}

IbqMode parse_mode(const std::string& s) {
  if (s == "alchiq-a") return IbqMode::AlchiqOmegaA;
  if (s == "horn-e") return IbqMode::HornOmegaE;
  if (s == "el-e") return IbqMode::ElOmegaE;
  throw std::invalid_argument("unknown mode '" + s + "' (expected alchiq-a, horn-e or el-e)");
}

IbqMode select_mode(const LogicProfile& visible, const LogicProfile& hidden, OracleType type, const Signature& gamma) {
  bool to_aent = can_adapt(type, OracleType::Aent, gamma, hidden);
  if (visible.el && hidden.el && to_aent) return IbqMode::ElOmegaE;
  if (hidden.horn && to_aent) return IbqMode::HornOmegaE;
  if (can_adapt(type, OracleType::Asat, gamma, hidden)) return IbqMode::AlchiqOmegaA;
  throw NoViableMode("no import-by-query mode is available for a " + to_string(type) + " oracle over hidden logic " +
                     hidden.name() + (gamma.roles.empty() ? "" : " with public roles"));
}

AdmissibilityResult check_admissible(const RuleSet& rv, const Abox& av, const Signature& gamma,
                                     const LogicProfile& hidden, IbqMode mode) {
  AdmissibilityResult r;
  r.safety = check_safety(rv, gamma, mode == IbqMode::ElOmegaE ? SafetyMode::El : SafetyMode::Ht);
  if (mode != IbqMode::ElOmegaE) r.cycle = detect_harmful_cycle(build_acyclicity_program(rv, av, gamma, hidden));
  if (r.safety.verdict == Verdict::Inadmissible) {
    r.verdict = Verdict::Inadmissible;
    r.reason = r.safety.reason;
  } else if (r.cycle && !r.cycle->acyclic) {
    r.verdict = Verdict::Inadmissible;
    r.reason = "harmful cycle: Gamma-Desc(" + r.cycle->witness.value_or("?") + ", " + r.cycle->witness.value_or("?") +
               ") is derivable";
  } else {
    r.verdict = r.safety.verdict;
    r.reason = r.safety.reason;
  }
  return r;
}

namespace {

Abox gamma_slice(const Tableau& t, const DerivationAbox& a, const Blocking& b, const Signature& gamma) {
  const Vocabulary& v = t.vocab();
  auto n = [&](Ind s) { return t.individual_name(s); };
  auto keep = [&](Ind s) { return !b.indirectly(s); };
  auto gc = [&](int c) { return gamma.contains_concept(v.concept_name(c)); };
  auto gr = [&](int r) { return gamma.contains_role(v.role_name(r)); };
  Abox out;
  for (auto& [s, c] : a.pos)
    if (keep(s) && gc(c)) out.push_back(ConceptAssertion{Concept::atomic(v.concept_name(c)), n(s)});
  for (auto& [s, c] : a.neg)
    if (keep(s) && gc(c)) out.push_back(ConceptAssertion{Concept::negation(Concept::atomic(v.concept_name(c))), n(s)});
  for (auto& [s, id] : a.atl) {
    const AtLeastDef& d = v.at_least(id);
    if (!keep(s) || !gr(d.role) || (d.filler != FillerKind::Top && !gc(d.filler_concept))) continue;
    Concept f = d.filler == FillerKind::Top    ? Concept::top()
                : d.filler == FillerKind::Atomic ? Concept::atomic(v.concept_name(d.filler_concept))
                                                 : Concept::negation(Concept::atomic(v.concept_name(d.filler_concept)));
    Role r{v.role_name(d.role), d.inverse};
    out.push_back(ConceptAssertion{d.n == 1 ? Concept::exists(r, f) : Concept::at_least(d.n, r, f), n(s)});
  }
  for (auto& x : a.out)
    if (keep(x[0]) && keep(x[2]) && gr(x[1])) out.push_back(RoleAssertion{Role{v.role_name(x[1])}, n(x[0]), n(x[2])});
  for (auto& x : a.nrole)
    if (keep(x[0]) && keep(x[2]) && gr(x[1]))
      out.push_back(NegRoleAssertion{Role{v.role_name(x[1])}, n(x[0]), n(x[2])});
  for (auto& [s, u] : a.eq)
    if (keep(s) && keep(u)) out.push_back(Equality{n(s), n(u)});
  for (auto& [s, u] : a.neq)
    if (keep(s) && keep(u)) out.push_back(Inequality{n(s), n(u)});
  return out;
}

// Ω^a / Ω^e rules. Γ symbol ids are fixed once the tableau is built.
class OmegaHook : public DerivationHook {
 public:
  OmegaHook(IbqMode mode, OracleHandle o, Signature gamma, LogicProfile hidden)
      : mode_(mode), o_(std::move(o)), gamma_(std::move(gamma)), hidden_(hidden) {}

  void bind(Tableau& t) {
    for (auto& c : gamma_.concepts) concepts_.push_back(t.vocab().concept_id(c));
    for (auto& r : gamma_.roles) roles_.push_back(t.vocab().role_id(r));
    role_set_.insert(roles_.begin(), roles_.end());
  }

  std::optional<std::vector<Branch>> step(const Tableau& t, const DerivationAbox& a, const Blocking& b) override {
    std::map<std::string, Ind> by_name;
    for (Ind s : a.inds) by_name.emplace(t.individual_name(s), s);
    Abox slice = gamma_slice(t, a, b, gamma_);
    // ⊤(s) holds for every individual and sig(⊤) ⊆ Γ, so an individual
    // without public assertions still forms a component; otherwise a hidden
    // TBox that is unsatisfiable or entails ⊤ ⊑ A would never be consulted.
    std::set<std::string> mentioned;
    for (auto& as : slice)
      for (auto& i : individuals_of(as)) mentioned.insert(i);
    for (Ind s : a.inds)
      if (!b.indirectly(s) && !mentioned.count(t.individual_name(s)))
        slice.push_back(ConceptAssertion{Concept::top(), t.individual_name(s)});
    auto components = connected_components(slice);
    if (mode_ == IbqMode::AlchiqOmegaA) return omega_a(a, b, components);
    return omega_e(t, a, components, by_name);
  }

 private:
  bool ask(const Abox& comp, const Target& target, bool entailment) {
    CanonicalQuery q = canonicalize(comp, target);
    std::string key = (entailment ? "AENT " : "ASAT ") + q.key;
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    bool answer = entailment ? o_.aent(comp, target) : o_.asat(comp);
    memo_.emplace(std::move(key), answer);
    return answer;
  }

  bool is_gamma_role(int r) const { return role_set_.count(r) > 0; }

  std::vector<Ind> gamma_succ(const DerivationAbox& a, const std::set<Ind>& scope, Ind s, bool inverse) const {
    std::set<Ind> out;
    for (auto& [r, u] : inverse ? a.predecessors(s) : a.successors(s))
      if (is_gamma_role(r) && scope.count(u)) out.insert(u);
    return {out.begin(), out.end()};
  }

  // (s1, s2) candidates of the three role patterns around s.
  std::set<std::pair<Ind, Ind>> eq_candidates(const DerivationAbox& a, const std::set<Ind>& scope, Ind s,
                                              bool with_inverse) const {
    std::set<std::pair<Ind, Ind>> out;
    auto succ = gamma_succ(a, scope, s, false);
    auto pred = gamma_succ(a, scope, s, true);
    auto add = [&](Ind x, Ind y) {
      if (x != y) out.insert({std::min(x, y), std::max(x, y)});
    };
    for (Ind x : succ)
      for (Ind y : succ) add(x, y);
    if (with_inverse) {
      for (Ind x : pred)
        for (Ind y : pred) add(x, y);
      for (Ind x : pred)
        for (Ind y : succ) add(x, y);
    }
    return out;
  }

  std::optional<std::vector<Branch>> omega_a(const DerivationAbox& a, const Blocking& b, const std::vector<Abox>& components) {
    for (auto& comp : components)
      if (!ask(comp, std::nullopt, false)) return std::vector<Branch>{{Fact{Fact::Kind::Falsum}}};
    auto live = [&](Ind s) { return !b.indirectly(s); };
    auto cut = [](Fact pos, Fact neg) { return std::vector<Branch>{{pos}, {neg}}; };

    for (Ind s : a.inds) {
      if (!live(s)) continue;
      for (int c : concepts_)
        if (!a.has_pos(s, c) && !a.has_neg(s, c))
          return cut({Fact::Kind::Pos, s, -1, c}, {Fact::Kind::Neg, s, -1, c});
    }

    // Pairs (s, t) with a public role R'(s, t), and the R' present.
    std::map<std::pair<Ind, Ind>, std::vector<int>> linked;
    for (auto& x : a.out)
      if (is_gamma_role(x[1]) && live(x[0]) && live(x[2])) linked[{x[0], x[2]}].push_back(x[1]);
    auto undetermined = [&](Ind s, int r, Ind u) { return !a.has_role(s, r, u) && !a.has_nrole(s, r, u); };

    if (hidden_.H)
      for (auto& [st, present] : linked)
        for (int r : roles_)
          if (undetermined(st.first, r, st.second))
            return cut({Fact::Kind::Role, st.first, st.second, r}, {Fact::Kind::NegRole, st.first, st.second, r});
    if (hidden_.I)
      for (auto& [st, present] : linked) {
        auto [s, u] = st;
        for (int r : hidden_.H ? roles_ : present)
          if (undetermined(u, r, s)) return cut({Fact::Kind::Role, u, s, r}, {Fact::Kind::NegRole, u, s, r});
      }
    if (hidden_.Q) {
      std::set<Ind> scope;
      for (Ind s : a.inds)
        if (live(s)) scope.insert(s);
      for (Ind s : scope)
        for (auto [x, y] : eq_candidates(a, scope, s, hidden_.I))
          if (!a.has_eq(x, y) && !a.has_neq(x, y)) return cut({Fact::Kind::Eq, x, y, -1}, {Fact::Kind::Neq, x, y, -1});
    }
    return std::nullopt;
  }

  std::optional<std::vector<Branch>> omega_e(const Tableau& t, const DerivationAbox& a,
                                             const std::vector<Abox>& components,
                                             const std::map<std::string, Ind>& by_name) {
    const Vocabulary& v = t.vocab();
    auto n = [&](Ind s) { return t.individual_name(s); };
    bool horn = mode_ == IbqMode::HornOmegaE;
    Branch facts;
    for (auto& comp : components) {
      if (ask(comp, std::nullopt, true)) return std::vector<Branch>{{Fact{Fact::Kind::Falsum}}};
      std::set<Ind> scope;
      for (auto& name : individuals_of(comp)) scope.insert(by_name.at(name));
      for (Ind s : scope)
        for (int c : concepts_)
          if (!a.has_pos(s, c) && ask(comp, ConceptAssertion{Concept::atomic(v.concept_name(c)), n(s)}, true))
            facts.push_back({Fact::Kind::Pos, s, -1, c});
      if (!horn) continue;
      // Without role inclusions or inverses no new role assertion is entailed.
      if (hidden_.H || hidden_.I) {
        std::set<std::pair<Ind, Ind>> pairs;
        for (Ind s : scope) {
          for (Ind u : gamma_succ(a, scope, s, false)) pairs.insert({s, u});
          for (Ind u : gamma_succ(a, scope, s, true)) pairs.insert({s, u});
        }
        for (auto [s, u] : pairs)
          for (int r : roles_)
            if (!a.has_role(s, r, u) && ask(comp, RoleAssertion{Role{v.role_name(r)}, n(s), n(u)}, true))
              facts.push_back({Fact::Kind::Role, s, u, r});
      }
      // Equalities are entailed only through number restrictions.
      if (hidden_.Q) {
        std::set<std::pair<Ind, Ind>> pairs;
        for (Ind s : scope)
          for (auto p : eq_candidates(a, scope, s, true)) pairs.insert(p);
        for (auto [x, y] : pairs)
          if (!a.has_eq(x, y) && ask(comp, Equality{n(x), n(y)}, true)) facts.push_back({Fact::Kind::Eq, x, y, -1});
      }
    }
    if (facts.empty()) return std::nullopt;
    return std::vector<Branch>{std::move(facts)};
  }

  IbqMode mode_;
  OracleHandle o_;
  Signature gamma_;
  LogicProfile hidden_;
  std::vector<int> concepts_, roles_;
  std::set<int> role_set_;
  std::map<std::string, bool> memo_;
};

OracleType needed_type(IbqMode m) { return m == IbqMode::AlchiqOmegaA ? OracleType::Asat : OracleType::Aent; }

void reject_nominals(const KnowledgeBase& kb, const char* which) {
  if (!kb.nominals.empty() || infer_profile(kb).O)
    throw UnsupportedConstruct(std::string("the ") + which + " knowledge base must not use nominals");
}

}  // namespace

GammaProjection project_gamma(const Tableau& t, const DerivationAbox& a, const Blocking& b, const Signature& gamma) {
  GammaProjection p;
  p.abox = gamma_slice(t, a, b, gamma);
  p.components = connected_components(p.abox);
  return p;
}

IbqResult ibq_check_sat(const Signature& gamma, const RuleSet& rv, const Abox& av, const OracleHandle& o, IbqMode mode,
                        const IbqOptions& opt) {
  if (o.logic().O) throw UnsupportedConstruct("the hidden TBox must not use nominals");
  OracleHandle oracle = adapt(o, needed_type(mode));
  LogicProfile hidden = o.logic();
  if (mode == IbqMode::ElOmegaE)
    for (auto& r : rv)
      if (!is_el_rule(r)) throw UnsupportedConstruct("not an EL-rule: " + render(r));
  if (!opt.assume_admissible) {
    AdmissibilityResult adm = check_admissible(rv, av, gamma, hidden, mode);
    if (adm.verdict != Verdict::Admissible) {
      std::string what = adm.verdict == Verdict::Inadmissible ? "input is not admissible: " : "admissibility unknown: ";
      throw Inadmissible(adm, what + adm.reason);
    }
  }
  OmegaHook hook(mode, oracle, gamma, hidden);
  TableauOptions topt;
  topt.el = mode == IbqMode::ElOmegaE;
  topt.blocking = topt.el ? BlockingMode::Standard : BlockingMode::GammaRelevant;
  topt.gamma_roles = gamma.roles;
  topt.hook = &hook;
  topt.hook_before_expansion = !topt.el;
  topt.max_rule_apps = opt.max_rule_apps;
  topt.max_individuals = opt.max_individuals;
  topt.check_invariants = opt.check_invariants;
  Tableau t(rv, topt);
  hook.bind(t);
  SatResult r = t.run(t.load(av));
  IbqResult out;
  out.sat = r.sat;
  out.mode = mode;
  out.stats = r.stats;
  out.queries = o.stats();
  out.leaf = std::move(r.leaf);
  return out;
}

IbqResult import_check_sat(const KnowledgeBase& visible, const Signature& gamma, const OracleHandle& o,
                           std::optional<IbqMode> mode, const IbqOptions& opt) {
  reject_nominals(visible, "visible");
  LogicProfile vp = visible.logic_declared ? visible.logic : infer_profile(visible);
  IbqMode m = mode ? *mode : select_mode(vp, o.logic(), o.type(), gamma);
  ModalRewrite rw = gamma_modal_rewrite(visible, gamma);
  Clausified c = m == IbqMode::ElOmegaE ? clausify_el(rw.kb) : clausify_alchiq(rw.kb);
  OracleHandle eo = expanding_oracle(o, rw.gamma, rw.expansion);
  return ibq_check_sat(rw.gamma, c.rules, c.abox, eo, m, opt);
}

bool import_entails(const KnowledgeBase& visible, const Signature& gamma, const OracleHandle& o, const Concept& sub,
                    const Concept& sup, std::optional<IbqMode> mode, const IbqOptions& opt, IbqResult* result) {
  reject_nominals(visible, "visible");
  if (!mode) {
    LogicProfile vp = visible.logic_declared ? visible.logic : infer_profile(visible);
    mode = select_mode(vp, o.logic(), o.type(), gamma);
    // Subsumption needs a negated goal, which the EL calculus lacks.
    if (*mode == IbqMode::ElOmegaE) mode = IbqMode::HornOmegaE;
  }
  if (*mode == IbqMode::ElOmegaE) throw UnsupportedConstruct("subsumption queries are not offered in el-e mode");

  Signature used = signature_of(visible);
  used |= signature_of(sub);
  used |= signature_of(sup);
  used |= gamma;
  std::string x = "_e0";
  for (int i = 1; used.contains_concept(x); ++i) x = "_e" + std::to_string(i);
  std::set<std::string> inds;
  for (auto& i : individuals_of(visible.abox)) inds.insert(i);
  std::string a0 = "_a0";
  for (int i = 1; inds.count(a0); ++i) a0 = "_a" + std::to_string(i);

  KnowledgeBase kb = visible;
  kb.logic_declared = false;
  Concept cx = Concept::atomic(x);
  kb.tbox.push_back(ConceptInclusion{cx, sub});
  kb.tbox.push_back(ConceptInclusion{Concept::conj(cx, sup), Concept::bottom()});
  kb.abox.push_back(ConceptAssertion{cx, a0});
  IbqResult r = import_check_sat(kb, gamma, o, mode, opt);
  if (result) *result = r;
  return !r.sat;
}

}  // namespace ibq
