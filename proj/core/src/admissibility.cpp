#include "ibq/admissibility.hpp"

#include <algorithm>
#include <sstream>

namespace ibq {

std::string to_string(Modularity m) { return m == Modularity::Proven ? "proven" : "unknown"; }

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Admissible: return "admissible";
    case Verdict::Inadmissible: return "inadmissible";
    case Verdict::Unknown: return "unknown";
  }
  return "?";
}

namespace {

bool has_gamma_role_atom(const HTRule& r, const Signature& gamma) {
  return std::any_of(r.body.begin(), r.body.end(), [&](const RuleAtom& a) {
    auto* ra = std::get_if<RoleAtom>(&a);
    return ra && gamma.contains_role(ra->role);
  });
}

bool mentions(const RuleAtom& a, const std::set<std::string>& names) {
  auto* ca = std::get_if<ConceptAtom>(&a);
  if (!ca) return false;
  if (ca->c.kind == RuleConcept::Kind::AtLeast)
    return ca->c.filler.kind != FillerKind::Top && names.count(ca->c.filler.name);
  return names.count(ca->c.name) > 0;
}

}  // namespace

std::set<std::string> safe_concepts(const RuleSet& rv, const Signature& gamma) {
  std::set<std::string> safe;
  for (auto& r : rv) {
    if (!has_gamma_role_atom(r, gamma)) continue;
    for (auto& a : r.body)
      if (auto* ca = std::get_if<ConceptAtom>(&a); ca && !gamma.contains_concept(ca->c.name)) safe.insert(ca->c.name);
  }
  return safe;
}

RuleSet reduct(const RuleSet& rv, const Signature& gamma) {
  auto safe = safe_concepts(rv, gamma);
  RuleSet out;
  for (auto& r : rv) {
    if (std::any_of(r.body.begin(), r.body.end(), [&](const RuleAtom& a) { return mentions(a, safe); })) continue;
    HTRule k{r.body, {}};
    for (auto& h : r.head)
      if (!mentions(h, safe)) k.head.push_back(h);
    out.push_back(std::move(k));
  }
  return out;
}

namespace {

// One rule under ∅/Δ assignments: passes iff some literal holds or some
// at-least head is constantly true.
struct RuleTest {
  std::vector<std::pair<int, bool>> literals;              // (symbol, required value)
  std::vector<std::vector<std::pair<int, bool>>> conjuncts;  // all must hold
};

bool passes(const RuleTest& t, const std::vector<bool>& v) {
  for (auto& [s, b] : t.literals)
    if (v[s] == b) return true;
  for (auto& c : t.conjuncts)
    if (std::all_of(c.begin(), c.end(), [&](const auto& l) { return v[l.first] == l.second; })) return true;
  return false;
}

}  // namespace

Modularity check_modularity_sufficient(const RuleSet& rules, const Signature& gamma, std::map<std::string, bool>* witness) {
  std::vector<std::string> names;  // "c:A" / "r:R"
  std::map<std::string, int> index;
  auto sym = [&](const std::string& key) {
    auto [it, fresh] = index.emplace(key, static_cast<int>(names.size()));
    if (fresh) names.push_back(key);
    return it->second;
  };
  std::vector<RuleTest> tests;
  for (auto& r : rules) {
    RuleTest t;
    for (auto& a : r.body) {
      if (auto* ca = std::get_if<ConceptAtom>(&a); ca && !gamma.contains_concept(ca->c.name))
        t.literals.push_back({sym("c:" + ca->c.name), false});
      if (auto* ra = std::get_if<RoleAtom>(&a); ra && !gamma.contains_role(ra->role))
        t.literals.push_back({sym("r:" + ra->role), false});
    }
    for (auto& a : r.head) {
      if (auto* ra = std::get_if<RoleAtom>(&a); ra && !gamma.contains_role(ra->role))
        t.literals.push_back({sym("r:" + ra->role), true});
      auto* ca = std::get_if<ConceptAtom>(&a);
      if (!ca) continue;
      const RuleConcept& c = ca->c;
      if (c.kind == RuleConcept::Kind::Atomic && !gamma.contains_concept(c.name)) t.literals.push_back({sym("c:" + c.name), true});
      if (c.kind == RuleConcept::Kind::AtLeast && c.n == 1 && !gamma.contains_role(c.role.base)) {
        std::vector<std::pair<int, bool>> conj{{sym("r:" + c.role.base), true}};
        if (c.filler.kind != FillerKind::Top) {
          if (gamma.contains_concept(c.filler.name)) continue;
          conj.push_back({sym("c:" + c.filler.name), c.filler.kind == FillerKind::Atomic});
        }
        t.conjuncts.push_back(std::move(conj));
      }
    }
    tests.push_back(std::move(t));
  }
  std::size_t k = names.size();
  std::vector<bool> v(k, false);
  auto all_pass = [&] { return std::all_of(tests.begin(), tests.end(), [&](const RuleTest& t) { return passes(t, v); }); };
  auto report = [&] {
    if (witness)
      for (std::size_t i = 0; i < k; ++i) (*witness)[names[i].substr(2)] = v[i];
    return Modularity::Proven;
  };
  if (k <= 20) {
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << k); ++mask) {
      for (std::size_t i = 0; i < k; ++i) v[i] = (mask >> i) & 1;
      if (all_pass()) return report();
    }
    return Modularity::Unknown;
  }
  auto failures = [&] {
    return std::count_if(tests.begin(), tests.end(), [&](const RuleTest& t) { return !passes(t, v); });
  };
  for (bool corner : {false, true}) {
    std::fill(v.begin(), v.end(), corner);
    if (all_pass()) return report();
  }
  std::fill(v.begin(), v.end(), false);
  auto best = failures();
  for (std::size_t round = 0; round < 2 * k && best > 0; ++round) {
    std::size_t pick = k;
    for (std::size_t i = 0; i < k; ++i) {
      v[i] = !v[i];
      auto f = failures();
      if (f < best) best = f, pick = i;
      v[i] = !v[i];
    }
    if (pick == k) break;
    v[pick] = !v[pick];
  }
  return best == 0 ? report() : Modularity::Unknown;
}

SafetyReport check_safety(const RuleSet& rv, const Signature& gamma, SafetyMode mode) {
  SafetyReport rep;
  rep.safe_set = safe_concepts(rv, gamma);
  rep.reduct = reduct(rv, gamma);
  rep.modularity = check_modularity_sufficient(rep.reduct, gamma);
  for (std::size_t i = 0; i < rv.size(); ++i) {
    const HTRule& r = rv[i];
    auto guarded = [&](Var v) {
      return std::any_of(r.body.begin(), r.body.end(), [&](const RuleAtom& a) {
        auto* ca = std::get_if<ConceptAtom>(&a);
        return ca && ca->var == v && rep.safe_set.count(ca->c.name);
      });
    };
    for (auto& a : r.body) {
      auto* ra = std::get_if<RoleAtom>(&a);
      if (!ra || !gamma.contains_role(ra->role)) continue;
      Var y = ra->from == kCenter ? ra->to : ra->from;
      if (mode == SafetyMode::El && ra->from != kCenter) continue;
      if (mode == SafetyMode::Ht && !guarded(kCenter)) rep.guard_violations.push_back({i, ra->role, 'x', kCenter});
      if (!guarded(y)) rep.guard_violations.push_back({i, ra->role, 'y', y});
    }
  }
  if (!rep.guard_violations.empty()) {
    auto& g = rep.guard_violations.front();
    rep.verdict = Verdict::Inadmissible;
    rep.reason = "rule " + std::to_string(g.rule + 1) + " has a body atom over public role " + g.role +
                 " without a safe concept guard on " + (g.side == 'x' ? std::string("x") : "y");
  } else if (rep.modularity == Modularity::Unknown) {
    rep.verdict = Verdict::Unknown;
    rep.reason = "the reduct is not provably semantically modular w.r.t. the public signature";
  } else {
    rep.verdict = Verdict::Admissible;
  }
  return rep;
}

std::string render(const SafetyReport& r, const RuleSet& rv) {
  std::ostringstream out;
  out << "safe concepts: {";
  bool first = true;
  for (auto& s : r.safe_set) out << (first ? "" : ", ") << s, first = false;
  out << "}\nreduct:\n";
  for (auto& k : r.reduct) out << "  " << render(k) << "\n";
  out << "modularity: " << to_string(r.modularity) << "\n";
  for (auto& g : r.guard_violations)
    out << "guard violation: rule " << g.rule + 1 << " (" << render(rv[g.rule]) << "), role " << g.role << ", side "
        << g.side << "\n";
  out << "safety verdict: " << to_string(r.verdict);
  if (!r.reason.empty()) out << " (" << r.reason << ")";
  out << "\n";
  return out.str();
}

}  // namespace ibq
