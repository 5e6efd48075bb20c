// Bounded model search by propositional grounding over a finite domain.
#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "ibq/tableau.hpp"

namespace ibq {
namespace {

struct BudgetExceeded {};

class Cnf {
 public:
  Cnf() { clauses_.push_back({kTrue}); }
  static constexpr int kTrue = 1;
  static constexpr int kFalse = -1;

  int fresh() { return ++vars_; }
  void add(std::vector<int> c) {
    if (std::find(c.begin(), c.end(), kTrue) != c.end()) return;
    std::erase(c, kFalse);
    clauses_.push_back(std::move(c));
  }
  int var_count() const { return vars_; }
  const std::vector<std::vector<int>>& clauses() const { return clauses_; }

 private:
  int vars_ = 1;
  std::vector<std::vector<int>> clauses_;
};

// Plain DPLL with unit propagation and a step budget.
class Solver {
 public:
  Solver(const Cnf& cnf, std::uint64_t& budget) : cnf_(cnf), budget_(budget), val_(cnf.var_count() + 1, 0) {}

  bool solve() { return search(); }

 private:
  int value(int lit) const {
    int v = val_[std::abs(lit)];
    return lit > 0 ? v : -v;
  }

  bool propagate(std::vector<int>& trail) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (auto& c : cnf_.clauses()) {
        if (budget_ == 0) throw BudgetExceeded{};
        --budget_;
        int unassigned = 0, last = 0;
        bool sat = false;
        for (int l : c) {
          int v = value(l);
          if (v > 0) { sat = true; break; }
          if (v == 0) { ++unassigned; last = l; }
        }
        if (sat) continue;
        if (unassigned == 0) return false;
        if (unassigned == 1) {
          val_[std::abs(last)] = last > 0 ? 1 : -1;
          trail.push_back(std::abs(last));
          changed = true;
        }
      }
    }
    return true;
  }

  bool search() {
    std::vector<int> trail;
    auto undo = [&] {
      for (int v : trail) val_[v] = 0;
    };
    if (!propagate(trail)) {
      undo();
      return false;
    }
    int pick = 0;
    for (int v = 1; v < static_cast<int>(val_.size()) && !pick; ++v)
      if (val_[v] == 0) pick = v;
    if (!pick) return true;
    for (int sign : {1, -1}) {
      val_[pick] = sign;
      if (search()) return true;
      val_[pick] = 0;
    }
    undo();
    return false;
  }

  const Cnf& cnf_;
  std::uint64_t& budget_;
  std::vector<int> val_;
};

// Ground encoding over domain {0..n-1}.
class Grounding {
 public:
  Grounding(int n, const std::map<std::string, int>& map) : n_(n), map_(map) {}

  int concept_var(const std::string& a, int d) { return lookup(concepts_, {a, d}); }
  int role_var(const Role& r, int d, int e) {
    if (r.inverted) std::swap(d, e);
    return lookup(roles_, {r.base, d * n_ + e});
  }

  // Literal implied to hold whenever the (NNF) concept c holds at d.
  int enc(const Concept& c, int d) {
    auto key = std::pair{c, d};
    if (auto it = memo_.find(key); it != memo_.end()) return it->second;
    int lit = build(c, d);
    memo_.emplace(key, lit);
    return lit;
  }

  Cnf cnf;

 private:
  int lookup(std::map<std::pair<std::string, int>, int>& m, std::pair<std::string, int> k) {
    auto it = m.find(k);
    if (it != m.end()) return it->second;
    int v = cnf.fresh();
    m.emplace(std::move(k), v);
    return v;
  }

  int build(const Concept& c, int d) {
    switch (c.kind()) {
      case ConceptKind::Top: return Cnf::kTrue;
      case ConceptKind::Bottom: return Cnf::kFalse;
      case ConceptKind::Atomic:
        if (c.is_nominal()) return map_.at(c.name()) == d ? Cnf::kTrue : Cnf::kFalse;
        return concept_var(c.name(), d);
      case ConceptKind::Not: {
        int l = build(c.sub(), d);
        return -l;
      }
      case ConceptKind::And: {
        int v = cnf.fresh();
        cnf.add({-v, enc(c.left(), d)});
        cnf.add({-v, enc(c.right(), d)});
        return v;
      }
      case ConceptKind::Or: {
        int v = cnf.fresh();
        cnf.add({-v, enc(c.left(), d), enc(c.right(), d)});
        return v;
      }
      case ConceptKind::AtLeast: {
        unsigned m = c.number();
        if (m == 0) return Cnf::kTrue;
        if (m > static_cast<unsigned>(n_)) return Cnf::kFalse;
        int v = cnf.fresh();
        std::vector<int> any{-v};
        for_subsets(m, [&](const std::vector<int>& s) {
          int w = cnf.fresh();
          for (int e : s) {
            cnf.add({-w, role_var(c.role(), d, e)});
            cnf.add({-w, enc(c.sub(), e)});
          }
          any.push_back(w);
        });
        cnf.add(any);
        return v;
      }
      case ConceptKind::AtMost: {
        unsigned m = c.number();
        if (m + 1 > static_cast<unsigned>(n_)) return Cnf::kTrue;
        int v = cnf.fresh();
        Concept neg = nnf_negated(c.sub());
        for_subsets(m + 1, [&](const std::vector<int>& s) {
          std::vector<int> cl{-v};
          for (int e : s) {
            cl.push_back(-role_var(c.role(), d, e));
            cl.push_back(enc(neg, e));
          }
          cnf.add(cl);
        });
        return v;
      }
      case ConceptKind::Exists: return build(Concept::at_least(1, c.role(), c.sub()), d);
      case ConceptKind::ForAll: return build(Concept::at_most(0, c.role(), nnf_negated(c.sub())), d);
    }
    return Cnf::kFalse;
  }

  void for_subsets(unsigned k, const std::function<void(const std::vector<int>&)>& f) {
    std::vector<int> cur;
    std::function<void(int)> go = [&](int from) {
      if (cur.size() == k) {
        f(cur);
        return;
      }
      for (int e = from; e < n_; ++e) {
        cur.push_back(e);
        go(e + 1);
        cur.pop_back();
      }
    };
    go(0);
  }

  int n_;
  const std::map<std::string, int>& map_;
  std::map<std::pair<std::string, int>, int> concepts_, roles_;
  std::map<std::pair<Concept, int>, int> memo_;
};

// Encodes assertions; false when the mapping itself violates (in)equalities.
bool encode_abox(Grounding& g, const Abox& abox, const std::map<std::string, int>& m) {
  for (auto& as : abox) {
    if (auto* x = std::get_if<ConceptAssertion>(&as)) {
      g.cnf.add({g.enc(nnf(x->c), m.at(x->ind))});
    } else if (auto* x = std::get_if<RoleAssertion>(&as)) {
      g.cnf.add({g.role_var(x->role, m.at(x->from), m.at(x->to))});
    } else if (auto* x = std::get_if<NegRoleAssertion>(&as)) {
      g.cnf.add({-g.role_var(x->role, m.at(x->from), m.at(x->to))});
    } else if (auto* x = std::get_if<Equality>(&as)) {
      if (m.at(x->a) != m.at(x->b)) return false;
    } else {
      auto& y = std::get<Inequality>(as);
      if (m.at(y.a) == m.at(y.b)) return false;
    }
  }
  return true;
}

// Enumerates surjections onto a prefix of the domain (restricted growth
// strings) so that symmetric mappings are visited once.
template <class F>
BruteResult search_models(const std::vector<std::string>& names, int max_domain, std::uint64_t budget, F&& encode) {
  try {
    for (int n = 1; n <= max_domain; ++n) {
      std::vector<int> rgs(names.size(), 0);
      std::function<bool(std::size_t, int)> go = [&](std::size_t i, int used) -> bool {
        if (i == names.size()) {
          std::map<std::string, int> m;
          for (std::size_t j = 0; j < names.size(); ++j) m[names[j]] = rgs[j];
          Grounding g(n, m);
          if (!encode(g, m, n)) return false;
          Solver s(g.cnf, budget);
          return s.solve();
        }
        for (int v = 0; v <= std::min(used, n - 1); ++v) {
          rgs[i] = v;
          if (go(i + 1, std::max(used, v + 1))) return true;
        }
        return false;
      };
      if (go(0, 0)) return BruteResult::Sat;
    }
  } catch (const BudgetExceeded&) {
    return BruteResult::Unknown;
  }
  return BruteResult::Unsat;
}

void collect_nominals(const Concept& c, std::set<std::string>& out) {
  if (c.kind() == ConceptKind::Atomic && c.is_nominal()) out.insert(c.name());
  switch (c.kind()) {
    case ConceptKind::Not:
    case ConceptKind::Exists:
    case ConceptKind::ForAll:
    case ConceptKind::AtLeast:
    case ConceptKind::AtMost: collect_nominals(c.sub(), out); break;
    case ConceptKind::And:
    case ConceptKind::Or:
      collect_nominals(c.left(), out);
      collect_nominals(c.right(), out);
      break;
    default: break;
  }
}

}  // namespace

BruteResult brute_force_sat(const KnowledgeBase& kb, int max_domain, std::uint64_t budget) {
  std::set<std::string> names(kb.nominals.begin(), kb.nominals.end());
  for (auto& i : individuals_of(kb.abox)) names.insert(i);
  for (auto& ax : kb.tbox) {
    if (auto* ci = std::get_if<ConceptInclusion>(&ax)) {
      collect_nominals(ci->sub, names);
      collect_nominals(ci->sup, names);
    } else if (auto* ce = std::get_if<ConceptEquivalence>(&ax)) {
      collect_nominals(ce->lhs, names);
      collect_nominals(ce->rhs, names);
    }
  }
  std::vector<std::string> list(names.begin(), names.end());
  return search_models(list, max_domain, budget, [&](Grounding& g, const std::map<std::string, int>& m, int n) {
    if (!encode_abox(g, kb.abox, m)) return false;
    for (auto& ax : kb.tbox) {
      if (auto* ri = std::get_if<RoleInclusion>(&ax)) {
        for (int d = 0; d < n; ++d)
          for (int e = 0; e < n; ++e) g.cnf.add({-g.role_var(ri->sub, d, e), g.role_var(ri->sup, d, e)});
        continue;
      }
      std::vector<Concept> gcis;
      if (auto* ci = std::get_if<ConceptInclusion>(&ax)) {
        gcis.push_back(Concept::disj(Concept::negation(ci->sub), ci->sup));
      } else {
        auto& ce = std::get<ConceptEquivalence>(ax);
        gcis.push_back(Concept::disj(Concept::negation(ce.lhs), ce.rhs));
        gcis.push_back(Concept::disj(Concept::negation(ce.rhs), ce.lhs));
      }
      for (auto& c : gcis) {
        Concept f = nnf(c);
        for (int d = 0; d < n; ++d) g.cnf.add({g.enc(f, d)});
      }
    }
    return true;
  });
}

BruteResult brute_force_sat(const RuleSet& rules, const Abox& normalized, int max_domain, std::uint64_t budget) {
  auto list = individuals_of(normalized);
  std::sort(list.begin(), list.end());
  list.erase(std::unique(list.begin(), list.end()), list.end());
  return search_models(list, max_domain, budget, [&](Grounding& g, const std::map<std::string, int>& m, int n) {
    if (!encode_abox(g, normalized, m)) return false;
    auto filler = [](const Filler& f) {
      if (f.kind == FillerKind::Top) return Concept::top();
      Concept a = Concept::atomic(f.name);
      return f.kind == FillerKind::Atomic ? a : Concept::negation(a);
    };
    for (auto& r : rules) {
      int k = max_branch_var(r);
      std::vector<int> sigma(static_cast<std::size_t>(k) + 1, 0);
      while (true) {
        std::vector<int> clause;
        bool trivially_true = false;
        for (auto& a : r.body) {
          if (auto* ca = std::get_if<ConceptAtom>(&a)) {
            int lit = g.concept_var(ca->c.name, sigma[ca->var]);
            clause.push_back(ca->c.kind == RuleConcept::Kind::Negated ? lit : -lit);
          } else if (auto* ra = std::get_if<RoleAtom>(&a)) {
            clause.push_back(-g.role_var(Role{ra->role}, sigma[ra->from], sigma[ra->to]));
          } else {
            auto& e = std::get<EqAtom>(a);
            if (sigma[e.a] != sigma[e.b]) trivially_true = true;
          }
        }
        for (auto& a : r.head) {
          if (auto* ca = std::get_if<ConceptAtom>(&a)) {
            const RuleConcept& c = ca->c;
            if (c.kind == RuleConcept::Kind::AtLeast)
              clause.push_back(g.enc(Concept::at_least(c.n, c.role, filler(c.filler)), sigma[ca->var]));
            else {
              int lit = g.concept_var(c.name, sigma[ca->var]);
              clause.push_back(c.kind == RuleConcept::Kind::Negated ? -lit : lit);
            }
          } else if (auto* ra = std::get_if<RoleAtom>(&a)) {
            clause.push_back(g.role_var(Role{ra->role}, sigma[ra->from], sigma[ra->to]));
          } else {
            auto& e = std::get<EqAtom>(a);
            if (sigma[e.a] == sigma[e.b]) trivially_true = true;
          }
        }
        if (!trivially_true) g.cnf.add(clause);
        int i = 0;
        while (i <= k && ++sigma[i] == n) sigma[i++] = 0;
        if (i > k) break;
      }
    }
    return true;
  });
}

}  // namespace ibq
