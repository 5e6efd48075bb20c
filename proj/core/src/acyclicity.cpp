// Datalog abstraction of rv ∪ av and its harmful-cycle test.
#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>

#include "ibq/admissibility.hpp"

namespace ibq {

std::string AcyclicityProgram::render_atom(const DAtom& a) const {
  std::string s = a.pred + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) s += ",";
    const DTerm& t = a.args[i];
    if (t.is_var) s += t.id == 0 ? "x" : "z" + std::to_string(t.id);
    else s += constants.at(t.id);
  }
  return s + ")";
}

std::string AcyclicityProgram::render() const {
  std::ostringstream out;
  for (auto& f : facts) out << render_atom(f) << ".\n";
  for (auto& r : rules) {
    std::string b, h;
    for (auto& a : r.body) b += (b.empty() ? "" : ", ") + render_atom(a);
    for (auto& a : r.head) h += (h.empty() ? "" : ", ") + render_atom(a);
    out << (b.empty() ? "TRUE" : b) << " -> " << h << "   " << r.label << "\n";
  }
  return out.str();
}

AcyclicityProgram build_acyclicity_program(const RuleSet& rv, const Abox& av, const Signature& gamma,
                                           const LogicProfile& hidden) {
  AcyclicityProgram p;
  std::map<std::string, int> individual, vconst;
  auto ind = [&](const std::string& n) {
    auto [it, fresh] = individual.emplace(n, static_cast<int>(p.constants.size()));
    if (fresh) p.constants.push_back(n);
    return it->second;
  };
  auto v_of = [&](const std::string& key) {
    auto [it, fresh] = vconst.emplace(key, static_cast<int>(p.constants.size()));
    if (fresh) {
      p.constants.push_back("v_" + key);
      p.v_constants.insert(it->second);
    }
    return it->second;
  };
  auto var = [](Var v) { return DTerm{true, v}; };
  auto cst = [](int c) { return DTerm{false, c}; };

  auto inds = individuals_of(av);
  std::sort(inds.begin(), inds.end());
  inds.erase(std::unique(inds.begin(), inds.end()), inds.end());
  for (auto& i : inds) ind(i);
  Signature sig = signature_of(rv);
  sig |= signature_of(av);
  for (auto& a : sig.concepts) {
    v_of(a);
    v_of("not_" + a);
  }

  for (auto& as : av) {
    if (auto* ca = std::get_if<ConceptAssertion>(&as); ca && ca->c.is_atomic())
      p.facts.push_back({ca->c.name(), {cst(ind(ca->ind))}});
    if (auto* ra = std::get_if<RoleAssertion>(&as)) {
      int s = ind(ra->from), t = ind(ra->to);
      if (ra->role.inverted) std::swap(s, t);
      p.facts.push_back({ra->role.base, {cst(s), cst(t)}});
    }
  }
  for (auto& i : inds) {
    p.facts.push_back({kDomain, {cst(ind(i))}});
    for (auto& a : gamma.concepts) p.facts.push_back({a, {cst(ind(i))}});
  }

  for (std::size_t i = 0; i < rv.size(); ++i) {
    const HTRule& r = rv[i];
    std::vector<DAtom> body;
    for (auto& a : r.body) {
      if (auto* ca = std::get_if<ConceptAtom>(&a)) body.push_back({ca->c.name, {var(ca->var)}});
      if (auto* ra = std::get_if<RoleAtom>(&a)) body.push_back({ra->role, {var(ra->from), var(ra->to)}});
    }
    if (body.empty()) body.push_back({kDomain, {var(0)}});
    for (std::size_t j = 0; j < r.head.size(); ++j) {
      std::vector<DAtom> head;
      const RuleAtom& h = r.head[j];
      if (auto* ca = std::get_if<ConceptAtom>(&h)) {
        const RuleConcept& c = ca->c;
        if (c.kind == RuleConcept::Kind::Atomic) head.push_back({c.name, {var(ca->var)}});
        if (c.kind == RuleConcept::Kind::AtLeast) {
          std::string key = c.filler.kind == FillerKind::Top ? "top"
                            : c.filler.kind == FillerKind::Atomic ? c.filler.name
                                                                  : "not_" + c.filler.name;
          DTerm v = cst(v_of(key));
          if (c.role.inverted) head.push_back({c.role.base, {v, var(ca->var)}});
          else head.push_back({c.role.base, {var(ca->var), v}});
          if (c.filler.kind == FillerKind::Atomic) head.push_back({c.filler.name, {v}});
          head.push_back({kSucc, {var(ca->var), v}});
        }
      } else if (auto* ra = std::get_if<RoleAtom>(&h)) {
        head.push_back({ra->role, {var(ra->from), var(ra->to)}});
      } else {
        auto& e = std::get<EqAtom>(h);
        head.push_back({kEq, {var(e.a), var(e.b)}});
      }
      if (head.empty()) continue;
      p.rules.push_back({body, head, "existential rule " + std::to_string(i + 1), true});
    }
  }

  // Only needed when some rule has an empty body: generated constants then
  // join the active domain.
  bool uses_domain = std::any_of(p.rules.begin(), p.rules.end(),
                                 [](const DRule& r) { return r.body.front().pred == kDomain; });
  if (uses_domain)
    for (auto& r : p.rules)
      for (std::size_t k = 0, n = r.head.size(); k < n; ++k)
        if (r.head[k].pred == kSucc) r.head.push_back({kDomain, {r.head[k].args[1]}});

  DTerm z = var(0), z1 = var(1), z2 = var(2), z3 = var(3);
  for (auto& a : gamma.concepts) {
    p.rules.push_back({{{kSucc, {z1, z2}}}, {{a, {z2}}}, "public concept " + a});
    p.formulas.insert("public-concept");
  }
  for (auto& r : gamma.roles)
    for (auto& rp : gamma.roles) {
      std::string pair = r + "," + rp;
      if (hidden.H) {
        p.rules.push_back({{{rp, {z1, z2}}}, {{r, {z1, z2}}}, "role hierarchy " + pair});
        p.formulas.insert("role-hierarchy");
        if (hidden.I) {
          p.rules.push_back({{{rp, {z1, z2}}}, {{r, {z2, z1}}}, "inverse role " + pair});
          p.formulas.insert("inverse-role");
        }
      }
      if (hidden.Q) {
        p.rules.push_back({{{r, {z, z1}}, {rp, {z, z2}}}, {{kEq, {z1, z2}}}, "functional out " + pair});
        p.formulas.insert("functional-out");
        if (hidden.I) {
          p.rules.push_back({{{r, {z1, z}}, {rp, {z2, z}}}, {{kEq, {z1, z2}}}, "functional in " + pair});
          p.rules.push_back({{{r, {z1, z}}, {rp, {z, z2}}}, {{kEq, {z1, z2}}}, "functional mixed " + pair});
          p.formulas.insert("functional-in");
          p.formulas.insert("functional-mixed");
        }
      }
    }
  for (auto& r : gamma.roles) {
    p.rules.push_back({{{kSucc, {z1, z2}}, {r, {z1, z2}}}, {{kGammaDesc, {z1, z2}}}, "desc step " + r});
    p.formulas.insert("desc-step");
  }
  if (!gamma.roles.empty()) {
    p.rules.push_back({{{kGammaDesc, {z1, z2}}, {kGammaDesc, {z2, z3}}}, {{kGammaDesc, {z1, z3}}}, "desc transitive"});
    p.formulas.insert("desc-transitive");
  }
  return p;
}

namespace {

using Fact = std::pair<std::string, std::vector<int>>;

struct Provenance {
  std::string label;
  std::vector<Fact> premises;
};

class Fixpoint {
 public:
  explicit Fixpoint(const AcyclicityProgram& p) : p_(p), parent_(p.constants.size()) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }

  void run() {
    for (auto& f : p_.facts) add(ground(f, {}), {"fact", {}});
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<std::pair<Fact, Provenance>> derived;
      std::vector<std::pair<int, int>> eqs;
      for (auto& r : p_.rules) {
        auto emit = [&](const DAtom& h, const std::vector<int>& binding, std::vector<Fact> prem) {
          Fact f = ground(h, binding);
          if (f.first == kEq) {
            if (find(f.second[0]) != find(f.second[1])) eqs.push_back({f.second[0], f.second[1]});
          } else if (!facts_.count(f)) {
            derived.push_back({f, {r.label, std::move(prem)}});
          }
        };
        if (r.star) eval_star(r, emit);
        else eval_plain(r, emit);
      }
      for (auto& [f, pr] : derived) changed |= add(f, pr);
      for (auto& [a, b] : eqs) changed |= unite(a, b);
      if (!eqs.empty()) recanonicalize();
    }
  }

  CycleReport report() {
    CycleReport rep;
    rep.fact_count = facts_.size();
    std::vector<int> candidates;
    for (auto& [f, unused] : facts_)
      if (f.first == kGammaDesc && f.second[0] == f.second[1] && v_bearing(f.second[0])) candidates.push_back(f.second[0]);
    if (candidates.empty()) return rep;
    rep.acyclic = false;
    int c = *std::min_element(candidates.begin(), candidates.end());
    int shown = c;
    for (int v : p_.v_constants)
      if (find(v) == c) {
        shown = v;
        break;
      }
    rep.witness = p_.constants[shown];
    std::set<Fact> seen;
    trace({kGammaDesc, {c, c}}, 0, seen, rep.trace);
    return rep;
  }

 private:
  int find(int x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }

  bool unite(int a, int b) {
    a = find(a), b = find(b);
    if (a == b) return false;
    parent_[std::max(a, b)] = std::min(a, b);
    return true;
  }

  bool v_bearing(int c) {
    for (int v : p_.v_constants)
      if (find(v) == find(c)) return true;
    return false;
  }

  std::vector<int> reps() {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(parent_.size()); ++i)
      if (find(i) == i) out.push_back(i);
    return out;
  }

  Fact ground(const DAtom& a, const std::vector<int>& binding) {
    Fact f{a.pred, {}};
    for (auto& t : a.args) f.second.push_back(find(t.is_var ? binding.at(t.id) : t.id));
    return f;
  }

  bool add(const Fact& f, const Provenance& pr) {
    if (!facts_.emplace(f, pr).second) return false;
    by_pred_[f.first].push_back(f.second);
    return true;
  }

  void recanonicalize() {
    std::map<Fact, Provenance> old;
    old.swap(facts_);
    by_pred_.clear();
    for (auto& [f, pr] : old) {
      Fact g = f;
      for (auto& c : g.second) c = find(c);
      Provenance q = pr;
      for (auto& pf : q.premises)
        for (auto& c : pf.second) c = find(c);
      add(g, q);
    }
  }

  const std::vector<std::vector<int>>& tuples(const std::string& pred) {
    static const std::vector<std::vector<int>> none;
    auto it = by_pred_.find(pred);
    return it == by_pred_.end() ? none : it->second;
  }

  // Backtracking join for rules with a bounded number of variables.
  template <class Emit>
  void eval_plain(const DRule& r, Emit& emit) {
    int nvars = 0;
    for (auto& a : r.body)
      for (auto& t : a.args)
        if (t.is_var) nvars = std::max(nvars, t.id + 1);
    std::vector<int> binding(nvars, -1);
    std::vector<Fact> prem;
    std::function<void(std::size_t)> go = [&](std::size_t i) {
      if (i == r.body.size()) {
        for (auto& h : r.head) emit(h, binding, prem);
        return;
      }
      const DAtom& a = r.body[i];
      const auto& rows = tuples(a.pred);  // emit only collects, so rows stay valid
      for (auto& row : rows) {
        std::vector<int> saved = binding;
        bool ok = true;
        for (std::size_t k = 0; k < a.args.size() && ok; ++k) {
          const DTerm& t = a.args[k];
          if (!t.is_var) ok = find(t.id) == row[k];
          else if (binding[t.id] < 0) binding[t.id] = row[k];
          else ok = binding[t.id] == row[k];
        }
        if (ok) {
          prem.push_back({a.pred, row});
          go(i + 1);
          prem.pop_back();
        }
        binding = saved;
      }
    };
    go(0);
  }

  // Existential rules: body atoms connect the center x only with single branch
  // variables, so per-variable pair relations P_i decide the body exactly.
  template <class Emit>
  void eval_star(const DRule& r, Emit& emit) {
    int k = 0;
    for (auto& a : r.body)
      for (auto& t : a.args)
        if (t.is_var) k = std::max(k, t.id);
    for (auto& a : r.head)
      for (auto& t : a.args)
        if (t.is_var) k = std::max(k, t.id);
    auto holds = [&](const DAtom& a, int x, int y) {
      std::vector<int> row;
      for (auto& t : a.args) row.push_back(t.is_var ? (t.id == 0 ? x : y) : find(t.id));
      return facts_.count({a.pred, row}) > 0;
    };
    auto var_of = [](const DAtom& a) {
      for (auto& t : a.args)
        if (t.is_var && t.id != 0) return t.id;
      return 0;
    };
    std::vector<int> xs;
    for (int c : reps()) {
      bool ok = true;
      for (auto& a : r.body)
        if (var_of(a) == 0 && !holds(a, c, -1)) ok = false;
      if (ok) xs.push_back(c);
    }
    std::vector<std::map<int, std::vector<int>>> P(k + 1);
    for (int i = 1; i <= k; ++i) {
      const DAtom* guard = nullptr;
      for (auto& a : r.body)
        if (var_of(a) == i && a.args.size() == 2) {
          guard = &a;
          break;
        }
      std::set<int> xset(xs.begin(), xs.end());
      if (!guard) continue;  // branch variables are always guarded in HT-rules
      int xpos = guard->args[0].is_var && guard->args[0].id == 0 ? 0 : 1;
      for (auto& row : tuples(guard->pred)) {
        int x = row[xpos], y = row[1 - xpos];
        if (!xset.count(x)) continue;
        bool ok = true;
        for (auto& a : r.body)
          if (var_of(a) == i && !holds(a, x, y)) ok = false;
        if (ok) P[i][x].push_back(y);
      }
    }
    for (int x : xs) {
      bool ok = true;
      for (int i = 1; i <= k; ++i)
        if (!P[i].count(x)) ok = false;
      if (!ok) continue;
      auto premises = [&](const std::vector<int>& binding, const std::set<int>& vars) {
        std::vector<Fact> prem;
        for (auto& a : r.body) {
          int v = var_of(a);
          if (v != 0 && !vars.count(v)) continue;
          prem.push_back(ground(a, binding));
        }
        return prem;
      };
      std::vector<int> binding(k + 1, x);
      for (int i = 1; i <= k; ++i) binding[i] = P[i][x].front();
      for (auto& h : r.head) {
        std::set<int> hv;
        for (auto& t : h.args)
          if (t.is_var && t.id != 0) hv.insert(t.id);
        if (hv.empty()) {
          std::set<int> all;
          for (int i = 1; i <= k; ++i) all.insert(i);
          emit(h, binding, premises(binding, all));
        } else if (hv.size() == 1) {
          int i = *hv.begin();
          for (int y : P[i][x]) {
            std::vector<int> b = binding;
            b[i] = y;
            emit(h, b, premises(b, {i}));
          }
        } else {
          int i = *hv.begin(), j = *hv.rbegin();
          for (int y1 : P[i][x])
            for (int y2 : P[j][x]) {
              std::vector<int> b = binding;
              b[i] = y1;
              b[j] = y2;
              emit(h, b, premises(b, {i, j}));
            }
        }
      }
    }
  }

  std::string render(const Fact& f) {
    std::string s = f.first + "(";
    for (std::size_t i = 0; i < f.second.size(); ++i) s += (i ? "," : "") + p_.constants[f.second[i]];
    return s + ")";
  }

  void trace(const Fact& f, int depth, std::set<Fact>& seen, std::vector<std::string>& out) {
    if (!seen.insert(f).second || depth > 32) return;
    auto it = facts_.find(f);
    if (it == facts_.end()) return;
    std::string line(static_cast<std::size_t>(depth) * 2, ' ');
    line += render(f) + "  <= " + it->second.label;
    out.push_back(line);
    for (auto& pf : it->second.premises) trace(pf, depth + 1, seen, out);
  }

  const AcyclicityProgram& p_;
  std::vector<int> parent_;
  std::map<Fact, Provenance> facts_;
  std::map<std::string, std::vector<std::vector<int>>> by_pred_;
};

}  // namespace

CycleReport detect_harmful_cycle(const AcyclicityProgram& p) {
  Fixpoint fp(p);
  fp.run();
  return fp.report();
}

std::string render(const CycleReport& r) {
  std::ostringstream out;
  out << "acyclic: " << (r.acyclic ? "yes" : "no") << "\nfixpoint facts: " << r.fact_count << "\n";
  if (r.witness) {
    out << "harmful cycle witness: " << kGammaDesc << "(" << *r.witness << "," << *r.witness << ")\n";
    for (auto& l : r.trace) out << "  " << l << "\n";
  }
  return out.str();
}

}  // namespace ibq
