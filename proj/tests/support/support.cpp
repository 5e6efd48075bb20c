#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

namespace ibq::testing {

std::string fixture_path(const std::string& name) { return std::string(IBQ_FIXTURE_DIR) + "/" + name; }

KnowledgeBase load_kb(const std::string& fixture) { return parse_kb(read_file(fixture_path(fixture))); }

Signature load_sig(const std::string& fixture) { return parse_signature(read_file(fixture_path(fixture))); }

KnowledgeBase kb(const std::string& text) { return parse_kb(text); }

Signature sig(std::vector<std::string> concepts, std::vector<std::string> roles) {
  Signature s;
  s.concepts.insert(concepts.begin(), concepts.end());
  s.roles.insert(roles.begin(), roles.end());
  return s;
}

KnowledgeBase merge(const KnowledgeBase& a, const KnowledgeBase& b) {
  KnowledgeBase out;
  out.tbox = a.tbox;
  out.tbox.insert(out.tbox.end(), b.tbox.begin(), b.tbox.end());
  out.abox = a.abox;
  out.abox.insert(out.abox.end(), b.abox.begin(), b.abox.end());
  out.logic = infer_profile(out);
  return out;
}

bool direct_sat(const KnowledgeBase& visible, const KnowledgeBase& hidden) {
  TableauOptions opt;
  opt.check_invariants = true;
  return check_sat_kb(merge(visible, hidden), opt).sat;
}

// ---------------------------------------------------------------- recording

RecordingBackend::RecordingBackend(std::shared_ptr<OracleBackend> inner, Signature gamma)
    : inner_(std::move(inner)), gamma_(std::move(gamma)) {}

void RecordingBackend::check(const Abox& a, const Target& t, const std::string& what) {
  Signature s = signature_of(a);
  Abox whole = a;
  if (t) {
    s |= signature_of(*t);
    whole.push_back(*t);
  }
  std::lock_guard lock(mu_);
  if (!s.subset_of(gamma_)) violations_.push_back(what + ": symbols outside the public signature");
  if (!whole.empty() && !is_connected(whole)) violations_.push_back(what + ": query is not connected");
}

bool RecordingBackend::csat(const Concept& c) {
  if (!signature_of(c).subset_of(gamma_)) {
    std::lock_guard lock(mu_);
    violations_.push_back("CSAT " + render(c) + ": symbols outside the public signature");
  }
  {
    std::lock_guard lock(mu_);
    queries_.push_back({OracleType::Csat, {}, std::nullopt, c});
  }
  return inner_->csat(c);
}

bool RecordingBackend::asat(const Abox& a) {
  check(a, std::nullopt, "ASAT " + render_canonical(a));
  {
    std::lock_guard lock(mu_);
    queries_.push_back({OracleType::Asat, a, std::nullopt, std::nullopt});
  }
  return inner_->asat(a);
}

bool RecordingBackend::aent(const Abox& a, const Target& alpha) {
  check(a, alpha, "AENT " + render_canonical(a) + " ENTAILS " + render_target(alpha));
  {
    std::lock_guard lock(mu_);
    queries_.push_back({OracleType::Aent, a, alpha, std::nullopt});
  }
  return inner_->aent(a, alpha);
}

std::vector<RecordingBackend::Query> RecordingBackend::queries() const {
  std::lock_guard lock(mu_);
  return queries_;
}

std::vector<std::string> RecordingBackend::violations() const {
  std::lock_guard lock(mu_);
  return violations_;
}

std::pair<OracleHandle, std::shared_ptr<RecordingBackend>> recording_oracle(const KnowledgeBase& hidden,
                                                                            const Signature& gamma, OracleType type) {
  TableauOptions topt;
  topt.check_invariants = true;
  auto local = local_oracle(hidden, gamma, type, topt);
  auto rec = std::make_shared<RecordingBackend>(local.backend(), gamma);
  return {OracleHandle(rec), rec};
}

// ---------------------------------------------------------------- generators

namespace {

struct Gen {
  std::mt19937& rng;
  Family family;
  int concepts, roles;
  std::string prefix;
  const Signature& gamma;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  bool coin(double p) { return std::bernoulli_distribution(p)(rng); }

  std::string cname(int i) {
    std::string base = "C" + std::to_string(i);
    return gamma.contains_concept(base) ? base : prefix + base;
  }
  std::string rname(int i) {
    std::string base = "R" + std::to_string(i);
    return gamma.contains_role(base) ? base : prefix + base;
  }
  Concept atom() { return Concept::atomic(cname(pick(concepts))); }
  Role role() {
    Role r{rname(pick(roles)), false};
    if (family != Family::El && coin(0.2)) r.inverted = true;
    return r;
  }

  Concept el(int depth) {
    int k = pick(10);
    if (depth > 0 && k < 3) return Concept::exists(role(), el(depth - 1));
    if (depth > 0 && k < 5) return Concept::conj(el(depth - 1), el(depth - 1));
    if (k == 9) return Concept::top();
    return atom();
  }

  TBoxAxiom el_axiom() {
    Concept lhs = el(2);
    Concept rhs = coin(0.1) ? Concept::bottom() : el(2);
    return ConceptInclusion{lhs, rhs};
  }

  TBoxAxiom horn_axiom() {
    switch (pick(9)) {
      case 0: return ConceptInclusion{Concept::conj(atom(), atom()), atom()};
      case 1: return ConceptInclusion{atom(), Concept::exists(role(), atom())};
      case 2: return ConceptInclusion{Concept::exists(role(), atom()), atom()};
      case 3: return ConceptInclusion{atom(), Concept::forall(role(), atom())};
      case 4: return ConceptInclusion{coin(0.5) ? atom() : Concept::top(), Concept::at_most(1, role(), Concept::top())};
      case 5: return ConceptInclusion{atom(), Concept::bottom()};
      case 6: return ConceptInclusion{atom(), Concept::negation(atom())};
      case 7: {
        Role a = role(), b = role();
        a.inverted = false;
        return RoleInclusion{a, b};
      }
      default: return el_axiom();
    }
  }

  TBoxAxiom alchiq_axiom() {
    switch (pick(7)) {
      case 0: return ConceptInclusion{atom(), Concept::disj(atom(), atom())};
      case 1: return ConceptInclusion{Concept::negation(atom()), atom()};
      case 2: return ConceptInclusion{atom(), Concept::at_least(2, role(), atom())};
      case 3: return ConceptInclusion{Concept::at_least(2, role(), atom()), atom()};
      case 4: return ConceptInclusion{atom(), Concept::forall(role(), Concept::disj(atom(), atom()))};
      default: return horn_axiom();
    }
  }

  TBoxAxiom axiom() {
    switch (family) {
      case Family::El: return el_axiom();
      case Family::Horn: return horn_axiom();
      case Family::Alchiq: return alchiq_axiom();
    }
    return el_axiom();
  }

  Assertion assertion() {
    static const char* inds[] = {"a", "b", "c"};
    int k = pick(10);
    if (k < 3) return RoleAssertion{Role{rname(pick(roles)), false}, inds[pick(2)], inds[1 + pick(2)]};
    if (k == 3 && family != Family::El) return ConceptAssertion{Concept::negation(atom()), inds[pick(3)]};
    return ConceptAssertion{atom(), inds[pick(3)]};
  }
};

}  // namespace

KnowledgeBase random_kb(std::mt19937& rng, Family f, int concepts, int roles, int axioms, int assertions,
                        const std::string& prefix, const Signature& gamma) {
  Gen g{rng, f, concepts, roles, prefix, gamma};
  KnowledgeBase out;
  int n = 1 + g.pick(axioms);
  for (int i = 0; i < n; ++i) out.tbox.push_back(g.axiom());
  if (assertions > 0) {
    int m = 1 + g.pick(assertions);
    for (int i = 0; i < m; ++i) out.abox.push_back(g.assertion());
  }
  out.logic = infer_profile(out);
  return out;
}

Instance random_instance(std::mt19937& rng, Family f, const GenParams& p) {
  Instance inst;
  std::bernoulli_distribution half(0.5);
  for (int i = 0; i < p.concepts; ++i)
    if (half(rng)) inst.gamma.concepts.insert("C" + std::to_string(i));
  for (int i = 0; i < p.roles; ++i)
    if (half(rng)) inst.gamma.roles.insert("R" + std::to_string(i));
  inst.visible = random_kb(rng, f, p.concepts, p.roles, p.visible_axioms, p.assertions, "V", inst.gamma);
  inst.hidden = random_kb(rng, f, p.concepts, p.roles, p.hidden_axioms, 0, "H", inst.gamma);
  return inst;
}

std::string Instance::describe() const {
  return "gamma:\n" + render(gamma) + "\nvisible:\n" + render(visible) + "\nhidden:\n" + render(hidden);
}

// ---------------------------------------------------------------- corpora

std::string CorpusReport::summary() const {
  std::ostringstream out;
  out << "attempts=" << attempts << " run=" << admissible << " agree=" << agree << " sat=" << sat
      << " unsat=" << unsat << " invariant_violations=" << invariant_violations
      << " legality_violations=" << legality_violations << " containment=" << containment_checked << "/"
      << containment_failures << " resource_trips=" << resource_trips;
  return out.str();
}

std::optional<std::string> el_containment_gap(const Instance& inst) {
  IbqOptions opt;
  opt.check_invariants = true;
  auto local = local_oracle(inst.hidden, inst.gamma, OracleType::Aent);
  ModalRewrite rw = gamma_modal_rewrite(inst.visible, inst.gamma);
  Clausified cv = clausify_el(rw.kb);
  OracleHandle o = expanding_oracle(local, rw.gamma, rw.expansion);
  IbqResult r = ibq_check_sat(rw.gamma, cv.rules, cv.abox, o, IbqMode::ElOmegaE, opt);

  KnowledgeBase h = inst.hidden;
  for (auto& [x, c] : rw.expansion) h.tbox.push_back(ConceptEquivalence{Concept::atomic(x), c});
  h.logic = infer_profile(h);
  ClausifyOptions copt;
  copt.fresh_prefix = "_h";
  Clausified ch = clausify_el(h, copt);
  RuleSet all = cv.rules;
  all.insert(all.end(), ch.rules.begin(), ch.rules.end());
  TableauOptions topt;
  topt.check_invariants = true;
  SatResult d = check_sat_el(all, cv.abox, topt);
  if (r.sat != d.sat) return "satisfiability differs: ibq=" + std::to_string(r.sat) + " direct=" + std::to_string(d.sat);
  if (!r.sat) return std::nullopt;
  std::set<std::string> direct;
  for (auto& a : d.leaf) direct.insert(render(a));
  for (auto& a : r.leaf)
    if (!direct.count(render(a))) return render(a);
  return std::nullopt;
}

CorpusReport run_corpus(Family f, int target, std::uint32_t seed, int max_attempts, const GenParams& p) {
  std::mt19937 rng(seed);
  CorpusReport rep;
  IbqOptions opt;
  opt.check_invariants = true;
  IbqMode mode = f == Family::El ? IbqMode::ElOmegaE : f == Family::Horn ? IbqMode::HornOmegaE : IbqMode::AlchiqOmegaA;
  OracleType type = mode == IbqMode::AlchiqOmegaA ? OracleType::Asat : OracleType::Aent;
  auto note = [&](const std::string& what, const Instance& inst) {
    if (rep.failures.size() < 5) rep.failures.push_back(what + "\n" + inst.describe());
  };
  while (rep.admissible < target && rep.attempts < max_attempts) {
    ++rep.attempts;
    Instance inst = random_instance(rng, f, p);
    auto [o, rec] = recording_oracle(inst.hidden, inst.gamma, type);
    IbqResult r;
    try {
      r = import_check_sat(inst.visible, inst.gamma, o, mode, opt);
    } catch (const Inadmissible&) {
      continue;
    } catch (const InvariantViolation& e) {
      ++rep.admissible;
      ++rep.invariant_violations;
      note(std::string("invariant violation: ") + e.what(), inst);
      continue;
    } catch (const ResourceLimit& e) {
      ++rep.admissible;
      ++rep.resource_trips;
      note(std::string("resource limit: ") + e.what(), inst);
      continue;
    } catch (const std::exception& e) {
      ++rep.admissible;
      note(std::string("error: ") + e.what(), inst);
      continue;
    }
    ++rep.admissible;
    auto v = rec->violations();
    if (!v.empty()) {
      rep.legality_violations += static_cast<int>(v.size());
      note("illegal query: " + v.front(), inst);
    }
    bool truth = false;
    try {
      truth = direct_sat(inst.visible, inst.hidden);
    } catch (const InvariantViolation& e) {
      ++rep.invariant_violations;
      note(std::string("invariant violation in direct run: ") + e.what(), inst);
      continue;
    }
    (r.sat ? rep.sat : rep.unsat)++;
    if (r.sat == truth) ++rep.agree;
    else note("disagreement: ibq=" + std::to_string(r.sat) + " direct=" + std::to_string(truth), inst);
    if (f == Family::El) {
      ++rep.containment_checked;
      try {
        if (auto gap = el_containment_gap(inst)) {
          ++rep.containment_failures;
          note("containment gap: " + *gap, inst);
        }
      } catch (const std::exception& e) {
        ++rep.containment_failures;
        note(std::string("containment check error: ") + e.what(), inst);
      }
    }
  }
  return rep;
}

// ---------------------------------------------------------------- datalog

NaiveFixpoint naive_fixpoint(const AcyclicityProgram& p) {
  using GroundAtom = std::pair<std::string, std::vector<int>>;
  std::set<GroundAtom> facts;
  for (auto& f : p.facts) {
    std::vector<int> args;
    for (auto& t : f.args) args.push_back(t.id);
    facts.insert({f.pred, args});
  }

  auto match = [&](const DRule& r) {
    std::vector<GroundAtom> out;
    std::map<int, int> sigma;
    std::function<void(std::size_t)> go = [&](std::size_t i) {
      if (i == r.body.size()) {
        for (auto& h : r.head) {
          std::vector<int> args;
          for (auto& t : h.args) args.push_back(t.is_var ? sigma.at(t.id) : t.id);
          out.push_back({h.pred, args});
        }
        return;
      }
      const DAtom& b = r.body[i];
      auto lo = facts.lower_bound({b.pred, {}});
      for (auto it = lo; it != facts.end() && it->first == b.pred; ++it) {
        if (it->second.size() != b.args.size()) continue;
        std::vector<int> bound;
        bool ok = true;
        for (std::size_t k = 0; k < b.args.size() && ok; ++k) {
          const DTerm& t = b.args[k];
          int c = it->second[k];
          if (!t.is_var) ok = t.id == c;
          else if (auto s = sigma.find(t.id); s != sigma.end()) ok = s->second == c;
          else {
            sigma[t.id] = c;
            bound.push_back(t.id);
          }
        }
        if (ok) go(i + 1);
        for (int v : bound) sigma.erase(v);
      }
    };
    go(0);
    return out;
  };

  for (bool changed = true; changed;) {
    changed = false;
    std::vector<GroundAtom> fresh;
    for (auto& r : p.rules)
      for (auto& a : match(r)) fresh.push_back(a);
    // Equality: symmetry, transitivity, replacement of equals in any position.
    std::vector<std::pair<int, int>> eqs;
    for (auto it = facts.lower_bound({kEq, {}}); it != facts.end() && it->first == kEq; ++it)
      eqs.push_back({it->second[0], it->second[1]});
    for (auto [a, b] : eqs) {
      fresh.push_back({kEq, {b, a}});
      for (auto [c, d] : eqs)
        if (b == c) fresh.push_back({kEq, {a, d}});
    }
    if (!eqs.empty()) {
      std::multimap<int, int> to;
      for (auto [a, b] : eqs) to.emplace(a, b);
      for (auto& [pred, args] : facts) {
        if (pred == kEq) continue;
        for (std::size_t k = 0; k < args.size(); ++k) {
          auto [lo, hi] = to.equal_range(args[k]);
          for (auto it = lo; it != hi; ++it) {
            auto copy = args;
            copy[k] = it->second;
            fresh.push_back({pred, copy});
          }
        }
      }
    }
    for (auto& a : fresh)
      if (facts.insert(a).second) changed = true;
  }

  NaiveFixpoint out;
  out.facts = facts;
  for (int v : p.v_constants)
    if (facts.count({kGammaDesc, {v, v}})) out.witnesses.insert(v);
  out.harmful = !out.witnesses.empty();
  return out;
}

KnowledgeBase chain_visible(int n) {
  std::string text = "A0(a).\n";
  for (int i = 0; i < n; ++i) text += "A" + std::to_string(i) + " sub some R A" + std::to_string(i + 1) + ".\n";
  return parse_kb(text);
}

double growth_exponent(const std::vector<double>& x, const std::vector<double>& y) {
  double n = static_cast<double>(x.size()), sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double lx = std::log(x[i]), ly = std::log(std::max(y[i], 1.0));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace ibq::testing
