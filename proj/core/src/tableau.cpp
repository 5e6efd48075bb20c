#include "ibq/tableau.hpp"

#include <algorithm>
#include <climits>
#include <functional>

#include "ibq/text.hpp"

namespace ibq {

// ---------------------------------------------------------------------------
// Individuals and vocabulary

Ind IndividualTable::named(const std::string& name) {
  auto it = named_.find(name);
  if (it != named_.end()) return it->second;
  Ind id = static_cast<Ind>(infos_.size());
  infos_.push_back({IndKind::Named, -1, name});
  child_count_.push_back(0);
  named_.emplace(name, id);
  return id;
}

Ind IndividualTable::canonical(const std::string& key) {
  auto it = canonical_.find(key);
  if (it != canonical_.end()) return it->second;
  Ind id = static_cast<Ind>(infos_.size());
  infos_.push_back({IndKind::Canonical, -1, "*" + (key.empty() ? std::string("top") : key)});
  child_count_.push_back(0);
  canonical_.emplace(key, id);
  return id;
}

Ind IndividualTable::fresh_child(Ind parent) {
  Ind id = static_cast<Ind>(infos_.size());
  std::string path = infos_.at(parent).name + "." + std::to_string(++child_count_.at(parent));
  infos_.push_back({IndKind::Unnamed, parent, std::move(path)});
  child_count_.push_back(0);
  return id;
}

bool IndividualTable::is_descendant(Ind s, Ind t) const {
  for (Ind p = parent(s); p >= 0; p = parent(p))
    if (p == t) return true;
  return false;
}

std::optional<Ind> IndividualTable::find_named(const std::string& name) const {
  auto it = named_.find(name);
  if (it == named_.end()) return std::nullopt;
  return it->second;
}

int Vocabulary::concept_id(const std::string& name) {
  auto [it, fresh] = concept_ids_.emplace(name, static_cast<int>(concepts_.size()));
  if (fresh) concepts_.push_back(name);
  return it->second;
}

int Vocabulary::role_id(const std::string& name) {
  auto [it, fresh] = role_ids_.emplace(name, static_cast<int>(roles_.size()));
  if (fresh) roles_.push_back(name);
  return it->second;
}

int Vocabulary::at_least_id(const AtLeastDef& d) {
  auto [it, fresh] = at_least_ids_.emplace(d, static_cast<int>(at_least_.size()));
  if (fresh) at_least_.push_back(d);
  return it->second;
}

std::optional<int> Vocabulary::find_concept(const std::string& name) const {
  auto it = concept_ids_.find(name);
  if (it == concept_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> Vocabulary::find_role(const std::string& name) const {
  auto it = role_ids_.find(name);
  if (it == role_ids_.end()) return std::nullopt;
  return it->second;
}

// ---------------------------------------------------------------------------
// Derivation ABox

bool DerivationAbox::add_pos(Ind s, int a) {
  inds.insert(s);
  if (!pos.insert({s, a}).second) return false;
  pos_by_concept.insert({a, s});
  return true;
}

bool DerivationAbox::add_neg(Ind s, int a) {
  inds.insert(s);
  return neg.insert({s, a}).second;
}

bool DerivationAbox::add_atl(Ind s, int d) {
  inds.insert(s);
  return atl.insert({s, d}).second;
}

bool DerivationAbox::add_role(Ind s, int r, Ind t) {
  inds.insert(s);
  inds.insert(t);
  if (!out.insert({s, r, t}).second) return false;
  in.insert({t, r, s});
  return true;
}

bool DerivationAbox::add_nrole(Ind s, int r, Ind t) {
  inds.insert(s);
  inds.insert(t);
  return nrole.insert({s, r, t}).second;
}

bool DerivationAbox::add_neq(Ind s, Ind t) {
  inds.insert(s);
  inds.insert(t);
  return neq.insert({std::min(s, t), std::max(s, t)}).second;
}

bool DerivationAbox::add_eq(Ind s, Ind t) {
  inds.insert(s);
  inds.insert(t);
  if (has_eq(s, t)) return false;
  return eq.insert({s, t}).second;
}

std::vector<int> DerivationAbox::label(Ind s) const {
  std::vector<int> out_label;
  for (auto it = pos.lower_bound({s, INT_MIN}); it != pos.end() && it->first == s; ++it) out_label.push_back(it->second);
  return out_label;
}

std::vector<int> DerivationAbox::edge_label(Ind s, Ind t) const {
  std::vector<int> l;
  for (auto it = out.lower_bound({s, INT_MIN, INT_MIN}); it != out.end() && (*it)[0] == s; ++it)
    if ((*it)[2] == t) l.push_back((*it)[1]);
  return l;
}

std::vector<std::pair<int, Ind>> DerivationAbox::successors(Ind s) const {
  std::vector<std::pair<int, Ind>> r;
  for (auto it = out.lower_bound({s, INT_MIN, INT_MIN}); it != out.end() && (*it)[0] == s; ++it)
    r.emplace_back((*it)[1], (*it)[2]);
  return r;
}

std::vector<std::pair<int, Ind>> DerivationAbox::predecessors(Ind s) const {
  std::vector<std::pair<int, Ind>> r;
  for (auto it = in.lower_bound({s, INT_MIN, INT_MIN}); it != in.end() && (*it)[0] == s; ++it)
    r.emplace_back((*it)[1], (*it)[2]);
  return r;
}

std::set<Ind> DerivationAbox::neighbours(Ind s) const {
  std::set<Ind> r;
  for (auto& [role, t] : successors(s)) r.insert(t);
  for (auto& [role, t] : predecessors(s)) r.insert(t);
  for (auto it = nrole.begin(); it != nrole.end(); ++it) {
    if ((*it)[0] == s) r.insert((*it)[2]);
    if ((*it)[2] == s) r.insert((*it)[0]);
  }
  for (auto& [x, y] : neq) {
    if (x == s) r.insert(y);
    if (y == s) r.insert(x);
  }
  for (auto& [x, y] : eq) {
    if (x == s) r.insert(y);
    if (y == s) r.insert(x);
  }
  r.erase(s);
  return r;
}

std::size_t DerivationAbox::assertion_count() const {
  return pos.size() + neg.size() + atl.size() + out.size() + nrole.size() + neq.size() + eq.size() + (clash ? 1 : 0);
}

// ---------------------------------------------------------------------------
// Tableau

Tableau::Tableau(const RuleSet& rules, TableauOptions opt) : opt_(std::move(opt)) {
  for (auto& name : opt_.gamma_roles) gamma_role_ids_.insert(vocab_.role_id(name));
  for (auto& r : rules) {
    if (auto err = validate_ht_shape(r)) throw UnsupportedConstruct("rule " + render(r) + ": " + *err);
    CompiledRule c;
    Var k = max_branch_var(r);
    c.vars.resize(static_cast<std::size_t>(k) + 1);
    for (auto& a : r.body) {
      if (auto* ca = std::get_if<ConceptAtom>(&a)) {
        int id = vocab_.concept_id(ca->c.name);
        if (ca->var == kCenter) c.center.push_back(id);
        else c.vars[ca->var].concepts.push_back(id);
      } else if (auto* ra = std::get_if<RoleAtom>(&a)) {
        int id = vocab_.role_id(ra->role);
        if (ra->from == kCenter) c.vars[ra->to].roles.push_back({id, true});
        else c.vars[ra->from].roles.push_back({id, false});
      }
    }
    for (auto& a : r.head) {
      HeadAtom h{HeadAtom::Kind::Concept};
      if (auto* ca = std::get_if<ConceptAtom>(&a)) {
        if (ca->c.kind == RuleConcept::Kind::AtLeast) {
          AtLeastDef d;
          d.n = ca->c.n;
          d.role = vocab_.role_id(ca->c.role.base);
          d.inverse = ca->c.role.inverted;
          d.filler = ca->c.filler.kind;
          if (d.filler != FillerKind::Top) d.filler_concept = vocab_.concept_id(ca->c.filler.name);
          h = {HeadAtom::Kind::AtLeast, vocab_.at_least_id(d), ca->var, 0};
        } else {
          h = {HeadAtom::Kind::Concept, vocab_.concept_id(ca->c.name), ca->var, 0};
        }
      } else if (auto* ra = std::get_if<RoleAtom>(&a)) {
        h = {HeadAtom::Kind::Role, vocab_.role_id(ra->role), ra->from, ra->to};
      } else {
        auto& e = std::get<EqAtom>(a);
        h = {HeadAtom::Kind::Eq, -1, e.a, e.b};
      }
      c.head.push_back(h);
    }
    rules_.push_back(std::move(c));
  }
}

DerivationAbox Tableau::load(const Abox& normalized) {
  DerivationAbox a;
  for (auto& as : normalized) {
    if (auto* x = std::get_if<ConceptAssertion>(&as)) {
      Ind s = inds_.named(x->ind);
      a.inds.insert(s);
      const Concept& c = x->c;
      if (c.kind() == ConceptKind::Atomic) a.add_pos(s, vocab_.concept_id(c.name()));
      else if (c.kind() == ConceptKind::Not && c.sub().is_atomic()) a.add_neg(s, vocab_.concept_id(c.sub().name()));
      else if (c.kind() == ConceptKind::Bottom) a.clash = true;
      else if (c.kind() != ConceptKind::Top) throw UnsupportedConstruct("ABox is not normalized: " + render(as));
    } else if (auto* x = std::get_if<RoleAssertion>(&as)) {
      Ind s = inds_.named(x->from), t = inds_.named(x->to);
      if (x->role.inverted) std::swap(s, t);
      a.add_role(s, vocab_.role_id(x->role.base), t);
    } else if (auto* x = std::get_if<NegRoleAssertion>(&as)) {
      Ind s = inds_.named(x->from), t = inds_.named(x->to);
      if (x->role.inverted) std::swap(s, t);
      a.add_nrole(s, vocab_.role_id(x->role.base), t);
    } else if (auto* x = std::get_if<Equality>(&as)) {
      a.add_eq(inds_.named(x->a), inds_.named(x->b));
    } else {
      auto& y = std::get<Inequality>(as);
      a.add_neq(inds_.named(y.a), inds_.named(y.b));
    }
  }
  return a;
}

Blocking Tableau::compute_blocking(const DerivationAbox& a) const {
  Blocking b;
  b.status.assign(inds_.size(), {});
  if (opt_.el) return b;
  using Key = std::tuple<std::vector<int>, std::vector<int>, std::vector<int>, std::vector<int>>;
  std::map<Key, Ind> blockers;
  auto meets_gamma = [&](const std::vector<int>& l) {
    return std::any_of(l.begin(), l.end(), [&](int r) { return gamma_role_ids_.count(r) > 0; });
  };
  for (Ind s : a.inds) {
    Ind p = inds_.parent(s);
    if (p >= 0 && b.blocked(p)) {
      b.status[s] = {BlockKind::Indirect, -1};
      continue;
    }
    if (!inds_.is_unnamed(s) || p < 0) continue;
    auto es = a.edge_label(s, p), ep = a.edge_label(p, s);
    if (opt_.blocking == BlockingMode::GammaRelevant && (meets_gamma(es) || meets_gamma(ep))) continue;
    Key key{a.label(s), a.label(p), std::move(es), std::move(ep)};
    auto it = blockers.find(key);
    if (it != blockers.end()) b.status[s] = {BlockKind::Direct, it->second};
    else blockers.emplace(std::move(key), s);
  }
  return b;
}

void Tableau::merge(DerivationAbox& a, Ind s, Ind t) const {
  std::set<Ind> gone{s};
  for (Ind u : a.inds)
    if (inds_.is_descendant(u, s)) gone.insert(u);
  auto dead = [&](Ind u) { return u != s && gone.count(u) > 0; };
  auto ren = [&](Ind u) { return u == s ? t : u; };

  DerivationAbox r;
  r.clash = a.clash;
  for (Ind u : a.inds)
    if (!gone.count(u)) r.inds.insert(u);
  r.inds.insert(t);
  for (auto& [u, c] : a.pos)
    if (!dead(u)) r.add_pos(ren(u), c);
  for (auto& [u, c] : a.neg)
    if (!dead(u)) r.add_neg(ren(u), c);
  for (auto& [u, d] : a.atl)
    if (!dead(u)) r.add_atl(ren(u), d);
  for (auto& x : a.out)
    if (!dead(x[0]) && !dead(x[2])) r.add_role(ren(x[0]), x[1], ren(x[2]));
  for (auto& x : a.nrole)
    if (!dead(x[0]) && !dead(x[2])) r.add_nrole(ren(x[0]), x[1], ren(x[2]));
  for (auto& [u, v] : a.neq)
    if (!dead(u) && !dead(v)) r.add_neq(ren(u), ren(v));
  for (auto& [u, v] : a.eq)
    if (!dead(u) && !dead(v) && ren(u) != ren(v)) r.add_eq(ren(u), ren(v));
  a = std::move(r);
}

void Tableau::apply(DerivationAbox& a, const Fact& f) {
  using K = Fact::Kind;
  switch (f.kind) {
    case K::Pos: a.add_pos(f.s, f.sym); break;
    case K::Neg: a.add_neg(f.s, f.sym); break;
    case K::AtLeast: a.add_atl(f.s, f.sym); break;
    case K::Role: a.add_role(f.s, f.sym, f.t); break;
    case K::NegRole: a.add_nrole(f.s, f.sym, f.t); break;
    case K::Eq: a.add_eq(f.s, f.t); break;
    case K::Neq: a.add_neq(f.s, f.t); break;
    case K::Falsum: a.clash = true; break;
  }
}

bool Tableau::find_clash(const DerivationAbox& a, const Blocking& b) const {
  for (auto& [s, c] : a.neg)
    if (a.has_pos(s, c) && !b.indirectly(s)) return true;
  for (auto& x : a.nrole)
    if (a.has_role(x[0], x[1], x[2]) && !b.indirectly(x[0]) && !b.indirectly(x[2])) return true;
  for (auto& [s, t] : a.neq)
    if (s == t && !b.indirectly(s)) return true;
  return false;
}

std::optional<std::pair<Ind, Ind>> Tableau::find_equality(const DerivationAbox& a, const Blocking& b) const {
  for (auto& [s, t] : a.eq) {
    if (s == t || b.indirectly(s) || b.indirectly(t)) continue;
    if (inds_.is_named(t) || inds_.is_descendant(s, t)) return std::pair{s, t};
    return std::pair{t, s};
  }
  return std::nullopt;
}

bool Tableau::head_holds(const DerivationAbox& a, const HeadAtom& h, const std::vector<Ind>& sigma) const {
  switch (h.kind) {
    case HeadAtom::Kind::Concept: return a.has_pos(sigma[h.a], h.sym);
    case HeadAtom::Kind::AtLeast: return a.atl.count({sigma[h.a], h.sym}) > 0;
    case HeadAtom::Kind::Role: return a.has_role(sigma[h.a], h.sym, sigma[h.b]);
    case HeadAtom::Kind::Eq: return a.has_eq(sigma[h.a], sigma[h.b]);
  }
  return false;
}

Fact Tableau::head_fact(const HeadAtom& h, const std::vector<Ind>& sigma) const {
  switch (h.kind) {
    case HeadAtom::Kind::Concept: return {Fact::Kind::Pos, sigma[h.a], -1, h.sym};
    case HeadAtom::Kind::AtLeast: return {Fact::Kind::AtLeast, sigma[h.a], -1, h.sym};
    case HeadAtom::Kind::Role: return {Fact::Kind::Role, sigma[h.a], sigma[h.b], h.sym};
    case HeadAtom::Kind::Eq: return {Fact::Kind::Eq, sigma[h.a], sigma[h.b], -1};
  }
  return {};
}

std::optional<std::vector<Branch>> Tableau::find_hyp(const DerivationAbox& a, const Blocking& b) const {
  std::vector<Ind> centers;
  std::vector<std::vector<Ind>> cands;
  std::vector<Ind> sigma;
  for (auto& r : rules_) {
    centers.clear();
    if (!r.center.empty()) {
      int first = r.center.front();
      for (auto it = a.pos_by_concept.lower_bound({first, INT_MIN});
           it != a.pos_by_concept.end() && it->first == first; ++it)
        centers.push_back(it->second);
    } else {
      centers.assign(a.inds.begin(), a.inds.end());
    }
    std::size_t k = r.vars.size() - 1;
    for (Ind s : centers) {
      if (b.indirectly(s)) continue;
      bool ok = std::all_of(r.center.begin(), r.center.end(), [&](int c) { return a.has_pos(s, c); });
      if (!ok) continue;
      cands.assign(k + 1, {});
      for (std::size_t i = 1; i <= k && ok; ++i) {
        auto& spec = r.vars[i];
        auto [r0, subj0] = spec.roles.front();
        auto& index = subj0 ? a.out : a.in;
        for (auto it = index.lower_bound({s, r0, INT_MIN}); it != index.end() && (*it)[0] == s && (*it)[1] == r0; ++it) {
          Ind t = (*it)[2];
          if (b.indirectly(t)) continue;
          bool good = true;
          for (auto& [role, subj] : spec.roles)
            if (!(subj ? a.has_role(s, role, t) : a.has_role(t, role, s))) good = false;
          for (int c : spec.concepts)
            if (!a.has_pos(t, c)) good = false;
          if (good) cands[i].push_back(t);
        }
        if (cands[i].empty()) ok = false;
      }
      if (!ok) continue;
      std::vector<std::size_t> idx(k + 1, 0);
      sigma.assign(k + 1, s);
      while (true) {
        for (std::size_t i = 1; i <= k; ++i) sigma[i] = cands[i][idx[i]];
        bool satisfied = std::any_of(r.head.begin(), r.head.end(), [&](const HeadAtom& h) { return head_holds(a, h, sigma); });
        if (!satisfied) {
          std::vector<Branch> alts;
          if (r.head.empty()) alts.push_back({Fact{Fact::Kind::Falsum}});
          for (auto& h : r.head) alts.push_back({head_fact(h, sigma)});
          return alts;
        }
        std::size_t i = 1;
        while (i <= k && ++idx[i] == cands[i].size()) idx[i++] = 0;
        if (i > k) break;
      }
    }
  }
  return std::nullopt;
}

bool Tableau::filler_holds(const DerivationAbox& a, const AtLeastDef& d, Ind u) const {
  switch (d.filler) {
    case FillerKind::Top: return true;
    case FillerKind::Atomic: return a.has_pos(u, d.filler_concept);
    case FillerKind::Negated: return a.has_neg(u, d.filler_concept);
  }
  return false;
}

namespace {

// Is there a set of n pairwise-unequal candidates?
bool has_clique(const std::vector<Ind>& cands, unsigned n, const DerivationAbox& a) {
  if (n <= 1) return cands.size() >= n;
  std::vector<Ind> chosen;
  std::function<bool(std::size_t)> go = [&](std::size_t from) {
    if (chosen.size() == n) return true;
    for (std::size_t i = from; i < cands.size(); ++i) {
      bool ok = std::all_of(chosen.begin(), chosen.end(), [&](Ind c) { return a.has_neq(c, cands[i]); });
      if (!ok) continue;
      chosen.push_back(cands[i]);
      if (go(i + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  return go(0);
}

}  // namespace

std::optional<Branch> Tableau::find_expansion(DerivationAbox& a, const Blocking& b) {
  for (auto& [s, id] : a.atl) {
    const AtLeastDef& d = vocab_.at_least(id);
    if (opt_.el) {
      std::string key = d.filler == FillerKind::Top ? "" : vocab_.concept_name(d.filler_concept);
      Ind c = inds_.canonical(key);
      bool edge = d.inverse ? a.has_role(c, d.role, s) : a.has_role(s, d.role, c);
      if (edge && filler_holds(a, d, c)) continue;
      Branch br;
      if (d.inverse) br.push_back({Fact::Kind::Role, c, s, d.role});
      else br.push_back({Fact::Kind::Role, s, c, d.role});
      if (d.filler == FillerKind::Atomic) br.push_back({Fact::Kind::Pos, c, -1, d.filler_concept});
      if (d.filler == FillerKind::Negated) br.push_back({Fact::Kind::Neg, c, -1, d.filler_concept});
      if (d.filler == FillerKind::Top) a.inds.insert(c);
      return br;
    }
    if (b.blocked(s)) continue;
    std::vector<Ind> cands;
    auto& index = d.inverse ? a.in : a.out;
    for (auto it = index.lower_bound({s, d.role, INT_MIN}); it != index.end() && (*it)[0] == s && (*it)[1] == d.role; ++it)
      if (filler_holds(a, d, (*it)[2])) cands.push_back((*it)[2]);
    if (has_clique(cands, d.n, a)) continue;
    Branch br;
    std::vector<Ind> fresh;
    for (unsigned i = 0; i < d.n; ++i) {
      Ind t = inds_.fresh_child(s);
      fresh.push_back(t);
      if (d.inverse) br.push_back({Fact::Kind::Role, t, s, d.role});
      else br.push_back({Fact::Kind::Role, s, t, d.role});
      if (d.filler == FillerKind::Atomic) br.push_back({Fact::Kind::Pos, t, -1, d.filler_concept});
      if (d.filler == FillerKind::Negated) br.push_back({Fact::Kind::Neg, t, -1, d.filler_concept});
    }
    for (std::size_t i = 0; i < fresh.size(); ++i)
      for (std::size_t j = i + 1; j < fresh.size(); ++j) br.push_back({Fact::Kind::Neq, fresh[i], fresh[j], -1});
    if (inds_.size() > opt_.max_individuals) throw ResourceLimit("individual limit exceeded");
    return br;
  }
  return std::nullopt;
}

bool Tableau::saturate(DerivationAbox& a, std::optional<DerivationAbox>& leaf) {
  while (true) {
    if (a.clash) return false;
    stats_.max_individuals = std::max<std::uint64_t>(stats_.max_individuals, a.inds.size());
    if (opt_.check_invariants && !opt_.el) check_ht_abox(a);
    Blocking b = compute_blocking(a);
    if (++stats_.rule_apps > opt_.max_rule_apps) throw ResourceLimit("rule application limit exceeded");
    if (find_clash(a, b)) {
      a.clash = true;
      return false;
    }
    if (auto e = find_equality(a, b)) {
      merge(a, e->first, e->second);
      continue;
    }
    auto alts = find_hyp(a, b);
    if (!alts && opt_.hook && opt_.hook_before_expansion) alts = opt_.hook->step(*this, a, b);
    if (!alts) {
      if (auto br = find_expansion(a, b)) alts = std::vector<Branch>{std::move(*br)};
    }
    if (!alts && opt_.hook && !opt_.hook_before_expansion) alts = opt_.hook->step(*this, a, b);
    if (!alts) {
      --stats_.rule_apps;
      leaf = a;
      return true;
    }
    if (alts->size() == 1) {
      for (auto& f : alts->front()) apply(a, f);
      continue;
    }
    for (std::size_t i = 0; i < alts->size(); ++i) {
      if (i > 0) ++stats_.branches;
      DerivationAbox c = a;
      for (auto& f : (*alts)[i]) apply(c, f);
      if (saturate(c, leaf)) return true;
    }
    return false;
  }
}

SatResult Tableau::run(DerivationAbox initial) {
  stats_ = {};
  SatResult r;
  std::optional<DerivationAbox> leaf;
  r.sat = saturate(initial, leaf);
  if (r.sat && leaf) {
    r.leaf = to_abox(*leaf);
    r.leaf_state = std::move(leaf);
  }
  r.stats = stats_;
  return r;
}

void Tableau::check_ht_abox(const DerivationAbox& a) const {
  auto fail = [&](const std::string& what) { throw InvariantViolation("not an HT-ABox: " + what); };
  auto parent_child = [&](Ind s, Ind t) { return inds_.parent(t) == s || inds_.parent(s) == t; };
  for (auto& x : a.out) {
    bool named = inds_.is_named(x[0]) && inds_.is_named(x[2]);
    if (!named && !parent_child(x[0], x[2]))
      fail("role assertion " + individual_name(x[0]) + " -> " + individual_name(x[2]));
  }
  for (Ind u : a.inds) {
    if (!inds_.is_unnamed(u)) continue;
    Ind p = inds_.parent(u);
    if (a.edge_label(p, u).empty() && a.edge_label(u, p).empty())
      fail("individual " + individual_name(u) + " has no role assertion with its predecessor");
  }
  for (auto& [s, t] : a.eq) {
    auto ok = [&](Ind u, Ind v) {
      if (u == v) return true;
      if (inds_.is_unnamed(u) && inds_.is_unnamed(v) && inds_.parent(u) == inds_.parent(v)) return true;
      if (inds_.is_unnamed(u) && inds_.parent(u) >= 0 && inds_.parent(inds_.parent(u)) == v) return true;
      if (inds_.is_named(u) && inds_.is_unnamed(v) && inds_.is_named(inds_.parent(v))) return true;
      return inds_.is_named(u) && inds_.is_named(v);
    };
    if (!ok(s, t) && !ok(t, s)) fail("equality " + individual_name(s) + " = " + individual_name(t));
  }
}

std::string Tableau::individual_name(Ind s) const { return inds_.name(s); }

Abox Tableau::to_abox(const DerivationAbox& a) const {
  Abox out;
  auto n = [&](Ind s) { return individual_name(s); };
  for (auto& [s, c] : a.pos) out.push_back(ConceptAssertion{Concept::atomic(vocab_.concept_name(c)), n(s)});
  for (auto& [s, c] : a.neg)
    out.push_back(ConceptAssertion{Concept::negation(Concept::atomic(vocab_.concept_name(c))), n(s)});
  for (auto& [s, id] : a.atl) {
    const AtLeastDef& d = vocab_.at_least(id);
    Concept f = d.filler == FillerKind::Top ? Concept::top()
                : d.filler == FillerKind::Atomic
                    ? Concept::atomic(vocab_.concept_name(d.filler_concept))
                    : Concept::negation(Concept::atomic(vocab_.concept_name(d.filler_concept)));
    Role r{vocab_.role_name(d.role), d.inverse};
    Concept c = d.n == 1 ? Concept::exists(r, f) : Concept::at_least(d.n, r, f);
    out.push_back(ConceptAssertion{c, n(s)});
  }
  for (auto& x : a.out) out.push_back(RoleAssertion{Role{vocab_.role_name(x[1])}, n(x[0]), n(x[2])});
  for (auto& x : a.nrole) out.push_back(NegRoleAssertion{Role{vocab_.role_name(x[1])}, n(x[0]), n(x[2])});
  for (auto& [s, t] : a.neq) out.push_back(Inequality{n(s), n(t)});
  for (auto& [s, t] : a.eq) out.push_back(Equality{n(s), n(t)});
  return out;
}

SatResult check_sat(const RuleSet& rules, const Abox& normalized, TableauOptions opt) {
  Tableau t(rules, std::move(opt));
  return t.run(t.load(normalized));
}

SatResult check_sat_el(const RuleSet& rules, const Abox& normalized, TableauOptions opt) {
  opt.el = true;
  for (auto& r : rules)
    if (!is_el_rule(r)) throw UnsupportedConstruct("not an EL-rule: " + render(r));
  return check_sat(rules, normalized, std::move(opt));
}

SatResult check_sat_kb(const KnowledgeBase& kb, TableauOptions opt) {
  auto c = clausify_alchiq(kb);
  return check_sat(c.rules, c.abox, std::move(opt));
}

}  // namespace ibq
