#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ibq/rules.hpp"
#include "ibq/syntax.hpp"

namespace ibq {

struct ResourceLimit : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using Ind = int;

enum class IndKind : std::uint8_t { Named, Unnamed, Canonical };

struct IndividualInfo {
  IndKind kind = IndKind::Named;
  Ind parent = -1;
  std::string name;  // named individual name, canonical key, or path
};

// Append-only table shared by all branches of one derivation. Ids follow
// creation order, which extends the ancestor relation.
class IndividualTable {
 public:
  Ind named(const std::string& name);
  Ind canonical(const std::string& key);  // a_A; key "" stands for ⊤
  Ind fresh_child(Ind parent);

  const IndividualInfo& info(Ind s) const { return infos_.at(s); }
  bool is_named(Ind s) const { return info(s).kind == IndKind::Named; }
  bool is_unnamed(Ind s) const { return info(s).kind == IndKind::Unnamed; }
  Ind parent(Ind s) const { return info(s).parent; }
  bool is_descendant(Ind s, Ind t) const;  // s strictly below t
  const std::string& name(Ind s) const { return info(s).name; }
  std::size_t size() const { return infos_.size(); }
  std::optional<Ind> find_named(const std::string& name) const;

 private:
  std::vector<IndividualInfo> infos_;
  std::vector<int> child_count_;
  std::map<std::string, Ind> named_, canonical_;
};

struct AtLeastDef {
  unsigned n = 1;
  int role = -1;
  bool inverse = false;
  FillerKind filler = FillerKind::Top;
  int filler_concept = -1;
  auto operator<=>(const AtLeastDef&) const = default;
};

class Vocabulary {
 public:
  int concept_id(const std::string& name);
  int role_id(const std::string& name);
  int at_least_id(const AtLeastDef& d);
  std::optional<int> find_concept(const std::string& name) const;
  std::optional<int> find_role(const std::string& name) const;

  const std::string& concept_name(int id) const { return concepts_.at(id); }
  const std::string& role_name(int id) const { return roles_.at(id); }
  const AtLeastDef& at_least(int id) const { return at_least_.at(id); }
  std::size_t concept_count() const { return concepts_.size(); }
  std::size_t role_count() const { return roles_.size(); }

 private:
  std::vector<std::string> concepts_, roles_;
  std::vector<AtLeastDef> at_least_;
  std::map<std::string, int> concept_ids_, role_ids_;
  std::map<AtLeastDef, int> at_least_ids_;
};

using Triple = std::array<int, 3>;  // (s, R, t)

// One node label of a derivation. Plain value type; branches copy it.
struct DerivationAbox {
  std::set<Ind> inds;
  std::set<std::pair<Ind, int>> pos, neg, atl;  // A(s), ¬A(s), ≥n R.C(s)
  std::set<std::pair<int, Ind>> pos_by_concept;
  std::set<Triple> out;    // R(s,t) as (s,R,t)
  std::set<Triple> in;     // R(s,t) as (t,R,s)
  std::set<Triple> nrole;  // ¬R(s,t)
  std::set<std::pair<Ind, Ind>> neq;  // normalized (min, max)
  std::set<std::pair<Ind, Ind>> eq;   // pending s ≈ t, as derived
  bool clash = false;

  bool has_pos(Ind s, int a) const { return pos.count({s, a}) > 0; }
  bool has_neg(Ind s, int a) const { return neg.count({s, a}) > 0; }
  bool has_role(Ind s, int r, Ind t) const { return out.count({s, r, t}) > 0; }
  bool has_nrole(Ind s, int r, Ind t) const { return nrole.count({s, r, t}) > 0; }
  bool has_neq(Ind s, Ind t) const { return neq.count({std::min(s, t), std::max(s, t)}) > 0; }
  bool has_eq(Ind s, Ind t) const { return s == t || eq.count({s, t}) > 0 || eq.count({t, s}) > 0; }

  bool add_pos(Ind s, int a);
  bool add_neg(Ind s, int a);
  bool add_atl(Ind s, int d);
  bool add_role(Ind s, int r, Ind t);
  bool add_nrole(Ind s, int r, Ind t);
  bool add_neq(Ind s, Ind t);
  bool add_eq(Ind s, Ind t);

  std::vector<int> label(Ind s) const;             // L(s)
  std::vector<int> edge_label(Ind s, Ind t) const;  // L(s,t)
  std::vector<std::pair<int, Ind>> successors(Ind s) const;    // (R, t) with R(s,t)
  std::vector<std::pair<int, Ind>> predecessors(Ind s) const;  // (R, t) with R(t,s)
  std::set<Ind> neighbours(Ind s) const;
  std::size_t assertion_count() const;
};

enum class BlockKind : std::uint8_t { Unblocked, Direct, Indirect };

struct BlockStatus {
  BlockKind kind = BlockKind::Unblocked;
  Ind blocker = -1;
};

struct Blocking {
  std::vector<BlockStatus> status;  // indexed by Ind
  bool blocked(Ind s) const { return s < static_cast<Ind>(status.size()) && status[s].kind != BlockKind::Unblocked; }
  bool indirectly(Ind s) const { return s < static_cast<Ind>(status.size()) && status[s].kind == BlockKind::Indirect; }
};

enum class BlockingMode : std::uint8_t { Standard, GammaRelevant };

// A fact to add to a derivation ABox.
struct Fact {
  enum class Kind : std::uint8_t { Pos, Neg, AtLeast, Role, NegRole, Eq, Neq, Falsum };
  Kind kind = Kind::Falsum;
  Ind s = -1, t = -1;
  int sym = -1;
};
using Branch = std::vector<Fact>;

class Tableau;

// Extension point for additional derivation rules. step returns nullopt when
// not applicable, otherwise the alternatives (one entry means deterministic).
class DerivationHook {
 public:
  virtual ~DerivationHook() = default;
  virtual std::optional<std::vector<Branch>> step(const Tableau& t, const DerivationAbox& a, const Blocking& b) = 0;
};

struct TableauStats {
  std::uint64_t rule_apps = 0;
  std::uint64_t branches = 1;
  std::uint64_t max_individuals = 0;
};

struct TableauOptions {
  BlockingMode blocking = BlockingMode::Standard;
  std::set<std::string> gamma_roles;  // for GammaRelevant blocking
  bool el = false;                    // Def. 2 calculus with canonical individuals
  DerivationHook* hook = nullptr;
  bool hook_before_expansion = true;  // false: ≥/∃ saturate before the hook
  std::uint64_t max_rule_apps = 20'000'000;
  std::size_t max_individuals = 100'000;
#ifdef NDEBUG
  bool check_invariants = false;
#else
  bool check_invariants = true;
#endif
};

struct SatResult {
  bool sat = false;
  Abox leaf;  // clash-free leaf rendered with individual names (Sat only)
  std::optional<DerivationAbox> leaf_state;
  TableauStats stats;
};

// Raised by the invariant checker when an ABox is not an HT-ABox.
struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

class Tableau {
 public:
  explicit Tableau(const RuleSet& rules, TableauOptions opt = {});

  DerivationAbox load(const Abox& normalized);
  SatResult run(DerivationAbox initial);

  Blocking compute_blocking(const DerivationAbox& a) const;
  void merge(DerivationAbox& a, Ind s, Ind t) const;  // prune(s), then s -> t
  void apply(DerivationAbox& a, const Fact& f);
  void check_ht_abox(const DerivationAbox& a) const;  // throws InvariantViolation

  Abox to_abox(const DerivationAbox& a) const;
  std::string individual_name(Ind s) const;

  Vocabulary& vocab() { return vocab_; }
  const Vocabulary& vocab() const { return vocab_; }
  IndividualTable& individuals() { return inds_; }
  const IndividualTable& individuals() const { return inds_; }
  const TableauOptions& options() const { return opt_; }
  const TableauStats& stats() const { return stats_; }

 private:
  struct VarSpec {
    std::vector<std::pair<int, bool>> roles;  // (R, x is subject)
    std::vector<int> concepts;
  };
  struct HeadAtom {
    enum class Kind : std::uint8_t { Concept, AtLeast, Role, Eq } kind;
    int sym = -1;
    Var a = 0, b = 0;
  };
  struct CompiledRule {
    std::vector<int> center;
    std::vector<VarSpec> vars;  // index 0 unused
    std::vector<HeadAtom> head;
  };

  bool find_clash(const DerivationAbox& a, const Blocking& b) const;
  std::optional<std::pair<Ind, Ind>> find_equality(const DerivationAbox& a, const Blocking& b) const;
  std::optional<std::vector<Branch>> find_hyp(const DerivationAbox& a, const Blocking& b) const;
  std::optional<Branch> find_expansion(DerivationAbox& a, const Blocking& b);
  bool filler_holds(const DerivationAbox& a, const AtLeastDef& d, Ind u) const;
  bool head_holds(const DerivationAbox& a, const HeadAtom& h, const std::vector<Ind>& sigma) const;
  Fact head_fact(const HeadAtom& h, const std::vector<Ind>& sigma) const;
  bool saturate(DerivationAbox& a, std::optional<DerivationAbox>& leaf);

  TableauOptions opt_;
  Vocabulary vocab_;
  IndividualTable inds_;
  std::vector<CompiledRule> rules_;
  std::set<int> gamma_role_ids_;
  TableauStats stats_;
};

// Convenience entry points.
SatResult check_sat(const RuleSet& rules, const Abox& normalized, TableauOptions opt = {});
SatResult check_sat_el(const RuleSet& rules, const Abox& normalized, TableauOptions opt = {});
SatResult check_sat_kb(const KnowledgeBase& kb, TableauOptions opt = {});

enum class BruteResult : std::uint8_t { Sat, Unsat, Unknown };

// Bounded model search: Sat if a model with at most max_domain elements
// exists, Unsat if none does, Unknown if the search budget runs out.
BruteResult brute_force_sat(const KnowledgeBase& kb, int max_domain, std::uint64_t budget = 2'000'000);
BruteResult brute_force_sat(const RuleSet& rules, const Abox& normalized, int max_domain,
                            std::uint64_t budget = 2'000'000);

}  // namespace ibq
