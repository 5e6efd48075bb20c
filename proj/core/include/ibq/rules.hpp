#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ibq/syntax.hpp"

namespace ibq {

// Rule variables: 0 is the center x, k >= 1 is the branch variable y_k.
using Var = int;
inline constexpr Var kCenter = 0;

enum class FillerKind : std::uint8_t { Top, Atomic, Negated };

struct Filler {
  FillerKind kind = FillerKind::Top;
  std::string name;
  auto operator<=>(const Filler&) const = default;
};

// A, ¬A, or ≥n R.F with F ∈ {⊤, A, ¬A}.
struct RuleConcept {
  enum class Kind : std::uint8_t { Atomic, Negated, AtLeast };
  Kind kind = Kind::Atomic;
  std::string name;
  unsigned n = 0;
  Role role;
  Filler filler;

  static RuleConcept atomic(std::string a) { return {Kind::Atomic, std::move(a), 0, {}, {}}; }
  static RuleConcept negated(std::string a) { return {Kind::Negated, std::move(a), 0, {}, {}}; }
  static RuleConcept at_least(unsigned n, Role r, Filler f) { return {Kind::AtLeast, "", n, std::move(r), std::move(f)}; }
  auto operator<=>(const RuleConcept&) const = default;
};

struct ConceptAtom {
  RuleConcept c;
  Var var = kCenter;
  auto operator<=>(const ConceptAtom&) const = default;
};
struct RoleAtom {
  std::string role;
  Var from = kCenter, to = 1;
  auto operator<=>(const RoleAtom&) const = default;
};
struct EqAtom {
  Var a = 1, b = 2;
  auto operator<=>(const EqAtom&) const = default;
};
using RuleAtom = std::variant<ConceptAtom, RoleAtom, EqAtom>;

struct HTRule {
  std::vector<RuleAtom> body;
  std::vector<RuleAtom> head;  // disjunction; empty means falsum
  bool operator==(const HTRule&) const = default;
};
using RuleSet = std::vector<HTRule>;

struct FeatureProfile {
  bool has_eq_heads = false;
  bool has_inverse_positions = false;
  bool has_role_heads = false;
  bool operator==(const FeatureProfile&) const = default;
};

struct ClausifyOptions {
  std::string fresh_prefix = "_q";
};

// Normalized ABox: A(a), ¬A(a), R(a,b), ¬R(a,b), a ≉ b with R atomic.
struct Clausified {
  RuleSet rules;
  Abox abox;
  std::map<std::string, Concept> fresh;  // fresh name -> source concept
};

Clausified clausify_alchiq(const KnowledgeBase& kb, const ClausifyOptions& opt = {});
Clausified clausify_el(const KnowledgeBase& kb, const ClausifyOptions& opt = {});

// Individual pieces used by callers that assemble their own KBs.
Abox normalize_abox(const Abox& a);

std::optional<std::string> validate_ht_shape(const HTRule& r);  // nullopt when Ok
bool is_el_rule(const HTRule& r);
bool is_horn(const RuleSet& rs);
FeatureProfile feature_profile(const RuleSet& rs);
Var max_branch_var(const HTRule& r);

Signature signature_of(const HTRule& r);
Signature signature_of(const RuleSet& rs);

std::string render(const RuleConcept& c);
std::string render(const RuleAtom& a, Var branch_count);
std::string render(const HTRule& r);
std::string render(const RuleSet& rs);

}  // namespace ibq
