#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ibq/rules.hpp"
#include "ibq/syntax.hpp"

namespace ibq {

std::set<std::string> safe_concepts(const RuleSet& rv, const Signature& gamma);
RuleSet reduct(const RuleSet& rv, const Signature& gamma);

enum class Modularity : std::uint8_t { Proven, Unknown };
std::string to_string(Modularity m);

// Sufficient semantic-modularity test by ∅/Δ assignments to non-Γ symbols.
// `witness` receives the assignment (true = Δ) when Proven.
Modularity check_modularity_sufficient(const RuleSet& rules, const Signature& gamma,
                                       std::map<std::string, bool>* witness = nullptr);

enum class SafetyMode : std::uint8_t { Ht, El };
enum class Verdict : std::uint8_t { Admissible, Inadmissible, Unknown };
std::string to_string(Verdict v);

struct GuardViolation {
  std::size_t rule = 0;
  std::string role;
  char side = 'y';  // 'x' or 'y'
  Var var = 1;
};

struct SafetyReport {
  std::set<std::string> safe_set;
  RuleSet reduct;
  Modularity modularity = Modularity::Unknown;
  std::vector<GuardViolation> guard_violations;
  Verdict verdict = Verdict::Unknown;
  std::string reason;
};

SafetyReport check_safety(const RuleSet& rv, const Signature& gamma, SafetyMode mode);
std::string render(const SafetyReport& r, const RuleSet& rv);

// Function-free datalog with equality over the abstraction of rv ∪ av.
struct DTerm {
  bool is_var = true;
  int id = 0;  // variable index or constant id
  auto operator<=>(const DTerm&) const = default;
};

inline constexpr const char* kSucc = "Succ";
inline constexpr const char* kGammaDesc = "Gamma-Desc";
inline constexpr const char* kEq = "=";
// Active domain: binds the center of rules whose body does not mention it.
inline constexpr const char* kDomain = "Dom";

struct DAtom {
  std::string pred;
  std::vector<DTerm> args;
  auto operator<=>(const DAtom&) const = default;
};

struct DRule {
  std::vector<DAtom> body;
  std::vector<DAtom> head;  // conjunction
  std::string label;        // e.g. "existential rule 3", "functional out R,S"
  bool star = false;        // abstracted HT-rule: variable 0 is the center x
};

struct AcyclicityProgram {
  std::vector<std::string> constants;
  std::set<int> v_constants;  // ids of the v_A / v_¬A / v_⊤ constants
  std::vector<DAtom> facts;   // ground
  std::vector<DRule> rules;
  std::set<std::string> formulas;  // which rule families are present

  std::string render_atom(const DAtom& a) const;
  std::string render() const;
};

AcyclicityProgram build_acyclicity_program(const RuleSet& rv, const Abox& av, const Signature& gamma,
                                           const LogicProfile& hidden);

struct CycleReport {
  bool acyclic = true;
  std::optional<std::string> witness;  // v constant with Γ-Desc(v,v)
  std::size_t fact_count = 0;
  std::vector<std::string> trace;  // derivation of the witness self-loop
};

CycleReport detect_harmful_cycle(const AcyclicityProgram& p);
std::string render(const CycleReport& r);

}  // namespace ibq
