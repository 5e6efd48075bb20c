#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ibq/admissibility.hpp"
#include "ibq/oracle.hpp"
#include "ibq/rules.hpp"
#include "ibq/syntax.hpp"
#include "ibq/tableau.hpp"

namespace ibq {

enum class IbqMode : std::uint8_t { AlchiqOmegaA, HornOmegaE, ElOmegaE };

std::string to_string(IbqMode m);
IbqMode parse_mode(const std::string& s);  // alchiq-a | horn-e | el-e

struct NoViableMode : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct AdmissibilityResult {
  SafetyReport safety;
  std::optional<CycleReport> cycle;  // absent for EL mode
  Verdict verdict = Verdict::Unknown;
  std::string reason;
};

struct Inadmissible : std::runtime_error {
  Inadmissible(AdmissibilityResult r, const std::string& what) : std::runtime_error(what), result(std::move(r)) {}
  AdmissibilityResult result;
};

IbqMode select_mode(const LogicProfile& visible, const LogicProfile& hidden, OracleType type, const Signature& gamma);

AdmissibilityResult check_admissible(const RuleSet& rv, const Abox& av, const Signature& gamma,
                                     const LogicProfile& hidden, IbqMode mode);

struct GammaProjection {
  Abox abox;
  std::vector<Abox> components;
};

GammaProjection project_gamma(const Tableau& t, const DerivationAbox& a, const Blocking& b, const Signature& gamma);

struct IbqOptions {
  bool assume_admissible = false;
#ifdef NDEBUG
  bool check_invariants = false;
#else
  bool check_invariants = true;
#endif
  std::uint64_t max_rule_apps = 20'000'000;
  std::size_t max_individuals = 100'000;
};

struct IbqResult {
  bool sat = false;
  IbqMode mode = IbqMode::AlchiqOmegaA;
  TableauStats stats;
  QueryStats queries;
  Abox leaf;
};

// Core algorithm over clausified input. Hidden content is reached only
// through `o`; the oracle is adapted to the type the mode needs.
IbqResult ibq_check_sat(const Signature& gamma, const RuleSet& rv, const Abox& av, const OracleHandle& o, IbqMode mode,
                        const IbqOptions& opt = {});

// Visible KB front end: Γ-modal rewriting, mode selection, clausification.
IbqResult import_check_sat(const KnowledgeBase& visible, const Signature& gamma, const OracleHandle& o,
                           std::optional<IbqMode> mode = std::nullopt, const IbqOptions& opt = {});

// visible ∪ hidden ⊨ sub ⊑ sup, decided by unsatisfiability of an
// augmented visible KB.
bool import_entails(const KnowledgeBase& visible, const Signature& gamma, const OracleHandle& o, const Concept& sub,
                    const Concept& sup, std::optional<IbqMode> mode = std::nullopt, const IbqOptions& opt = {},
                    IbqResult* result = nullptr);

}  // namespace ibq
