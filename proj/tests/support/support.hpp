#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ibq/admissibility.hpp"
#include "ibq/engine.hpp"
#include "ibq/local_oracle.hpp"
#include "ibq/oracle.hpp"
#include "ibq/rules.hpp"
#include "ibq/syntax.hpp"
#include "ibq/tableau.hpp"
#include "ibq/text.hpp"

namespace ibq::testing {

std::string fixture_path(const std::string& name);
KnowledgeBase load_kb(const std::string& fixture);
Signature load_sig(const std::string& fixture);
KnowledgeBase kb(const std::string& text);
Signature sig(std::vector<std::string> concepts, std::vector<std::string> roles);

// Union of TBoxes and ABoxes; the profile is re-inferred.
KnowledgeBase merge(const KnowledgeBase& a, const KnowledgeBase& b);

// Ground truth for import runs: plain hypertableau over the union.
bool direct_sat(const KnowledgeBase& visible, const KnowledgeBase& hidden);

// Every query reaching the hidden side is checked here, independently of
// OracleHandle validation: signature within Γ and connected.
class RecordingBackend : public OracleBackend {
 public:
  RecordingBackend(std::shared_ptr<OracleBackend> inner, Signature gamma);

  OracleType type() const override { return inner_->type(); }
  const Signature& gamma() const override { return inner_->gamma(); }
  LogicProfile logic() const override { return inner_->logic(); }
  bool csat(const Concept& c) override;
  bool asat(const Abox& a) override;
  bool aent(const Abox& a, const Target& alpha) override;

  struct Query {
    OracleType kind;
    Abox abox;
    Target target;
    std::optional<Concept> concept_query;
  };
  std::vector<Query> queries() const;
  std::vector<std::string> violations() const;

 private:
  void check(const Abox& a, const Target& t, const std::string& what);
  std::shared_ptr<OracleBackend> inner_;
  Signature gamma_;
  mutable std::mutex mu_;
  std::vector<Query> queries_;
  std::vector<std::string> violations_;
};

// Local oracle over `hidden` wrapped by a RecordingBackend.
std::pair<OracleHandle, std::shared_ptr<RecordingBackend>> recording_oracle(const KnowledgeBase& hidden,
                                                                            const Signature& gamma, OracleType type);

// Random instances. Symbols are C0.., R0..; a symbol outside Γ is renamed
// per side (V.. visible, H.. hidden) so that the two sides share only Γ.
enum class Family : std::uint8_t { El, Horn, Alchiq };

struct GenParams {
  int concepts = 6;
  int roles = 3;
  int visible_axioms = 8;
  int hidden_axioms = 8;
  int assertions = 3;
};

struct Instance {
  KnowledgeBase visible, hidden;
  Signature gamma;
  std::string describe() const;
};

Instance random_instance(std::mt19937& rng, Family f, const GenParams& p);
KnowledgeBase random_kb(std::mt19937& rng, Family f, int concepts, int roles, int axioms, int assertions,
                        const std::string& prefix, const Signature& gamma);

struct CorpusReport {
  int attempts = 0;
  int admissible = 0;  // instances actually run through ibq
  int agree = 0;
  int sat = 0;
  int unsat = 0;
  int invariant_violations = 0;
  int legality_violations = 0;
  int containment_checked = 0;
  int containment_failures = 0;
  int resource_trips = 0;
  std::vector<std::string> failures;  // first few, with the instance
  bool ok() const {
    return agree == admissible && invariant_violations == 0 && legality_violations == 0 &&
           containment_failures == 0 && resource_trips == 0;
  }
  std::string summary() const;
};

// Draws instances until `target` admissible ones have been run or
// `max_attempts` is reached.
CorpusReport run_corpus(Family f, int target, std::uint32_t seed, int max_attempts, const GenParams& p = {});

// ElOmegaE leaf ⊆ direct EL leaf over the same visible clausification.
// Returns the first missing assertion, or nullopt.
std::optional<std::string> el_containment_gap(const Instance& inst);

// Independent bottom-up evaluation of an acyclicity program by naive
// grounding; equality is axiomatized explicitly rather than merged.
struct NaiveFixpoint {
  std::set<std::pair<std::string, std::vector<int>>> facts;
  bool harmful = false;
  std::set<int> witnesses;
};
NaiveFixpoint naive_fixpoint(const AcyclicityProgram& p);

// Chain family A0(a), Ai ⊑ ∃R.A(i+1) for i < n.
KnowledgeBase chain_visible(int n);

// Least-squares slope of log(y) against log(x).
double growth_exponent(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ibq::testing
