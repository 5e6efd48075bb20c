#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>

#include "ibq/syntax.hpp"

namespace ibq {

enum class OracleType : std::uint8_t { Csat, Asat, Aent };

std::string to_string(OracleType t);
OracleType parse_oracle_type(const std::string& s);  // throws std::invalid_argument

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SigViolation : OracleError {
  using OracleError::OracleError;
};
struct NotConnected : OracleError {
  using OracleError::OracleError;
};
struct UnsupportedQueryForType : OracleError {
  using OracleError::OracleError;
};
struct NoReduction : OracleError {
  using OracleError::OracleError;
};

// Entailment target; nullopt is FALSUM.
using Target = std::optional<Assertion>;

std::string render_target(const Target& t);

// Raw answering service. Implementations never validate; OracleHandle does.
class OracleBackend {
 public:
  virtual ~OracleBackend() = default;
  virtual OracleType type() const = 0;
  virtual const Signature& gamma() const = 0;
  virtual LogicProfile logic() const = 0;
  virtual bool csat(const Concept& c) = 0;
  virtual bool asat(const Abox& a) = 0;
  virtual bool aent(const Abox& a, const Target& alpha) = 0;
};

struct QueryStats {
  std::uint64_t queries = 0;         // calls accepted by the handle
  std::uint64_t max_query_size = 0;  // assertions (targets included)
  std::uint64_t distinct = 0;        // cache misses forwarded to the backend
};

class QueryLog {
 public:
  void record(std::uint64_t size, bool miss);
  QueryStats snapshot() const;
  void reset();

 private:
  std::atomic<std::uint64_t> queries_{0}, max_size_{0}, distinct_{0};
};

// Canonical form of a query: individuals renamed i0, i1, ... in DFS order
// from the lexicographically least individual.
struct CanonicalQuery {
  Abox abox;
  Target target;
  std::string key;
};
CanonicalQuery canonicalize(const Abox& a, const Target& t = std::nullopt);

// Validating, caching front of an oracle. Copies share backend, cache and log.
class OracleHandle {
 public:
  OracleHandle() = default;
  explicit OracleHandle(std::shared_ptr<OracleBackend> backend);

  OracleType type() const { return backend_->type(); }
  const Signature& gamma() const { return backend_->gamma(); }
  LogicProfile logic() const { return backend_->logic(); }
  bool valid() const { return backend_ != nullptr; }

  bool csat(const Concept& c) const;
  bool asat(const Abox& a) const;
  bool aent(const Abox& a, const Target& alpha) const;

  // Validation only; throws SigViolation / NotConnected.
  void validate(const Abox& a, const Target& alpha = std::nullopt) const;
  void validate(const Concept& c) const;

  QueryLog& log() const { return *log_; }
  QueryStats stats() const { return log_->snapshot(); }
  std::shared_ptr<OracleBackend> backend() const { return backend_; }

  // Handle over `backend` that records into this handle's log (adapters).
  OracleHandle sharing_log(std::shared_ptr<OracleBackend> backend) const;

 private:
  struct Cache {
    std::mutex mu;
    std::map<std::string, bool> answers;
  };
  template <class F>
  bool cached(const std::string& key, std::uint64_t size, F&& compute) const;

  std::shared_ptr<OracleBackend> backend_;
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
  std::shared_ptr<QueryLog> log_ = std::make_shared<QueryLog>();
  bool log_calls_ = true;
};

// Negation of an assertion as an assertion, when expressible.
std::optional<Assertion> negate(const Assertion& a);

// Reductions between oracle types. Throws NoReduction when none applies.
OracleHandle adapt(const OracleHandle& o, OracleType want);
bool can_adapt(OracleType from, OracleType want, const Signature& gamma, const LogicProfile& hidden);

// ABox satisfiability from concept satisfiability for concept-only Γ.
bool concept_only_asat(const OracleHandle& csat_oracle, const Abox& a);

struct ModalRewrite {
  KnowledgeBase kb;
  Signature gamma;
  std::map<std::string, Concept> expansion;  // X_C -> C
};

bool is_gamma_modal(const Concept& c, const Signature& gamma);
ModalRewrite gamma_modal_rewrite(const KnowledgeBase& visible, const Signature& gamma,
                                 const std::string& prefix = "_x");

// Replaces X_C atoms by C in queries before forwarding to `inner`.
OracleHandle expanding_oracle(const OracleHandle& inner, const Signature& extended_gamma,
                              std::map<std::string, Concept> expansion);
Concept expand(const Concept& c, const std::map<std::string, Concept>& expansion);
Abox expand(const Abox& a, const std::map<std::string, Concept>& expansion);

}  // namespace ibq
