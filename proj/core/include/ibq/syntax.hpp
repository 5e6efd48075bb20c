#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ibq {

struct Role {
  std::string base;
  bool inverted = false;

  Role inverse() const { return Role{base, !inverted}; }
  auto operator<=>(const Role&) const = default;
};

enum class ConceptKind : std::uint8_t {
  Top,
  Bottom,
  Atomic,
  Not,
  And,
  Or,
  Exists,
  ForAll,
  AtLeast,
  AtMost,
};

// Immutable concept tree. Sugar kinds (Bottom, Or, Exists, ForAll, AtMost) are
// kept so that rendering reproduces the input; desugar() removes them.
class Concept {
 public:
  Concept();  // top

  static Concept top();
  static Concept bottom();
  static Concept atomic(std::string name, bool nominal = false);
  static Concept negation(Concept c);
  static Concept conj(Concept a, Concept b);
  static Concept disj(Concept a, Concept b);
  static Concept exists(Role r, Concept c);
  static Concept forall(Role r, Concept c);
  static Concept at_least(unsigned n, Role r, Concept c);
  static Concept at_most(unsigned n, Role r, Concept c);

  ConceptKind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  bool is_nominal() const { return node_->nominal; }
  unsigned number() const { return node_->n; }
  const Role& role() const { return node_->role; }
  // Operand of Not, filler of quantifiers, left side of And/Or.
  const Concept& sub() const { return *node_->lhs; }
  const Concept& left() const { return *node_->lhs; }
  const Concept& right() const { return *node_->rhs; }

  bool is_atomic() const { return kind() == ConceptKind::Atomic; }
  bool is_literal() const {
    return is_atomic() || (kind() == ConceptKind::Not && sub().is_atomic());
  }
  bool is_quantified() const;

  friend int compare(const Concept& a, const Concept& b);
  friend bool operator==(const Concept& a, const Concept& b) { return compare(a, b) == 0; }
  friend bool operator<(const Concept& a, const Concept& b) { return compare(a, b) < 0; }

 private:
  struct Node {
    ConceptKind kind = ConceptKind::Top;
    std::string name;
    bool nominal = false;
    unsigned n = 0;
    Role role;
    std::shared_ptr<const Concept> lhs, rhs;
  };
  explicit Concept(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Concept quantified(ConceptKind k, unsigned num, Role r, Concept c);
  std::shared_ptr<const Node> node_;
};

struct ConceptInclusion {
  Concept sub, sup;
};
struct ConceptEquivalence {
  Concept lhs, rhs;
};
struct RoleInclusion {
  Role sub, sup;
};
using TBoxAxiom = std::variant<ConceptInclusion, ConceptEquivalence, RoleInclusion>;

struct ConceptAssertion {
  Concept c;
  std::string ind;
};
struct RoleAssertion {
  Role role;
  std::string from, to;
};
struct NegRoleAssertion {
  Role role;
  std::string from, to;
};
struct Equality {
  std::string a, b;
};
struct Inequality {
  std::string a, b;
};
using Assertion =
    std::variant<ConceptAssertion, RoleAssertion, NegRoleAssertion, Equality, Inequality>;
using Abox = std::vector<Assertion>;

int compare(const TBoxAxiom& a, const TBoxAxiom& b);
int compare(const Assertion& a, const Assertion& b);
inline bool operator==(const TBoxAxiom& a, const TBoxAxiom& b) { return compare(a, b) == 0; }
inline bool operator==(const Assertion& a, const Assertion& b) { return compare(a, b) == 0; }

std::vector<std::string> individuals_of(const Assertion& a);
std::vector<std::string> individuals_of(const Abox& a);

struct LogicProfile {
  bool O = false, I = false, H = false, Q = false;
  bool horn = false, el = false, fl0 = false;

  static LogicProfile alchiq() { return {false, true, true, true, false, false, false}; }
  static LogicProfile parse(const std::string& text);  // throws std::invalid_argument
  std::string name() const;
  bool subsumed_by(const LogicProfile& other) const;
  auto operator<=>(const LogicProfile&) const = default;
};

struct KnowledgeBase {
  std::vector<TBoxAxiom> tbox;
  Abox abox;
  LogicProfile logic;
  bool logic_declared = false;
  std::vector<std::string> nominals;  // declared via `nominal NAME.`

  bool operator==(const KnowledgeBase& other) const;
};

struct Signature {
  std::set<std::string> concepts;
  std::set<std::string> roles;

  bool empty() const { return concepts.empty() && roles.empty(); }
  bool contains_concept(const std::string& n) const { return concepts.count(n) > 0; }
  bool contains_role(const std::string& n) const { return roles.count(n) > 0; }
  bool subset_of(const Signature& other) const;
  Signature& operator|=(const Signature& other);
  auto operator<=>(const Signature&) const = default;
};

// Concept-level sugar elimination: Top/Atomic/Not/And/AtLeast only.
Concept desugar(const Concept& c);
// Negation normal form over Top/Bottom/Atomic/Not(Atomic)/And/Or/AtLeast/AtMost.
Concept nnf(const Concept& c);
Concept nnf_negated(const Concept& c);

Signature signature_of(const Concept& c);
Signature signature_of(const TBoxAxiom& a);
Signature signature_of(const Assertion& a);
Signature signature_of(const Abox& a);
Signature signature_of(const KnowledgeBase& kb);

// Partition by connectivity of the individual co-occurrence graph.
std::vector<Abox> connected_components(const Abox& a);
bool is_connected(const Abox& a);

// Minimal profile covering the constructs used by kb.
LogicProfile infer_profile(const KnowledgeBase& kb);

// Substitute away positive equalities between named individuals (smaller name
// survives). Returns the rewritten ABox.
Abox eliminate_equalities(const Abox& a);

struct UnsupportedConstruct : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace ibq
