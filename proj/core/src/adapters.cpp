// Reductions between the three oracle types.
#include <algorithm>
#include <functional>
#include <map>
#include <set>

#include "ibq/oracle.hpp"
#include "ibq/text.hpp"

namespace ibq {
namespace {

class AdaptedBackend : public OracleBackend {
 public:
  AdaptedBackend(OracleHandle inner, OracleType type) : inner_(std::move(inner)), type_(type) {}
  OracleType type() const override { return type_; }
  const Signature& gamma() const override { return inner_.gamma(); }
  LogicProfile logic() const override { return inner_.logic(); }

  bool asat(const Abox& a) override {
    switch (inner_.type()) {
      case OracleType::Asat: return inner_.asat(a);
      case OracleType::Aent: return !inner_.aent(a, std::nullopt);
      case OracleType::Csat: return concept_only_asat(inner_, a);
    }
    return false;
  }

  bool aent(const Abox& a, const Target& alpha) override {
    if (inner_.type() == OracleType::Aent) return inner_.aent(a, alpha);
    Abox q = a;
    if (alpha) q.push_back(*negate(*alpha));
    return !asat(q);
  }

  bool csat(const Concept& c) override {
    if (inner_.type() == OracleType::Csat) return inner_.csat(c);
    return asat({ConceptAssertion{c, "i0"}});
  }

 private:
  OracleHandle inner_;
  OracleType type_;
};

bool negation_free(const LogicProfile& p) { return p.horn || p.el || p.fl0; }

}  // namespace

bool can_adapt(OracleType from, OracleType want, const Signature& gamma, const LogicProfile& hidden) {
  if (from == want) return true;
  switch (want) {
    case OracleType::Csat: return true;
    case OracleType::Asat: return from == OracleType::Aent || gamma.roles.empty();
    case OracleType::Aent:
      if (negation_free(hidden)) return false;
      return from == OracleType::Asat || gamma.roles.empty();
  }
  return false;
}

OracleHandle adapt(const OracleHandle& o, OracleType want) {
  if (o.type() == want) return o;
  if (!can_adapt(o.type(), want, o.gamma(), o.logic()))
    throw NoReduction("no reduction from a " + to_string(o.type()) + " oracle to a " + to_string(want) +
                      " oracle for this public signature and hidden logic " + o.logic().name());
  return o.sharing_log(std::make_shared<AdaptedBackend>(o, want));
}

bool concept_only_asat(const OracleHandle& o, const Abox& a) {
  std::map<std::string, std::string> parent;
  std::function<std::string(const std::string&)> find = [&](const std::string& x) -> std::string {
    auto it = parent.find(x);
    if (it == parent.end() || it->second == x) return x;
    return it->second = find(it->second);
  };
  for (auto& as : a) {
    if (std::holds_alternative<RoleAssertion>(as) || std::holds_alternative<NegRoleAssertion>(as))
      throw SigViolation("role assertion in a query over a concept-only public signature");
    for (auto& i : individuals_of(as)) parent.emplace(i, i);
  }
  for (auto& as : a)
    if (auto* e = std::get_if<Equality>(&as)) {
      std::string x = find(e->a), y = find(e->b);
      if (x != y) parent[std::max(x, y)] = std::min(x, y);
    }
  std::map<std::string, std::set<Concept>> label;
  for (auto& as : a) {
    if (auto* n = std::get_if<Inequality>(&as); n && find(n->a) == find(n->b)) return false;
    if (auto* c = std::get_if<ConceptAssertion>(&as)) label[find(c->ind)].insert(c->c);
  }
  for (auto& [ind, concepts] : label) {
    std::optional<Concept> conj;
    for (auto& c : concepts) conj = conj ? Concept::conj(*conj, c) : c;
    if (!o.csat(*conj)) return false;
  }
  return true;
}

}  // namespace ibq
