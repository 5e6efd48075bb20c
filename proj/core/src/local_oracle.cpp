#include "ibq/local_oracle.hpp"

#include "ibq/rules.hpp"

namespace ibq {
namespace {

class LocalBackend : public OracleBackend {
 public:
  LocalBackend(KnowledgeBase hidden, Signature gamma, OracleType type, TableauOptions opt)
      : hidden_(std::move(hidden)), gamma_(std::move(gamma)), type_(type), opt_(std::move(opt)) {
    logic_ = hidden_.logic_declared ? hidden_.logic : infer_profile(hidden_);
  }

  OracleType type() const override { return type_; }
  const Signature& gamma() const override { return gamma_; }
  LogicProfile logic() const override { return logic_; }

  bool csat(const Concept& c) override { return sat({ConceptAssertion{c, "i0"}}); }
  bool asat(const Abox& a) override { return sat(a); }
  bool aent(const Abox& a, const Target& alpha) override {
    Abox q = a;
    if (alpha) q.push_back(*negate(*alpha));
    return !sat(q);
  }

 private:
  bool sat(const Abox& a) const {
    KnowledgeBase kb;
    kb.tbox = hidden_.tbox;
    kb.abox = a;
    return check_sat_kb(kb, opt_).sat;
  }

  KnowledgeBase hidden_;
  Signature gamma_;
  OracleType type_;
  TableauOptions opt_;
  LogicProfile logic_;
};

}  // namespace

OracleHandle local_oracle(const KnowledgeBase& hidden, const Signature& gamma, OracleType type, TableauOptions opt) {
  if (!hidden.abox.empty()) throw UnsupportedConstruct("the hidden knowledge base must not contain assertions");
  if (!hidden.nominals.empty()) throw UnsupportedConstruct("the hidden TBox must not use nominals");
  LogicProfile p = infer_profile(hidden);
  if (p.O) throw UnsupportedConstruct("the hidden TBox must not use nominals");
  return OracleHandle(std::make_shared<LocalBackend>(hidden, gamma, type, std::move(opt)));
}

}  // namespace ibq
