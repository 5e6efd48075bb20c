// Replacement of Γ-modal concepts by fresh atomic names and query expansion.
#include <functional>
#include <map>

#include "ibq/oracle.hpp"

namespace ibq {
namespace {

Concept rebuild(const Concept& c, const std::function<Concept(const Concept&)>& f) {
  switch (c.kind()) {
    case ConceptKind::Not: return Concept::negation(f(c.sub()));
    case ConceptKind::And: return Concept::conj(f(c.left()), f(c.right()));
    case ConceptKind::Or: return Concept::disj(f(c.left()), f(c.right()));
    case ConceptKind::Exists: return Concept::exists(c.role(), f(c.sub()));
    case ConceptKind::ForAll: return Concept::forall(c.role(), f(c.sub()));
    case ConceptKind::AtLeast: return Concept::at_least(c.number(), c.role(), f(c.sub()));
    case ConceptKind::AtMost: return Concept::at_most(c.number(), c.role(), f(c.sub()));
    default: return c;
  }
}

class Rewriter {
 public:
  Rewriter(const Signature& gamma, std::string prefix) : gamma_(gamma), prefix_(std::move(prefix)) {}

  Concept operator()(const Concept& c) {
    if (is_gamma_modal(c, gamma_)) {
      auto it = names_.find(c);
      if (it == names_.end()) {
        std::string name = prefix_ + std::to_string(names_.size() + 1);
        it = names_.emplace(c, name).first;
        expansion.emplace(name, c);
      }
      return Concept::atomic(it->second);
    }
    return rebuild(c, [this](const Concept& s) { return (*this)(s); });
  }

  std::map<std::string, Concept> expansion;

 private:
  const Signature& gamma_;
  std::string prefix_;
  std::map<Concept, std::string> names_;
};

bool has_nominal(const Concept& c) {
  if (c.kind() == ConceptKind::Atomic) return c.is_nominal();
  bool found = false;
  rebuild(c, [&](const Concept& s) {
    found = found || has_nominal(s);
    return s;
  });
  return found;
}

class ExpandingBackend : public OracleBackend {
 public:
  ExpandingBackend(OracleHandle inner, Signature gamma, std::map<std::string, Concept> expansion)
      : inner_(std::move(inner)), gamma_(std::move(gamma)), expansion_(std::move(expansion)) {}
  OracleType type() const override { return inner_.type(); }
  const Signature& gamma() const override { return gamma_; }
  LogicProfile logic() const override { return inner_.logic(); }
  bool csat(const Concept& c) override { return inner_.csat(expand(c, expansion_)); }
  bool asat(const Abox& a) override { return inner_.asat(expand(a, expansion_)); }
  bool aent(const Abox& a, const Target& alpha) override {
    Target t = alpha;
    if (t) t = expand(Abox{*t}, expansion_).front();
    return inner_.aent(expand(a, expansion_), t);
  }

 private:
  OracleHandle inner_;
  Signature gamma_;
  std::map<std::string, Concept> expansion_;
};

}  // namespace

bool is_gamma_modal(const Concept& c, const Signature& gamma) {
  switch (c.kind()) {
    case ConceptKind::Exists:
    case ConceptKind::ForAll:
    case ConceptKind::AtLeast:
    case ConceptKind::AtMost: break;
    default: return false;
  }
  return !has_nominal(c) && signature_of(c).subset_of(gamma);
}

ModalRewrite gamma_modal_rewrite(const KnowledgeBase& visible, const Signature& gamma, const std::string& prefix) {
  Rewriter rw(gamma, prefix);
  ModalRewrite out;
  out.kb = visible;
  for (auto& ax : out.kb.tbox) {
    if (auto* ci = std::get_if<ConceptInclusion>(&ax)) {
      ci->sub = rw(ci->sub);
      ci->sup = rw(ci->sup);
    } else if (auto* ce = std::get_if<ConceptEquivalence>(&ax)) {
      ce->lhs = rw(ce->lhs);
      ce->rhs = rw(ce->rhs);
    }
  }
  for (auto& as : out.kb.abox)
    if (auto* ca = std::get_if<ConceptAssertion>(&as)) ca->c = rw(ca->c);
  out.gamma = gamma;
  for (auto& [name, c] : rw.expansion) out.gamma.concepts.insert(name);
  out.expansion = std::move(rw.expansion);
  return out;
}

Concept expand(const Concept& c, const std::map<std::string, Concept>& expansion) {
  if (c.kind() == ConceptKind::Atomic) {
    auto it = expansion.find(c.name());
    return it == expansion.end() ? c : it->second;
  }
  return rebuild(c, [&](const Concept& s) { return expand(s, expansion); });
}

Abox expand(const Abox& a, const std::map<std::string, Concept>& expansion) {
  Abox out = a;
  for (auto& as : out)
    if (auto* ca = std::get_if<ConceptAssertion>(&as)) ca->c = expand(ca->c, expansion);
  return out;
}

OracleHandle expanding_oracle(const OracleHandle& inner, const Signature& extended_gamma,
                              std::map<std::string, Concept> expansion) {
  if (expansion.empty()) return inner;
  return inner.sharing_log(std::make_shared<ExpandingBackend>(inner, extended_gamma, std::move(expansion)));
}

}  // namespace ibq
