#include "ibq/oracle.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "ibq/text.hpp"

namespace ibq {

std::string to_string(OracleType t) {
  switch (t) {
    case OracleType::Csat: return "csat";
    case OracleType::Asat: return "asat";
    case OracleType::Aent: return "aent";
  }
  return "?";
}

OracleType parse_oracle_type(const std::string& s) {
  if (s == "csat") return OracleType::Csat;
  if (s == "asat") return OracleType::Asat;
  if (s == "aent") return OracleType::Aent;
  throw std::invalid_argument("unknown oracle type '" + s + "' (expected csat, asat or aent)");
}

std::string render_target(const Target& t) { return t ? render(*t) : std::string("FALSUM"); }

void QueryLog::record(std::uint64_t size, bool miss) {
  queries_.fetch_add(1, std::memory_order_relaxed);
  if (miss) distinct_.fetch_add(1, std::memory_order_relaxed);
  std::uint64_t cur = max_size_.load(std::memory_order_relaxed);
  while (size > cur && !max_size_.compare_exchange_weak(cur, size, std::memory_order_relaxed)) {
  }
}

QueryStats QueryLog::snapshot() const {
  return {queries_.load(), max_size_.load(), distinct_.load()};
}

void QueryLog::reset() {
  queries_ = 0;
  max_size_ = 0;
  distinct_ = 0;
}

namespace {

Assertion rename(const Assertion& a, const std::map<std::string, std::string>& m) {
  auto n = [&](const std::string& s) { return m.at(s); };
  return std::visit(
      [&](const auto& x) -> Assertion {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConceptAssertion>) return ConceptAssertion{x.c, n(x.ind)};
        else if constexpr (std::is_same_v<T, RoleAssertion>) return RoleAssertion{x.role, n(x.from), n(x.to)};
        else if constexpr (std::is_same_v<T, NegRoleAssertion>) return NegRoleAssertion{x.role, n(x.from), n(x.to)};
        else if constexpr (std::is_same_v<T, Equality>) return Equality{n(x.a), n(x.b)};
        else return Inequality{n(x.a), n(x.b)};
      },
      a);
}

bool has_nominal(const Concept& c) {
  if (c.kind() == ConceptKind::Atomic) return c.is_nominal();
  switch (c.kind()) {
    case ConceptKind::Not:
    case ConceptKind::Exists:
    case ConceptKind::ForAll:
    case ConceptKind::AtLeast:
    case ConceptKind::AtMost: return has_nominal(c.sub());
    case ConceptKind::And:
    case ConceptKind::Or: return has_nominal(c.left()) || has_nominal(c.right());
    default: return false;
  }
}

std::string describe_extra(const Signature& sig, const Signature& gamma) {
  std::string out;
  for (auto& c : sig.concepts)
    if (!gamma.contains_concept(c)) out += (out.empty() ? "" : ", ") + std::string("concept ") + c;
  for (auto& r : sig.roles)
    if (!gamma.contains_role(r)) out += (out.empty() ? "" : ", ") + std::string("role ") + r;
  return out;
}

}  // namespace

CanonicalQuery canonicalize(const Abox& a, const Target& t) {
  std::map<std::string, std::set<std::string>> adj;
  auto touch = [&](const std::vector<std::string>& inds) {
    for (auto& i : inds) adj[i];
    for (std::size_t i = 0; i + 1 < inds.size(); ++i) {
      adj[inds[i]].insert(inds[i + 1]);
      adj[inds[i + 1]].insert(inds[i]);
    }
  };
  for (auto& as : a) touch(individuals_of(as));
  if (t) touch(individuals_of(*t));

  std::map<std::string, std::string> m;
  for (auto& [root, unused] : adj) {
    if (m.count(root)) continue;
    std::vector<std::string> stack{root};
    while (!stack.empty()) {
      std::string u = stack.back();
      stack.pop_back();
      if (m.count(u)) continue;
      m[u] = "i" + std::to_string(m.size());
      for (auto it = adj[u].rbegin(); it != adj[u].rend(); ++it)
        if (!m.count(*it)) stack.push_back(*it);
    }
  }
  CanonicalQuery q;
  for (auto& as : a) q.abox.push_back(rename(as, m));
  std::sort(q.abox.begin(), q.abox.end(), [](const Assertion& x, const Assertion& y) { return compare(x, y) < 0; });
  q.abox.erase(std::unique(q.abox.begin(), q.abox.end()), q.abox.end());
  if (t) q.target = rename(*t, m);
  q.key = render_canonical(q.abox, ";");
  if (t) q.key += " ENTAILS " + render_target(q.target);
  return q;
}

OracleHandle::OracleHandle(std::shared_ptr<OracleBackend> backend) : backend_(std::move(backend)) {}

OracleHandle OracleHandle::sharing_log(std::shared_ptr<OracleBackend> backend) const {
  OracleHandle h(std::move(backend));
  h.log_ = log_;
  h.log_calls_ = false;
  return h;
}

template <class F>
bool OracleHandle::cached(const std::string& key, std::uint64_t size, F&& compute) const {
  {
    std::lock_guard lock(cache_->mu);
    auto it = cache_->answers.find(key);
    if (it != cache_->answers.end()) {
      if (log_calls_) log_->record(size, false);
      return it->second;
    }
  }
  bool answer = compute();
  bool miss;
  {
    std::lock_guard lock(cache_->mu);
    miss = cache_->answers.emplace(key, answer).second;
  }
  if (log_calls_) log_->record(size, miss);
  return answer;
}

void OracleHandle::validate(const Concept& c) const {
  Signature sig = signature_of(c);
  if (has_nominal(c)) throw SigViolation("query uses a nominal");
  if (!sig.subset_of(gamma())) throw SigViolation("query symbols outside the public signature: " + describe_extra(sig, gamma()));
}

void OracleHandle::validate(const Abox& a, const Target& alpha) const {
  Signature sig = signature_of(a);
  if (alpha) sig |= signature_of(*alpha);
  if (!sig.subset_of(gamma())) throw SigViolation("query symbols outside the public signature: " + describe_extra(sig, gamma()));
  for (auto& as : a)
    if (auto* x = std::get_if<ConceptAssertion>(&as); x && has_nominal(x->c)) throw SigViolation("query uses a nominal");
  if (alpha)
    if (auto* x = std::get_if<ConceptAssertion>(&*alpha); x && has_nominal(x->c))
      throw SigViolation("query uses a nominal");
  if (!is_connected(a)) throw NotConnected("query ABox is not connected");
  if (alpha) {
    auto inds = individuals_of(a);
    std::set<std::string> known(inds.begin(), inds.end());
    for (auto& i : individuals_of(*alpha))
      if (!known.count(i)) throw NotConnected("entailment target mentions individual '" + i + "' absent from the query ABox");
  }
}

bool OracleHandle::csat(const Concept& c) const {
  if (type() != OracleType::Csat) throw UnsupportedQueryForType("concept satisfiability query sent to a " + to_string(type()) + " oracle");
  validate(c);
  return cached("CSAT " + render(c), 1, [&] { return backend_->csat(c); });
}

bool OracleHandle::asat(const Abox& a) const {
  if (type() != OracleType::Asat) throw UnsupportedQueryForType("ABox satisfiability query sent to a " + to_string(type()) + " oracle");
  validate(a);
  CanonicalQuery q = canonicalize(a);
  return cached("ASAT " + q.key, q.abox.size(), [&] { return backend_->asat(q.abox); });
}

bool OracleHandle::aent(const Abox& a, const Target& alpha) const {
  if (type() != OracleType::Aent) throw UnsupportedQueryForType("ABox entailment query sent to a " + to_string(type()) + " oracle");
  validate(a, alpha);
  CanonicalQuery q = canonicalize(a, alpha);
  return cached("AENT " + q.key, q.abox.size() + 1, [&] { return backend_->aent(q.abox, q.target); });
}

std::optional<Assertion> negate(const Assertion& a) {
  return std::visit(
      [](const auto& x) -> std::optional<Assertion> {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, ConceptAssertion>) {
          if (x.c.kind() == ConceptKind::Not) return ConceptAssertion{x.c.sub(), x.ind};
          return ConceptAssertion{Concept::negation(x.c), x.ind};
        } else if constexpr (std::is_same_v<T, RoleAssertion>) {
          return NegRoleAssertion{x.role, x.from, x.to};
        } else if constexpr (std::is_same_v<T, NegRoleAssertion>) {
          return RoleAssertion{x.role, x.from, x.to};
        } else if constexpr (std::is_same_v<T, Equality>) {
          return Inequality{x.a, x.b};
        } else {
          return Equality{x.a, x.b};
        }
      },
      a);
}

}  // namespace ibq
