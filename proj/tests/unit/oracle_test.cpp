#include <doctest.h>

#include <random>

#include "support.hpp"

using namespace ibq;
using namespace ibq::testing;

namespace {

OracleHandle local(const std::string& hidden_text, const Signature& g, OracleType t) {
  return local_oracle(kb(hidden_text), g, t);
}

Assertion ca(const std::string& c, const std::string& i) { return ConceptAssertion{Concept::atomic(c), i}; }

}  // namespace

TEST_CASE("local oracle answers") {
  auto th15 = load_kb("ht_safety_hidden1.dl");
  CHECK(local_oracle(th15, load_sig("ht_safety.sig"), OracleType::Asat).asat(parse_abox("A1(a)")));

  auto o49 = local_oracle(load_kb("worked_hidden.dl"), sig({"C"}, {"R"}), OracleType::Aent);
  CHECK(o49.aent(parse_abox("R(a,b)"), ca("C", "a")));
  CHECK_FALSE(o49.aent(parse_abox("R(a,b)"), ca("C", "b")));
  // Cross-check the entailment by bounded model search over Th ∪ {R(a,b), ¬C(a)}.
  KnowledgeBase q = load_kb("worked_hidden.dl");
  q.abox = parse_abox("R(a,b); not C(a)");
  CHECK(brute_force_sat(q, 3) == BruteResult::Unsat);

  auto o7 = local("some R some R C sub C.", sig({"C"}, {"R"}), OracleType::Asat);
  CHECK(o7.asat(parse_abox("R(a,b); C(b)")));
}

TEST_CASE("handle validation: signature and connectivity") {
  auto o = local("", sig({"C"}, {"R"}), OracleType::Asat);
  CHECK_THROWS_AS(o.asat(parse_abox("D(a)")), SigViolation);
  CHECK_THROWS_AS(o.asat(parse_abox("C(a); C(b)")), NotConnected);
  CHECK_THROWS_AS(o.aent(parse_abox("R(a,b)"), std::nullopt), UnsupportedQueryForType);
  CHECK(o.asat(parse_abox("R(a,b); C(b)")));
}

TEST_CASE("canonical queries and caching") {
  auto o = local("C sub bot.", sig({"C"}, {"R"}), OracleType::Asat);
  CHECK(canonicalize(parse_abox("R(x,y); C(y)")).key == canonicalize(parse_abox("R(p,q); C(q)")).key);
  CHECK(canonicalize(parse_abox("R(x,y); C(y)")).key != canonicalize(parse_abox("R(x,y); C(x)")).key);
  CHECK_FALSE(o.asat(parse_abox("R(x,y); C(y)")));
  CHECK_FALSE(o.asat(parse_abox("R(p,q); C(q)")));
  auto s = o.stats();
  CHECK(s.queries == 2);
  CHECK(s.distinct == 1);
  CHECK(s.max_query_size == 2);
}

TEST_CASE("adapters: aent to asat, asat to csat, asat to aent") {
  std::string th = "some R top sub C.\nC sub E.\nE sub bot.";
  Signature g = sig({"C", "D"}, {"R"});
  auto aent = local(th, g, OracleType::Aent);
  auto asat = local(th, g, OracleType::Asat);
  auto via_aent = adapt(aent, OracleType::Asat);
  auto via_asat = adapt(asat, OracleType::Csat);
  CHECK(via_aent.type() == OracleType::Asat);
  for (const char* a : {"R(a,b)", "C(a)", "D(a)", "D(a); not C(a)", "R(a,b); D(b)"}) {
    CAPTURE(a);
    Abox x = parse_abox(a);
    CHECK(via_aent.asat(x) == !aent.aent(x, std::nullopt));
    CHECK(via_aent.asat(x) == asat.asat(x));
  }
  for (const char* c : {"C", "D", "some R top", "(D and not C)"}) {
    CAPTURE(c);
    Concept k = parse_concept(c);
    CHECK(via_asat.csat(k) == asat.asat({ConceptAssertion{k, "a0"}}));
  }
  // Entailment through satisfiability needs negation in the hidden logic.
  CHECK_THROWS_AS(adapt(asat, OracleType::Aent), NoReduction);
  auto ent = adapt(local("logic alchiq.\n" + th, g, OracleType::Asat), OracleType::Aent);
  CHECK(ent.aent(parse_abox("D(a)"), ca("D", "a")));
  CHECK_FALSE(ent.aent(parse_abox("D(a)"), ca("C", "a")));
  CHECK(ent.aent(parse_abox("R(a,b)"), std::nullopt));
}

TEST_CASE("csat cannot serve role-bearing signatures") {
  auto csat = local("", sig({"C"}, {"R"}), OracleType::Csat);
  CHECK_THROWS_AS(adapt(csat, OracleType::Asat), NoReduction);
  CHECK_FALSE(can_adapt(OracleType::Csat, OracleType::Asat, sig({"C"}, {"R"}), LogicProfile::alchiq()));
  CHECK(can_adapt(OracleType::Csat, OracleType::Asat, sig({"C"}, {}), LogicProfile::alchiq()));
}

TEST_CASE("concept-only ABox satisfiability from concept satisfiability") {
  Signature g = sig({"A", "B"}, {});
  auto csat = local("", g, OracleType::Csat);
  Abox merged_clash = {ca("A", "a"), Equality{"a", "b"}, ConceptAssertion{Concept::negation(Concept::atomic("A")), "b"}};
  CHECK_FALSE(concept_only_asat(csat, merged_clash));
  CHECK(concept_only_asat(csat, {ca("A", "a"), ca("B", "c")}));
  CHECK_FALSE(concept_only_asat(csat, {Equality{"a", "b"}, Inequality{"b", "a"}}));
  auto disjoint = local("(A and B) sub bot.", g, OracleType::Csat);
  CHECK_FALSE(concept_only_asat(disjoint, {ca("A", "a"), ca("B", "a")}));
  CHECK(concept_only_asat(disjoint, {ca("A", "a"), ca("B", "b")}));
}

TEST_CASE("concept-only adapter agrees with a native ABox oracle") {
  std::mt19937 rng(5);
  Signature g = load_sig("csat_limit.sig");
  for (const char* h : {"csat_limit_hidden1.dl", "csat_limit_hidden2.dl"}) {
    auto hidden = load_kb(h);
    auto csat = local_oracle(hidden, g, OracleType::Csat);
    auto asat = local_oracle(hidden, g, OracleType::Asat);
    auto adapted = adapt(csat, OracleType::Asat);
    std::vector<std::string> names(g.concepts.begin(), g.concepts.end());
    const char* inds[] = {"a", "b", "c"};
    for (int i = 0; i < 60; ++i) {
      Abox a;
      int n = 1 + static_cast<int>(rng() % 4);
      for (int k = 0; k < n; ++k) {
        Concept c = Concept::atomic(names[rng() % names.size()]);
        if (rng() % 3 == 0) c = Concept::negation(c);
        a.push_back(ConceptAssertion{c, inds[rng() % 3]});
      }
      if (rng() % 2) a.push_back(Equality{"a", "b"});
      if (rng() % 3 == 0) a.push_back(Inequality{"b", "c"});
      CAPTURE(render_canonical(a));
      bool native = true;
      for (auto& comp : connected_components(eliminate_equalities(a))) native = native && asat.asat(comp);
      CHECK(concept_only_asat(csat, a) == native);
      for (auto& comp : connected_components(a)) CHECK(adapted.asat(comp) == asat.asat(comp));
    }
  }
}

TEST_CASE("Gamma-modal rewriting") {
  auto visible = load_kb("medical_visible.dl");
  auto g = load_sig("medical.sig");
  CHECK(is_gamma_modal(parse_concept("some con AS"), g));
  CHECK_FALSE(is_gamma_modal(parse_concept("some hasOrg Heart"), g));
  auto rw = gamma_modal_rewrite(visible, g);
  bool found = false;
  for (auto& [x, c] : rw.expansion)
    if (render(c) == "some con AS") {
      found = true;
      CHECK(rw.gamma.contains_concept(x));
      CHECK(render(expand(Concept::atomic(x), rw.expansion)) == "some con AS");
    }
  CHECK(found);
  for (auto& ax : rw.kb.tbox) CHECK(render(ax).find("some con AS") == std::string::npos);

  auto plain = kb("A sub B.\nB sub some S A.");
  auto id = gamma_modal_rewrite(plain, sig({"A"}, {"R"}));
  CHECK(id.kb == plain);
  CHECK(id.expansion.empty());

  auto nested = gamma_modal_rewrite(kb("B sub some R some R A."), sig({"A"}, {"R"}));
  REQUIRE(nested.expansion.size() == 1);
  CHECK(render(nested.expansion.begin()->second) == "some R some R A");
}

TEST_CASE("expanding oracle forwards expanded queries") {
  auto inner = local("some R A sub B.", sig({"A", "B"}, {"R"}), OracleType::Aent);
  Signature ext = sig({"A", "B", "X0"}, {"R"});
  auto o = expanding_oracle(inner, ext, {{"X0", parse_concept("some R A")}});
  CHECK(o.gamma().contains_concept("X0"));
  CHECK(o.aent(parse_abox("X0(a)"), ca("B", "a")));
  CHECK_FALSE(o.aent(parse_abox("A(a)"), ca("B", "a")));
}

TEST_CASE("negation of assertions") {
  CHECK(render(*negate(ca("A", "a"))) == "not A(a)");
  CHECK(negate(Assertion{RoleAssertion{Role{"R", false}, "a", "b"}}).has_value());
  CHECK(std::holds_alternative<Inequality>(*negate(Equality{"a", "b"})));
}
