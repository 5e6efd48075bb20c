#include <doctest.h>

#include "support.hpp"

using namespace ibq;
using namespace ibq::testing;

namespace {

IbqOptions checked() {
  IbqOptions o;
  o.check_invariants = true;
  return o;
}

std::set<std::string> leaf_set(const Abox& a) {
  std::set<std::string> s;
  for (auto& x : a) s.insert(render(x));
  return s;
}

IbqOptions assumed() {
  IbqOptions o = checked();
  o.assume_admissible = true;
  return o;
}

IbqResult run(const std::string& visible, const std::string& hidden, const Signature& g, IbqMode mode,
              IbqOptions opt = checked()) {
  OracleType t = mode == IbqMode::AlchiqOmegaA ? OracleType::Asat : OracleType::Aent;
  return import_check_sat(kb(visible), g, local_oracle(kb(hidden), g, t), mode, opt);
}

}  // namespace

TEST_CASE("ALCHIQ mode on the worked example is satisfiable") {
  auto o = local_oracle(load_kb("worked_hidden.dl"), load_sig("worked.sig"), OracleType::Asat);
  auto r = import_check_sat(load_kb("worked_visible.dl"), load_sig("worked.sig"), o, IbqMode::AlchiqOmegaA, checked());
  CHECK(r.sat);
  CHECK(r.mode == IbqMode::AlchiqOmegaA);
  CHECK(r.queries.queries > 0);
  // The A-cut guesses C(a) first and the hidden TBox accepts it.
  CHECK(leaf_set(r.leaf).count("C(a)"));
}

TEST_CASE("EL mode: cyclic visible chain against bounded hidden chains") {
  Signature g = load_sig("el_chain.sig");
  auto kv = load_kb("el_chain_visible.dl");
  auto sat = import_check_sat(kv, g, local_oracle(load_kb("el_chain_hidden1.dl"), g, OracleType::Aent), IbqMode::ElOmegaE,
                              checked());
  CHECK(sat.sat);
  auto unsat = import_check_sat(kv, g, local_oracle(load_kb("el_chain_hidden2.dl"), g, OracleType::Aent),
                                IbqMode::ElOmegaE, checked());
  CHECK_FALSE(unsat.sat);
  CHECK(unsat.stats.branches == 1);
}

TEST_CASE("Omega^a falsum on an inconsistent component") {
  CHECK_FALSE(run("B(a).", "B sub bot.", sig({"B"}, {}), IbqMode::AlchiqOmegaA).sat);
  CHECK(run("B(a).", "C sub bot.", sig({"B", "C"}, {}), IbqMode::AlchiqOmegaA).sat);
}

TEST_CASE("A-cut tries the positive branch first") {
  auto pos = run("D(a).", "", sig({"A"}, {}), IbqMode::AlchiqOmegaA);
  REQUIRE(pos.sat);
  CHECK(leaf_set(pos.leaf).count("A(a)"));
  auto neg = run("D(a).", "A sub bot.", sig({"A"}, {}), IbqMode::AlchiqOmegaA);
  REQUIRE(neg.sat);
  CHECK(leaf_set(neg.leaf).count("not A(a)"));
  CHECK(neg.stats.branches >= 2);
}

TEST_CASE("R-cut runs only when the hidden logic has role hierarchies") {
  Signature g = sig({}, {"R", "S"});
  auto with_h = run("R(a,b).", "logic alchiq.\nsome S top sub bot.", g, IbqMode::AlchiqOmegaA);
  REQUIRE(with_h.sat);
  CHECK(leaf_set(with_h.leaf).count("not S(a,b)"));
  auto without = run("R(a,b).", "logic alc.\nsome S top sub bot.", g, IbqMode::AlchiqOmegaA);
  REQUIRE(without.sat);
  CHECK_FALSE(leaf_set(without.leaf).count("not S(a,b)"));
  CHECK_FALSE(leaf_set(without.leaf).count("S(a,b)"));
}

TEST_CASE("Omega^e concept completion adds entailed public facts") {
  auto r = run("R(a,b).", "some R top sub C.", sig({"C"}, {"R"}), IbqMode::HornOmegaE);
  REQUIRE(r.sat);
  CHECK(leaf_set(r.leaf).count("C(a)"));
  CHECK_FALSE(leaf_set(r.leaf).count("C(b)"));
  // A visible constraint on a public concept is not modular, so admissibility is assumed.
  CHECK_FALSE(
      run("R(a,b).\nC sub bot.", "some R top sub C.", sig({"C"}, {"R"}), IbqMode::HornOmegaE, assumed()).sat);
}

TEST_CASE("individuals without public assertions still reach the hidden TBox") {
  auto r = run("D(a).", "C sub bot.", sig({"C"}, {}), IbqMode::HornOmegaE);
  CHECK(r.sat);
  // One entailment query per public concept plus falsum, all over {top(a)}.
  CHECK(r.queries.queries == 2);
  CHECK(leaf_set(r.leaf) == std::set<std::string>{"D(a)"});
  CHECK_FALSE(run("D(a).", "top sub some R E.\nE sub bot.", sig({"C"}, {}), IbqMode::HornOmegaE).sat);
  CHECK_FALSE(run("D(a).\nC sub bot.", "top sub C.", sig({"C"}, {}), IbqMode::HornOmegaE, assumed()).sat);
  CHECK_FALSE(run("D(a).", "top sub some R E.\nE sub bot.", sig({"C"}, {}), IbqMode::AlchiqOmegaA).sat);
  CHECK_FALSE(run("D(a).", "top sub some R E.\nE sub bot.", sig({"C"}, {}), IbqMode::ElOmegaE).sat);
}

TEST_CASE("projection onto the public signature") {
  auto rules = clausify_alchiq(kb("A sub some R A.")).rules;
  Tableau t(rules);
  auto a = t.load(parse_abox("A(a); B(a); R(a,b); a != b"));
  int A = *t.vocab().find_concept("A"), R = *t.vocab().find_role("R");
  Ind root = *t.individuals().find_named("a");
  Ind s1 = t.individuals().fresh_child(root), s2 = t.individuals().fresh_child(s1),
      s3 = t.individuals().fresh_child(s2), s4 = t.individuals().fresh_child(s3);
  for (auto [p, c] : {std::pair{root, s1}, std::pair{s1, s2}, std::pair{s2, s3}, std::pair{s3, s4}}) {
    a.inds.insert(c);
    a.add_pos(c, A);
    a.add_role(p, R, c);
  }
  Blocking b = t.compute_blocking(a);
  // s3 is directly blocked by s2, so its child s4 is indirectly blocked.
  REQUIRE(b.status[s3].kind == BlockKind::Direct);
  REQUIRE(b.indirectly(s4));

  auto none = project_gamma(t, a, b, Signature{});
  REQUIRE(none.abox.size() == 1);
  CHECK(std::holds_alternative<Inequality>(none.abox[0]));

  auto pub = project_gamma(t, a, b, sig({"A"}, {"R"}));
  std::string s4_name = t.individual_name(s4);
  for (auto& x : pub.abox) {
    CHECK(signature_of(x).subset_of(sig({"A"}, {"R"})));
    for (auto& i : individuals_of(x)) CHECK(i != s4_name);
  }
  CHECK(leaf_set(pub.abox).count("A(a)"));
  CHECK_FALSE(leaf_set(pub.abox).count("B(a)"));
  CHECK(pub.components.size() == 1);
}

TEST_CASE("mode selection") {
  LogicProfile el;
  el.el = el.horn = true;
  LogicProfile horn = LogicProfile::alchiq();
  horn.horn = true;
  Signature roles = sig({"A"}, {"R"});
  CHECK(select_mode(el, el, OracleType::Aent, roles) == IbqMode::ElOmegaE);
  CHECK(select_mode(LogicProfile::alchiq(), horn, OracleType::Asat, roles) == IbqMode::AlchiqOmegaA);
  CHECK(select_mode(LogicProfile::alchiq(), horn, OracleType::Aent, roles) == IbqMode::HornOmegaE);
  CHECK_THROWS_AS(select_mode(LogicProfile::alchiq(), LogicProfile::alchiq(), OracleType::Csat, roles), NoViableMode);
  CHECK(parse_mode(to_string(IbqMode::HornOmegaE)) == IbqMode::HornOmegaE);
}

TEST_CASE("inadmissible input is refused unless assumed admissible") {
  Signature g = load_sig("guard.sig");
  auto o = local_oracle(load_kb("ht_safety_hidden1.dl"), g, OracleType::Asat);
  CHECK_THROWS_AS(import_check_sat(load_kb("guard_visible.dl"), g, o, IbqMode::AlchiqOmegaA, checked()), Inadmissible);
  try {
    import_check_sat(load_kb("cycle_visible.dl"), load_sig("cycle.sig"),
                     local_oracle(load_kb("cycle_hidden1.dl"), load_sig("cycle.sig"), OracleType::Asat),
                     IbqMode::AlchiqOmegaA, checked());
    FAIL("expected Inadmissible");
  } catch (const Inadmissible& e) {
    REQUIRE(e.result.cycle);
    CHECK_FALSE(e.result.cycle->acyclic);
  }
  IbqOptions assume = checked();
  assume.assume_admissible = true;
  CHECK_NOTHROW(import_check_sat(load_kb("csat_limit_visible.dl"), load_sig("csat_limit.sig"),
                                 local_oracle(load_kb("csat_limit_hidden1.dl"), load_sig("csat_limit.sig"), OracleType::Asat),
                                 IbqMode::AlchiqOmegaA, assume));
}

TEST_CASE("entailment over the medical example") {
  Signature g = load_sig("medical.sig");
  auto visible = load_kb("medical_visible.dl");
  auto o = local_oracle(load_kb("medical_hidden.dl"), g, OracleType::Aent);
  IbqOptions opt = checked();
  opt.assume_admissible = true;
  auto c = [](const char* n) { return Concept::atomic(n); };
  CHECK(import_entails(visible, g, o, c("VSD_Patient"), c("HS_Patient"), std::nullopt, opt));
  CHECK(import_entails(visible, g, o, c("EA_Patient"), c("TVD_Patient"), std::nullopt, opt));
  CHECK_FALSE(import_entails(visible, g, o, c("AS_Patient"), c("VSD_Patient"), std::nullopt, opt));
  CHECK_THROWS_AS(import_entails(visible, g, o, c("VSD_Patient"), c("HS_Patient"), IbqMode::ElOmegaE, opt),
                  UnsupportedConstruct);
}

TEST_CASE("statistics are deterministic") {
  Signature g = load_sig("medical.sig");
  auto visible = load_kb("medical_visible.dl");
  IbqOptions opt = checked();
  opt.assume_admissible = true;
  IbqResult r1, r2;
  import_entails(visible, g, local_oracle(load_kb("medical_hidden.dl"), g, OracleType::Aent),
                 Concept::atomic("EA_Patient"), Concept::atomic("TVD_Patient"), std::nullopt, opt, &r1);
  import_entails(visible, g, local_oracle(load_kb("medical_hidden.dl"), g, OracleType::Aent),
                 Concept::atomic("EA_Patient"), Concept::atomic("TVD_Patient"), std::nullopt, opt, &r2);
  CHECK(r1.queries.queries == r2.queries.queries);
  CHECK(r1.queries.max_query_size == r2.queries.max_query_size);
  CHECK(r1.stats.rule_apps == r2.stats.rule_apps);
  CHECK(r1.stats.branches == r2.stats.branches);
}

TEST_CASE("nominals in the visible KB are rejected") {
  Signature g = sig({"A"}, {});
  auto o = local_oracle(kb(""), g, OracleType::Aent);
  CHECK_THROWS_AS(import_check_sat(kb("nominal N.\nA sub N.\nA(a)."), g, o), UnsupportedConstruct);
}

TEST_CASE("small differential corpora") {
  auto el = run_corpus(Family::El, 60, 1001, 4000);
  std::string el_failures;
  for (auto& f : el.failures) el_failures += f + "\n";
  CAPTURE(el.summary());
  CAPTURE(el_failures);
  CHECK(el.admissible == 60);
  CHECK(el.ok());

  auto horn = run_corpus(Family::Horn, 40, 2002, 6000);
  CAPTURE(horn.summary());
  CHECK(horn.admissible == 40);
  CHECK(horn.ok());

  GenParams small;
  small.visible_axioms = 4;
  small.hidden_axioms = 4;
  auto alchiq = run_corpus(Family::Alchiq, 20, 3003, 6000, small);
  CAPTURE(alchiq.summary());
  CHECK(alchiq.admissible == 20);
  CHECK(alchiq.ok());
}
