// Scaling of the EL import-by-query run and of the acyclicity fixpoint on
// the chain family A0(a), Ai ⊑ ∃R.A(i+1).
#include <benchmark/benchmark.h>

#include "ibq/admissibility.hpp"
#include "ibq/engine.hpp"
#include "ibq/local_oracle.hpp"
#include "ibq/text.hpp"

namespace {

ibq::KnowledgeBase chain(int n) {
  std::string text = "A0(a).\n";
  for (int i = 0; i < n; ++i) text += "A" + std::to_string(i) + " sub some R A" + std::to_string(i + 1) + ".\n";
  return ibq::parse_kb(text);
}

ibq::Signature gamma() {
  ibq::Signature g;
  g.concepts = {"C"};
  g.roles = {"R"};
  return g;
}

void BM_ElChain(benchmark::State& state) {
  auto visible = chain(static_cast<int>(state.range(0)));
  auto hidden = ibq::parse_kb("some R top sub C.\nC sub HC.");
  ibq::IbqResult last;
  for (auto _ : state) {
    auto o = ibq::local_oracle(hidden, gamma(), ibq::OracleType::Aent);
    last = ibq::import_check_sat(visible, gamma(), o, ibq::IbqMode::ElOmegaE);
    benchmark::DoNotOptimize(last.sat);
  }
  state.counters["queries"] = static_cast<double>(last.queries.queries);
  state.counters["rule_apps"] = static_cast<double>(last.stats.rule_apps);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ElChain)->RangeMultiplier(2)->Range(10, 160)->Complexity();

void BM_AcyclicityChain(benchmark::State& state) {
  auto visible = chain(static_cast<int>(state.range(0)));
  auto rules = ibq::clausify_alchiq(visible).rules;
  std::size_t facts = 0;
  for (auto _ : state) {
    auto p = ibq::build_acyclicity_program(rules, visible.abox, gamma(), ibq::LogicProfile::alchiq());
    facts = ibq::detect_harmful_cycle(p).fact_count;
    benchmark::DoNotOptimize(facts);
  }
  state.counters["facts"] = static_cast<double>(facts);
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AcyclicityChain)->RangeMultiplier(2)->Range(10, 160)->Complexity();

}  // namespace

BENCHMARK_MAIN();
