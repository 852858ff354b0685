#include <benchmark/benchmark.h>

#include "apimig/rule_generalize.hpp"
#include "apimig/rule_infer.hpp"
#include "apimig/srcparse.hpp"

namespace {

apimig::ChangePair squeeze_pair() {
  apimig::ChangePair pair;
  pair.before_text = "r = pd.read_csv(filename, compression=comp, encoding=enc, "
                     "index_col=0, squeeze=True)";
  pair.after_text = "r = pd.read_csv(filename, compression=comp, encoding=enc, "
                    "index_col=0).squeeze()";
  pair.before = apimig::parse_statement(pair.before_text);
  pair.after = apimig::parse_statement(pair.after_text);
  pair.pr_id = "bench";
  return pair;
}

void BM_InferRule(benchmark::State& state) {
  apimig::ChangePair pair = squeeze_pair();
  apimig::TypeOracle oracle = apimig::TypeOracle::always_unknown();
  for (auto _ : state) {
    auto rule = apimig::infer_rule(pair, oracle);
    benchmark::DoNotOptimize(rule);
  }
}
BENCHMARK(BM_InferRule);

void BM_Generalize(benchmark::State& state) {
  apimig::ChangePair pair = squeeze_pair();
  apimig::TypeOracle oracle = apimig::TypeOracle::always_unknown();
  auto rule = apimig::infer_rule(pair, oracle);
  for (auto _ : state) {
    auto g = apimig::generalize(*rule);
    benchmark::DoNotOptimize(g);
  }
}
BENCHMARK(BM_Generalize);

void BM_ParseModule(benchmark::State& state) {
  std::string src;
  for (int i = 0; i < 500; ++i)
    src += "def fn" + std::to_string(i) + "(x):\n    return g(x, k=" + std::to_string(i) + ")\n";
  for (auto _ : state) {
    auto mod = apimig::parse_module(src);
    benchmark::DoNotOptimize(mod);
  }
}
BENCHMARK(BM_ParseModule);

}  // namespace
