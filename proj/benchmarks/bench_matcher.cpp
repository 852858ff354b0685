#include <benchmark/benchmark.h>

#include <string>

#include "apimig/matcher.hpp"
#include "apimig/template_lang.hpp"

namespace {

std::string synthetic_source(int lines) {
  std::string src;
  for (int i = 0; i < lines; ++i) {
    switch (i % 4) {
      case 0: src += "r" + std::to_string(i) + " = pd.read_csv(path, squeeze=True)\n"; break;
      case 1: src += "x = obj.method(a, b, k=1)\n"; break;
      case 2: src += "print('line %d' % " + std::to_string(i) + ")  # comment\n"; break;
      default: src += "values = [f(n) for n in data]\n"; break;
    }
  }
  return src;
}

void BM_MatchAll(benchmark::State& state) {
  apimig::Template t = apimig::parse_template(":[[i]].read_csv(:[args], squeeze=True)");
  std::string src = synthetic_source(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto ms = apimig::match_all(t, src);
    benchmark::DoNotOptimize(ms);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(src.size()));
}
BENCHMARK(BM_MatchAll)->Arg(100)->Arg(1000)->Arg(10000);

void BM_SourceScan(benchmark::State& state) {
  std::string src = synthetic_source(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    apimig::SourceScan scan(src, apimig::LangProfile::python());
    benchmark::DoNotOptimize(scan);
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          static_cast<int64_t>(src.size()));
}
BENCHMARK(BM_SourceScan)->Arg(1000)->Arg(10000);

}  // namespace
