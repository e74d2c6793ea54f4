#include <benchmark/benchmark.h>

#include "muspark/alias_check.hpp"
#include "muspark/fuzz.hpp"
#include "muspark/interp.hpp"
#include "muspark/parser.hpp"
#include "muspark/typecheck.hpp"

namespace {

using namespace muspark;

const char* kLoopProgram = R"(
type List is record
  Flag : Boolean;
  Key : access Integer;
  Next : access List;
end record;

procedure Step (A : in out access Integer) is
begin
  A.all := A.all + 1;
end Step;

procedure Main is
  P : access Integer;
  L : access List;
  I : Integer;
begin
  P := new Integer;
  P.all := 0;
  L := new List;
  L.all.Flag := true;
  L.all.Key := new Integer;
  L.all.Key.all := 5;
  L.all.Next := null;
  I := 0;
  while I < 200 loop
    Step(P);
    I := I + 1;
  end loop;
end Main;
)";

Program generated_program() {
  GenConfig config;
  config.seed = 31337;
  config.max_records = 3;
  config.max_procedures = 4;
  config.max_statements = 30;
  return generate_program(config);
}

void BM_Parse(benchmark::State& state) {
  std::string source = pretty_print(generated_program());
  for (auto _ : state) {
    auto parsed = parse_source(source);
    benchmark::DoNotOptimize(parsed.ok());
  }
}
BENCHMARK(BM_Parse);

void BM_AliasCheck(benchmark::State& state) {
  Program program = generated_program();
  auto types = check_program(program);
  for (auto _ : state) {
    AliasCheckResult result = check_program_aliasing(program, types.value());
    benchmark::DoNotOptimize(result.accepted());
  }
}
BENCHMARK(BM_AliasCheck);

void BM_TransformerChain(benchmark::State& state) {
  auto parsed = parse_source(kLoopProgram);
  Program program = std::move(parsed.value());
  auto types = check_program(program);
  TypeEnv env = types.value().env("Main");
  Path l("L");
  Path deep = l.deref().field("Next");
  for (auto _ : state) {
    AccessPolicy policy = entry_policy(env);
    policy.fresh(l, Permission::RW);
    policy.cut(deep);
    policy.block(deep);
    policy.freeze(l);
    policy.borrow(l);
    benchmark::DoNotOptimize(policy.get(deep));
  }
}
BENCHMARK(BM_TransformerChain);

void BM_RunUnmonitored(benchmark::State& state) {
  auto parsed = parse_source(kLoopProgram);
  Program program = std::move(parsed.value());
  auto types = check_program(program);
  for (auto _ : state) {
    ExecOutcome outcome = run_program(program, types.value());
    benchmark::DoNotOptimize(outcome.steps);
  }
}
BENCHMARK(BM_RunUnmonitored);

void BM_RunMonitored(benchmark::State& state) {
  auto parsed = parse_source(kLoopProgram);
  Program program = std::move(parsed.value());
  auto types = check_program(program);
  AliasCheckResult analysis = check_program_aliasing(program, types.value());
  RunOptions opts;
  opts.monitored = true;
  opts.policies = &analysis.policies;
  for (auto _ : state) {
    ExecOutcome outcome = run_program(program, types.value(), opts);
    benchmark::DoNotOptimize(outcome.steps);
  }
}
BENCHMARK(BM_RunMonitored);

void BM_GenerateProgram(benchmark::State& state) {
  GenConfig config;
  uint64_t i = 0;
  for (auto _ : state) {
    config.seed = derive_seed(1, i++);
    Program p = generate_program(config);
    benchmark::DoNotOptimize(p.procedures.size());
  }
}
BENCHMARK(BM_GenerateProgram);

}  // namespace

BENCHMARK_MAIN();
