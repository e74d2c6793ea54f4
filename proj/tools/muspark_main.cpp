// muspark: command-line front end for the muSPARK checker, interpreter and
// fuzzer.
#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "muspark/alias_check.hpp"
#include "muspark/fuzz.hpp"
#include "muspark/interp.hpp"
#include "muspark/parser.hpp"
#include "muspark/typecheck.hpp"

namespace {

using namespace muspark;

// Exit statuses form the stable CLI contract.
constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kBlocked = 2;
constexpr int kCrewViolation = 3;
constexpr int kUsage = 4;
constexpr int kFuelExhausted = 5;

bool read_file(const std::string& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream buffer;
  buffer << in.rdbuf();
  out = buffer.str();
  return true;
}

struct Output {
  std::string file;
  bool json = false;
};

void emit_parse_error(const Output& out, const ParseError& err) {
  if (out.json) {
    nlohmann::json j;
    j["file"] = out.file;
    j["line"] = err.span.line;
    j["col"] = err.span.col;
    j["code"] = "parse-error";
    j["rule"] = nullptr;
    j["path"] = nullptr;
    j["required"] = nullptr;
    j["actual"] = nullptr;
    j["message"] = err.message();
    std::cout << j.dump() << "\n";
    return;
  }
  std::cerr << out.file << ":" << err.span.line << ":" << err.span.col
            << ": error[parse-error]: " << err.message() << "\n";
}

void emit_type_errors(const Output& out, const std::vector<TypeError>& errors) {
  for (const TypeError& err : errors) {
    if (out.json) {
      nlohmann::json j;
      j["file"] = out.file;
      j["line"] = err.span.line;
      j["col"] = err.span.col;
      j["code"] = to_string(err.code);
      j["rule"] = nullptr;
      j["path"] = nullptr;
      j["required"] = nullptr;
      j["actual"] = nullptr;
      j["message"] = err.message;
      std::cout << j.dump() << "\n";
    } else {
      std::cerr << out.file << ":" << err.span.line << ":" << err.span.col << ": error["
                << to_string(err.code) << "]: " << err.message << "\n";
    }
  }
}

void emit_diagnostics(const Output& out, const std::vector<Diagnostic>& diagnostics) {
  for (const Diagnostic& d : diagnostics) {
    if (out.json) {
      nlohmann::json j;
      j["file"] = out.file;
      j["line"] = d.span.line;
      j["col"] = d.span.col;
      j["code"] = d.code;
      j["rule"] = to_string(d.rule);
      j["path"] = d.path.to_string();
      j["required"] = to_string(d.required);
      j["actual"] = to_string(d.actual);
      j["message"] = d.message;
      std::cout << j.dump() << "\n";
    } else {
      std::cerr << out.file << ":" << d.span.line << ":" << d.span.col << ": error["
                << d.code << "]: " << d.message << " (path " << d.path.to_string()
                << " requires " << to_string(d.required) << ", has "
                << to_string(d.actual) << ")\n";
    }
  }
}

struct LoadedProgram {
  std::unique_ptr<Program> program;
  TypeInfo types;
};

// Parse + type check; on failure prints diagnostics and sets `status`.
std::optional<LoadedProgram> load_checked(const std::string& file, const Output& out,
                                          int& status) {
  std::string source;
  if (!read_file(file, source)) {
    std::cerr << "muspark: cannot read " << file << "\n";
    status = kUsage;
    return std::nullopt;
  }
  auto parsed = parse_source(source);
  if (!parsed) {
    emit_parse_error(out, parsed.error());
    status = kDiagnostics;
    return std::nullopt;
  }
  LoadedProgram loaded;
  loaded.program = std::make_unique<Program>(std::move(parsed.value()));
  auto types = check_program(*loaded.program);
  if (!types) {
    emit_type_errors(out, types.error());
    status = kDiagnostics;
    return std::nullopt;
  }
  loaded.types = std::move(types.value());
  return loaded;
}

int cmd_check(const std::string& file, bool json) {
  Output out{file, json};
  int status = kOk;
  auto loaded = load_checked(file, out, status);
  if (!loaded) return status;
  AliasCheckResult result = check_program_aliasing(*loaded->program, loaded->types);
  if (!result.accepted()) {
    emit_diagnostics(out, result.diagnostics);
    return kDiagnostics;
  }
  return kOk;  // quiet on success
}

int cmd_run(const std::string& file, bool json, uint64_t fuel, bool monitor,
            bool unchecked, bool trap_overflow, int depth_bound, bool verbose) {
  Output out{file, json};
  int status = kOk;
  auto loaded = load_checked(file, out, status);
  if (!loaded) return status;

  AliasCheckResult analysis;
  if (!unchecked) {
    analysis = check_program_aliasing(*loaded->program, loaded->types);
    if (!analysis.accepted()) {
      emit_diagnostics(out, analysis.diagnostics);
      return kDiagnostics;
    }
  }

  RunOptions opts;
  opts.fuel = fuel;
  opts.monitored = monitor;
  opts.trap_overflow = trap_overflow;
  opts.depth_bound = depth_bound;
  if (monitor) {
    if (unchecked)
      opts.permissive_policy = true;
    else
      opts.policies = &analysis.policies;
  }
  if (verbose)
    opts.verbose = [](const std::string& line) { std::cerr << line << "\n"; };

  ExecOutcome outcome = run_program(*loaded->program, loaded->types, opts);

  if (json) {
    nlohmann::json j;
    j["outcome"] = to_string(outcome.kind);
    j["steps"] = outcome.steps;
    j["store_size"] = outcome.store.size();
    if (outcome.kind == ExecOutcome::Kind::Blocked) {
      j["reason"] = to_string(outcome.reason);
      j["line"] = outcome.span.line;
      j["col"] = outcome.span.col;
    }
    if (outcome.crew) {
      j["point"] = outcome.crew->point.to_string();
      j["path_p"] = outcome.crew->p.to_string();
      j["path_q"] = outcome.crew->q.to_string();
      j["perm_p"] = to_string(outcome.crew->perm_p);
      j["perm_q"] = to_string(outcome.crew->perm_q);
    }
    std::cout << j.dump() << "\n";
  } else {
    switch (outcome.kind) {
      case ExecOutcome::Kind::Completed:
        std::cout << "completed: " << outcome.steps << " statements, store size "
                  << outcome.store.size() << "\n";
        break;
      case ExecOutcome::Kind::Blocked:
        std::cout << "blocked (" << to_string(outcome.reason) << ") at "
                  << outcome.span.line << ":" << outcome.span.col << "\n";
        break;
      case ExecOutcome::Kind::FuelExhausted:
        std::cout << "fuel exhausted after " << outcome.steps << " statements\n";
        break;
      case ExecOutcome::Kind::CrewViolation:
        std::cout << "crew violation at " << outcome.crew->point.to_string() << ": "
                  << outcome.crew->p.to_string() << " ("
                  << to_string(outcome.crew->perm_p) << ") aliases "
                  << outcome.crew->q.to_string() << " ("
                  << to_string(outcome.crew->perm_q) << ")\n";
        break;
    }
  }

  switch (outcome.kind) {
    case ExecOutcome::Kind::Completed: return kOk;
    case ExecOutcome::Kind::Blocked: return kBlocked;
    case ExecOutcome::Kind::FuelExhausted: return kFuelExhausted;
    case ExecOutcome::Kind::CrewViolation: return kCrewViolation;
  }
  return kOk;
}

void print_point(const Output& out, const PointKey& key, const AccessPolicy& policy,
                 int depth, bool with_header) {
  std::vector<std::pair<std::string, Permission>> lines;
  for (const Path& path : enumerate_static_paths(policy.env(), depth))
    lines.emplace_back(path.to_string(), policy.get(path));
  std::sort(lines.begin(), lines.end());
  if (out.json) {
    for (const auto& [path, perm] : lines) {
      nlohmann::json j;
      j["point"] = key.to_string();
      j["path"] = path;
      j["perm"] = to_string(perm);
      std::cout << j.dump() << "\n";
    }
    return;
  }
  if (with_header) std::cout << "== " << key.to_string() << "\n";
  for (const auto& [path, perm] : lines)
    std::cout << path << "\t" << to_string(perm) << "\n";
}

int cmd_trace(const std::string& file, bool json, const std::string& point, int depth) {
  Output out{file, json};
  int status = kOk;
  auto loaded = load_checked(file, out, status);
  if (!loaded) return status;
  AliasCheckResult result = check_program_aliasing(*loaded->program, loaded->types);
  if (!result.accepted()) {
    emit_diagnostics(out, result.diagnostics);
    return kDiagnostics;
  }
  if (!point.empty()) {
    auto key = PointKey::parse(point);
    if (!key) {
      std::cerr << "muspark: malformed sequence point '" << point
                << "' (expected Proc#N:before or Proc#N:after)\n";
      return kUsage;
    }
    auto it = result.policies.find(*key);
    if (it == result.policies.end()) {
      std::cerr << "muspark: unknown sequence point " << key->to_string() << "\n";
      return kUsage;
    }
    print_point(out, it->first, it->second, depth, false);
    return kOk;
  }
  for (const auto& [key, policy] : result.policies)
    print_point(out, key, policy, depth, true);
  return kOk;
}

int cmd_fuzz(uint64_t seed, int count, uint64_t fuel, const std::string& config_file,
             bool unchecked, const std::string& out_file, bool json) {
  CampaignConfig config;
  if (!config_file.empty()) {
    std::string text;
    if (!read_file(config_file, text)) {
      std::cerr << "muspark: cannot read " << config_file << "\n";
      return kUsage;
    }
    auto parsed = GenConfig::from_json(text);
    if (!parsed) {
      std::cerr << "muspark: malformed fuzz config " << config_file << "\n";
      return kUsage;
    }
    config.gen = *parsed;
  }
  config.gen.seed = seed;
  config.count = count;
  config.fuel = fuel;
  config.unchecked = unchecked;
  CampaignReport report = run_campaign(config);

  if (json) {
    nlohmann::json j;
    j["generated"] = report.generated;
    j["accepted"] = report.accepted;
    j["rejected"] = report.rejected;
    j["completed"] = report.completed;
    j["blocked"] = report.blocked;
    j["fuel_exhausted"] = report.fuel_exhausted;
    j["crew_violations"] = report.crew_violations;
    j["consistency_failures"] = report.consistency_failures;
    j["roundtrip_failures"] = report.roundtrip_failures;
    j["order_mismatches"] = report.order_mismatches;
    j["typecheck_failures"] = report.typecheck_failures;
    j["ok"] = report.ok();
    if (report.failure) {
      j["failure"] = to_string(report.failure->kind);
      j["failure_seed"] = report.failure->seed;
    }
    std::cout << j.dump() << "\n";
  } else {
    std::cout << report.summary();
  }

  if (report.failure) {
    std::string path = out_file.empty()
                           ? "muspark-repro-" + std::to_string(report.failure->seed) + ".mus"
                           : out_file;
    std::ofstream repro(path, std::ios::binary);
    if (repro) {
      repro << report.failure->reproducer;
      std::cerr << "reproducer written to " << path << "\n";
    } else {
      std::cerr << "muspark: cannot write reproducer to " << path << "\n";
    }
    return kDiagnostics;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"muSPARK permission-based alias checker and reference interpreter"};
  app.require_subcommand(1);

  std::string format = "human";
  app.add_option("--format", format, "Output format: human or json")
      ->check(CLI::IsMember({"human", "json"}))
      ->capture_default_str();

  std::string file;

  auto* check = app.add_subcommand("check", "Alias-check a program");
  check->add_option("file", file, "Input .mus file")->required();

  auto* run = app.add_subcommand("run", "Execute a program's Main procedure");
  run->add_option("file", file, "Input .mus file")->required();
  uint64_t fuel = 100000;
  bool monitor = false;
  bool unchecked = false;
  bool trap_overflow = false;
  bool verbose = false;
  int depth_bound = 64;
  run->add_option("--fuel", fuel, "Statement budget")->capture_default_str();
  run->add_flag("--monitor", monitor, "Check the CREW condition at every sequence point");
  run->add_flag("--unchecked", unchecked,
                "Skip the alias check (monitoring uses a permissive policy)");
  run->add_flag("--trap-overflow", trap_overflow, "Block on Integer overflow");
  run->add_flag("--verbose", verbose, "Log one line per monitored sequence point");
  run->add_option("--depth-bound", depth_bound, "Dereference depth monitored per path")
      ->capture_default_str();

  auto* trace = app.add_subcommand("trace", "Print access policies at sequence points");
  trace->add_option("file", file, "Input .mus file")->required();
  std::string point;
  int depth = 4;
  trace->add_option("--point", point, "Sequence point key (Proc#N:before|after)");
  trace->add_option("--depth", depth, "Maximum path length printed")->capture_default_str();

  auto* fuzz = app.add_subcommand("fuzz", "Generate random programs and check properties");
  uint64_t seed = 1;
  int count = 100;
  uint64_t fuzz_fuel = 100000;
  std::string config_file;
  std::string out_file;
  bool fuzz_unchecked = false;
  fuzz->add_option("--seed", seed, "Campaign seed")->capture_default_str();
  fuzz->add_option("--count", count, "Number of programs")->capture_default_str();
  fuzz->add_option("--fuel", fuzz_fuel, "Statement budget per run")->capture_default_str();
  fuzz->add_option("--config", config_file, "Generator configuration (JSON)");
  fuzz->add_option("--out", out_file, "Reproducer output path");
  fuzz->add_flag("--unchecked", fuzz_unchecked,
                 "Negative control: run rejected programs under a permissive monitor");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  bool json = format == "json";
  if (check->parsed()) return cmd_check(file, json);
  if (run->parsed())
    return cmd_run(file, json, fuel, monitor, unchecked, trap_overflow, depth_bound,
                   verbose);
  if (trace->parsed()) return cmd_trace(file, json, point, depth);
  if (fuzz->parsed())
    return cmd_fuzz(seed, count, fuzz_fuel, config_file, fuzz_unchecked, out_file, json);
  return kUsage;
}
