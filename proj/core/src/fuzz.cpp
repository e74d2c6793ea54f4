#include "muspark/fuzz.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include <json.hpp>

#include "muspark/alias_check.hpp"
#include "muspark/interp.hpp"
#include "muspark/parser.hpp"
#include "muspark/permission.hpp"
#include "muspark/typecheck.hpp"

namespace muspark {

std::string GenConfig::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["max_records"] = max_records;
  j["max_fields"] = max_fields;
  j["max_type_nesting"] = max_type_nesting;
  j["max_procedures"] = max_procedures;
  j["max_params"] = max_params;
  j["max_locals"] = max_locals;
  j["max_statements"] = max_statements;
  j["max_expr_depth"] = max_expr_depth;
  j["loop_probability"] = loop_probability;
  j["if_probability"] = if_probability;
  j["call_probability"] = call_probability;
  j["deep_assign_bias"] = deep_assign_bias;
  j["overlap_arg_probability"] = overlap_arg_probability;
  return j.dump();
}

std::optional<GenConfig> GenConfig::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  GenConfig cfg;
  cfg.seed = j.value("seed", cfg.seed);
  cfg.max_records = j.value("max_records", cfg.max_records);
  cfg.max_fields = j.value("max_fields", cfg.max_fields);
  cfg.max_type_nesting = j.value("max_type_nesting", cfg.max_type_nesting);
  cfg.max_procedures = j.value("max_procedures", cfg.max_procedures);
  cfg.max_params = j.value("max_params", cfg.max_params);
  cfg.max_locals = j.value("max_locals", cfg.max_locals);
  cfg.max_statements = j.value("max_statements", cfg.max_statements);
  cfg.max_expr_depth = j.value("max_expr_depth", cfg.max_expr_depth);
  cfg.loop_probability = j.value("loop_probability", cfg.loop_probability);
  cfg.if_probability = j.value("if_probability", cfg.if_probability);
  cfg.call_probability = j.value("call_probability", cfg.call_probability);
  cfg.deep_assign_bias = j.value("deep_assign_bias", cfg.deep_assign_bias);
  cfg.overlap_arg_probability = j.value("overlap_arg_probability", cfg.overlap_arg_probability);
  return cfg;
}

uint64_t derive_seed(uint64_t base, uint64_t index) {
  // splitmix64 step over base + index
  uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

const char* to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::None: return "none";
    case FailureKind::TypecheckDisagreement: return "typecheck-disagreement";
    case FailureKind::RoundTrip: return "round-trip";
    case FailureKind::Consistency: return "consistency";
    case FailureKind::CrewViolation: return "crew-violation";
    case FailureKind::OrderDependence: return "order-dependence";
  }
  return "?";
}

namespace {

class Generator {
 public:
  explicit Generator(const GenConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  Program run() {
    gen_records();
    gen_signatures();
    for (ProcDecl& proc : prog_.procedures) gen_body(proc);
    number_statements(prog_);
    return std::move(prog_);
  }

 private:
  int rand_int(int lo, int hi) {  // inclusive bounds
    if (hi <= lo) return lo;
    return lo + static_cast<int>(rng_() % static_cast<uint64_t>(hi - lo + 1));
  }
  bool chance(double p) {
    return std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < p;
  }
  template <typename T>
  const T& pick(const std::vector<T>& v) {
    return v[static_cast<size_t>(rand_int(0, static_cast<int>(v.size()) - 1))];
  }

  Type random_scalar() {
    switch (rand_int(0, 3)) {
      case 0: return Type::boolean();
      case 1: return Type::real();
      default: return Type::integer();
    }
  }

  // Field types of record `index` may name earlier records directly and the
  // record itself only behind an access.
  Type random_type(int max_named_index, int nesting) {
    int roll = rand_int(0, 9);
    if (roll < 5 || (prog_.records.empty() && nesting == 0))
      return random_scalar();
    if (roll < 8 && nesting < cfg_.max_type_nesting)
      return Type::access(random_type(max_named_index + 1 <= static_cast<int>(prog_.records.size())
                                          ? max_named_index + 1
                                          : max_named_index,
                                      nesting + 1));
    if (max_named_index > 0)
      return Type::named(prog_.records[static_cast<size_t>(rand_int(0, max_named_index - 1))].name);
    return random_scalar();
  }

  void gen_records() {
    int count = rand_int(0, cfg_.max_records);
    for (int i = 0; i < count; ++i) {
      RecordDecl rec;
      rec.name = "R" + std::to_string(i + 1);
      int fields = rand_int(1, std::max(1, cfg_.max_fields));
      for (int f = 0; f < fields; ++f) {
        RecordField field;
        field.name = "F" + std::to_string(++field_counter_);
        // `i` earlier records may appear directly; access may reach record i
        // itself (recursion through pointers only).
        field.type = random_type(i, 0);
        rec.fields.push_back(std::move(field));
      }
      prog_.records.push_back(std::move(rec));
    }
  }

  Type random_var_type() {
    // Any declared record is fair game for procedure variables.
    return random_type(static_cast<int>(prog_.records.size()), 0);
  }

  void gen_signatures() {
    int extras = rand_int(0, cfg_.max_procedures);
    for (int i = 0; i < extras; ++i) {
      ProcDecl proc;
      proc.name = "P" + std::to_string(i + 1);
      int params = rand_int(0, cfg_.max_params);
      for (int p = 0; p < params; ++p) {
        Param param;
        param.name = "A" + std::to_string(p + 1);
        int roll = rand_int(0, 9);
        param.mode = roll < 4 ? Mode::In : (roll < 8 ? Mode::InOut : Mode::Out);
        param.type = random_var_type();
        proc.params.push_back(std::move(param));
      }
      add_locals(proc);
      prog_.procedures.push_back(std::move(proc));
    }
    ProcDecl main;
    main.name = "Main";
    add_locals(main);
    prog_.procedures.push_back(std::move(main));
  }

  void add_locals(ProcDecl& proc) {
    int locals = rand_int(0, cfg_.max_locals);
    for (int l = 0; l < locals; ++l)
      proc.locals.push_back(Local{"L" + std::to_string(l + 1), random_var_type(), {}});
  }

  // Every well-typed path of the procedure's scope up to a small depth.
  std::vector<std::pair<Path, Type>> scope_paths(const ProcDecl& proc) {
    std::vector<std::pair<Path, Type>> out;
    auto extend = [&](auto&& self, const Path& p, const Type& t, int depth) -> void {
      out.emplace_back(p, t);
      if (depth == 0) return;
      if (t.is_access()) {
        self(self, p.deref(), t.element(), depth - 1);
      } else if (t.is_named()) {
        const RecordDecl* rec = prog_.find_record(t.record_name());
        if (!rec) return;
        for (const RecordField& f : rec->fields)
          self(self, p.field(f.name), f.type, depth - 1);
      }
    };
    for (const Param& p : proc.params) extend(extend, Path(p.name), p.type, 3);
    for (const Local& l : proc.locals) extend(extend, Path(l.name), l.type, 3);
    return out;
  }

  std::vector<std::pair<Path, Type>> paths_of_type(
      const std::vector<std::pair<Path, Type>>& paths, const Type& t) {
    std::vector<std::pair<Path, Type>> out;
    for (const auto& entry : paths)
      if (entry.second == t) out.push_back(entry);
    return out;
  }

  std::vector<std::pair<Path, Type>> paths_of_scalar(
      const std::vector<std::pair<Path, Type>>& paths, ScalarKind kind) {
    return paths_of_type(paths, Type::scalar(kind));
  }

  ExprPtr scalar_literal(ScalarKind kind) {
    switch (kind) {
      case ScalarKind::Integer: return Expr::int_lit(rand_int(0, 10));
      case ScalarKind::Boolean: return Expr::bool_lit(chance(0.5));
      case ScalarKind::Real: {
        static const double pool[] = {0.0, 0.5, 1.5, 2.25, 3.14};
        return Expr::real_lit(pool[rand_int(0, 4)]);
      }
    }
    return Expr::int_lit(0);
  }

  ExprPtr gen_scalar_expr(const std::vector<std::pair<Path, Type>>& paths,
                          ScalarKind kind, int depth) {
    if (depth > 0 && chance(0.5)) {
      if (kind == ScalarKind::Boolean && chance(0.6)) {
        if (chance(0.6)) {
          // comparison over a random scalar kind
          ScalarKind operand = rand_int(0, 2) == 0 ? ScalarKind::Boolean
                               : rand_int(0, 1) == 0 ? ScalarKind::Real
                                                     : ScalarKind::Integer;
          static const BinOp cmps[] = {BinOp::Lt, BinOp::Le, BinOp::Gt,
                                       BinOp::Ge, BinOp::Eq, BinOp::Ne};
          return Expr::binary(cmps[rand_int(0, 5)],
                              gen_scalar_expr(paths, operand, depth - 1),
                              gen_scalar_expr(paths, operand, depth - 1));
        }
        return Expr::binary(chance(0.5) ? BinOp::And : BinOp::Or,
                            gen_scalar_expr(paths, ScalarKind::Boolean, depth - 1),
                            gen_scalar_expr(paths, ScalarKind::Boolean, depth - 1));
      }
      if (kind != ScalarKind::Boolean) {
        static const BinOp ops[] = {BinOp::Add, BinOp::Add, BinOp::Sub, BinOp::Mul};
        return Expr::binary(ops[rand_int(0, 3)], gen_scalar_expr(paths, kind, depth - 1),
                            gen_scalar_expr(paths, kind, depth - 1));
      }
    }
    auto candidates = paths_of_scalar(paths, kind);
    if (!candidates.empty() && chance(0.5))
      return Expr::path_ref(pick(candidates).first);
    return scalar_literal(kind);
  }

  // Expression of an arbitrary type, for assignments and in arguments.
  ExprPtr gen_expr_of_type(const std::vector<std::pair<Path, Type>>& paths,
                           const Type& t) {
    if (t.is_scalar()) return gen_scalar_expr(paths, t.scalar_kind(), cfg_.max_expr_depth);
    if (t.is_access()) {
      int roll = rand_int(0, 9);
      if (roll < 3) {
        auto same = paths_of_type(paths, t);
        if (!same.empty()) return Expr::path_ref(pick(same).first);
      }
      if (roll < 6) {
        auto pointees = paths_of_type(paths, t.element());
        if (!pointees.empty()) return Expr::address_of(pick(pointees).first);
      }
      return Expr::null_lit();
    }
    auto same = paths_of_type(paths, t);
    if (!same.empty()) return Expr::path_ref(pick(same).first);
    return nullptr;  // no value of this record type is constructible here
  }

  StmtPtr gen_assign(const std::vector<std::pair<Path, Type>>& paths) {
    if (paths.empty()) return nullptr;
    std::vector<std::pair<Path, Type>> targets;
    if (chance(cfg_.deep_assign_bias)) {
      for (const auto& entry : paths)
        if (!entry.second.is_scalar()) targets.push_back(entry);
    }
    if (targets.empty()) targets = paths;
    const auto& [lhs, type] = pick(targets);
    if (type.is_access() && chance(0.4)) return Stmt::alloc(lhs, type.element());
    ExprPtr rhs = gen_expr_of_type(paths, type);
    if (!rhs) return nullptr;
    return Stmt::assign(lhs, std::move(rhs));
  }

  // Allocate, initialize, then transfer ownership between two pointers of
  // the same scalar-element type; moves of owned pointers are otherwise rare.
  bool gen_move_chain(const std::vector<std::pair<Path, Type>>& paths,
                      std::vector<StmtPtr>& out) {
    std::vector<std::pair<Path, Path>> pairs;
    for (size_t i = 0; i < paths.size(); ++i) {
      const auto& [p, t] = paths[i];
      if (!t.is_access() || !t.element().is_scalar()) continue;
      for (size_t j = 0; j < paths.size(); ++j)
        if (j != i && paths[j].second == t && !(paths[j].first == p))
          pairs.emplace_back(p, paths[j].first);
    }
    if (pairs.empty()) return false;
    const auto& [src, dst] = pick(pairs);
    Type element = Type();
    for (const auto& [p, t] : paths)
      if (p == src) element = t.element();
    out.push_back(Stmt::alloc(src, element));
    out.push_back(Stmt::assign(src.deref(), scalar_literal(element.scalar_kind())));
    out.push_back(Stmt::assign(dst, Expr::path_ref(src)));
    return true;
  }

  StmtPtr gen_call(const ProcDecl& caller,
                   const std::vector<std::pair<Path, Type>>& paths) {
    if (prog_.procedures.empty()) return nullptr;
    const ProcDecl& callee = prog_.procedures[static_cast<size_t>(
        rand_int(0, static_cast<int>(prog_.procedures.size()) - 1))];
    std::vector<Arg> args;
    std::optional<Path> previous_path_arg;
    for (const Param& param : callee.params) {
      Arg arg;
      if (param.mode == Mode::In) {
        ExprPtr e = gen_expr_of_type(paths, param.type);
        if (!e) return nullptr;
        if (e->kind == Expr::Kind::PathRef) {
          arg.is_path = true;
          arg.path = e->path;
        } else {
          arg.expr = std::move(e);
        }
      } else {
        auto candidates = paths_of_type(paths, param.type);
        if (candidates.empty()) return nullptr;
        arg.is_path = true;
        arg.path = pick(candidates).first;
        if (previous_path_arg && chance(cfg_.overlap_arg_probability)) {
          // Deliberately overlapping arguments exercise the borrow checks.
          for (const auto& c : candidates) {
            if (comparable(c.first, *previous_path_arg)) {
              arg.path = c.first;
              break;
            }
          }
        }
        previous_path_arg = arg.path;
      }
      args.push_back(std::move(arg));
    }
    (void)caller;
    return Stmt::call(callee.name, std::move(args));
  }

  void gen_stmts(const ProcDecl& proc, const std::vector<std::pair<Path, Type>>& paths,
                 std::vector<StmtPtr>& out, int& budget, int nesting) {
    while (budget > 0) {
      --budget;
      if (nesting < 2 && budget >= 2 && chance(cfg_.loop_probability)) {
        std::vector<StmtPtr> body;
        int inner = rand_int(1, std::min(budget, 3));
        budget -= inner;
        gen_stmts(proc, paths, body, inner, nesting + 1);
        out.push_back(Stmt::while_stmt(gen_scalar_expr(paths, ScalarKind::Boolean, 2),
                                       std::move(body)));
        continue;
      }
      if (nesting < 2 && budget >= 2 && chance(cfg_.if_probability)) {
        std::vector<StmtPtr> then_body;
        std::vector<StmtPtr> else_body;
        int inner = rand_int(1, std::min(budget, 4));
        budget -= inner;
        int then_share = rand_int(0, inner);
        int else_share = inner - then_share;
        gen_stmts(proc, paths, then_body, then_share, nesting + 1);
        gen_stmts(proc, paths, else_body, else_share, nesting + 1);
        out.push_back(Stmt::if_stmt(gen_scalar_expr(paths, ScalarKind::Boolean, 2),
                                    std::move(then_body), std::move(else_body)));
        continue;
      }
      if (budget >= 2 && chance(0.15) && gen_move_chain(paths, out)) {
        budget -= 2;
        continue;
      }
      if (chance(cfg_.call_probability)) {
        if (StmtPtr call = gen_call(proc, paths)) {
          out.push_back(std::move(call));
          continue;
        }
      }
      if (StmtPtr assign = gen_assign(paths)) {
        bool was_alloc = assign->kind == Stmt::Kind::Alloc;
        Path target = assign->lhs;
        Type alloc_type = assign->alloc_type;
        out.push_back(std::move(assign));
        // Often initialize right after allocating; uninitialized memory keeps
        // its write-only permission and stalls most later uses.
        if (was_alloc && alloc_type.is_scalar() && budget > 0 && chance(0.6)) {
          --budget;
          out.push_back(Stmt::assign(
              target.deref(),
              gen_scalar_expr(paths, alloc_type.scalar_kind(), cfg_.max_expr_depth)));
        }
      }
    }
  }

  void gen_body(ProcDecl& proc) {
    auto paths = scope_paths(proc);
    int budget = rand_int(0, cfg_.max_statements);
    gen_stmts(proc, paths, proc.body, budget, 0);
  }

  const GenConfig& cfg_;
  std::mt19937_64 rng_;
  Program prog_;
  int field_counter_ = 0;
};

}  // namespace

Program generate_program(const GenConfig& config) { return Generator(config).run(); }

namespace {

// Greedy in-place removal with revert; returns true when one removal stuck.
bool try_remove_in_lists(Program& prog, std::vector<StmtPtr>& list,
                         const FailPredicate& pred) {
  for (size_t i = 0; i < list.size(); ++i) {
    StmtPtr saved = std::move(list[i]);
    list.erase(list.begin() + static_cast<long>(i));
    number_statements(prog);
    if (pred(prog)) return true;
    list.insert(list.begin() + static_cast<long>(i), std::move(saved));
    number_statements(prog);
    Stmt& s = *list[i];
    if (try_remove_in_lists(prog, s.then_body, pred)) return true;
    if (try_remove_in_lists(prog, s.else_body, pred)) return true;
    if (try_remove_in_lists(prog, s.body, pred)) return true;
  }
  return false;
}

}  // namespace

Program shrink_program(const Program& input, const FailPredicate& predicate) {
  Program prog = input.clone();
  if (!predicate(prog)) return prog;

  bool changed = true;
  while (changed) {
    changed = false;
    for (ProcDecl& proc : prog.procedures)
      while (try_remove_in_lists(prog, proc.body, predicate)) changed = true;
  }

  for (size_t i = 0; i < prog.procedures.size();) {
    if (prog.procedures[i].name == "Main") {
      ++i;
      continue;
    }
    ProcDecl saved = std::move(prog.procedures[i]);
    prog.procedures.erase(prog.procedures.begin() + static_cast<long>(i));
    if (predicate(prog)) continue;
    prog.procedures.insert(prog.procedures.begin() + static_cast<long>(i),
                           std::move(saved));
    ++i;
  }

  for (RecordDecl& rec : prog.records) {
    for (size_t f = 0; f < rec.fields.size();) {
      RecordField saved = rec.fields[f];
      rec.fields.erase(rec.fields.begin() + static_cast<long>(f));
      if (predicate(prog)) continue;
      rec.fields.insert(rec.fields.begin() + static_cast<long>(f), std::move(saved));
      ++f;
    }
  }
  for (size_t r = 0; r < prog.records.size();) {
    RecordDecl saved = prog.records[r];
    prog.records.erase(prog.records.begin() + static_cast<long>(r));
    if (predicate(prog)) continue;
    prog.records.insert(prog.records.begin() + static_cast<long>(r), std::move(saved));
    ++r;
  }
  return prog;
}

namespace {

std::string reproducer_text(const Program& prog, const GenConfig& gen, uint64_t seed,
                            FailureKind kind) {
  std::ostringstream out;
  out << "-- muspark fuzz reproducer\n";
  out << "-- seed: " << seed << "\n";
  out << "-- failure: " << to_string(kind) << "\n";
  out << "-- config: " << gen.to_json() << "\n\n";
  out << pretty_print(prog);
  return out.str();
}

struct ProgramVerdict {
  bool typechecks = false;
  bool accepted = false;
  ExecOutcome::Kind outcome = ExecOutcome::Kind::Completed;
  bool crew = false;
  bool consistent = true;
};

// The checks one campaign iteration applies; reused by the shrinking
// predicates so that a reduced program must fail the same way.
ProgramVerdict evaluate(const Program& prog, const CampaignConfig& cfg) {
  ProgramVerdict v;
  auto types = check_program(prog);
  if (!types) return v;
  v.typechecks = true;
  AliasCheckResult analysis = check_program_aliasing(prog, types.value());
  v.accepted = analysis.accepted();
  if (v.accepted) {
    for (const auto& [key, policy] : analysis.policies) {
      if (consistency_violation(policy, cfg.consistency_depth)) {
        v.consistent = false;
        break;
      }
    }
  }
  bool run_it = cfg.monitored && (v.accepted || cfg.unchecked);
  if (run_it) {
    RunOptions opts;
    opts.fuel = cfg.fuel;
    opts.monitored = true;
    if (v.accepted && !cfg.unchecked)
      opts.policies = &analysis.policies;
    else
      opts.permissive_policy = true;
    ExecOutcome outcome = run_program(prog, types.value(), opts);
    v.outcome = outcome.kind;
    v.crew = outcome.kind == ExecOutcome::Kind::CrewViolation;
  }
  return v;
}

}  // namespace

std::string CampaignReport::summary() const {
  std::ostringstream out;
  out << "generated: " << generated << "\n"
      << "accepted: " << accepted << "\n"
      << "rejected: " << rejected << "\n"
      << "completed: " << completed << "\n"
      << "blocked: " << blocked << "\n"
      << "fuel-exhausted: " << fuel_exhausted << "\n"
      << "crew-violations: " << crew_violations << "\n"
      << "consistency-failures: " << consistency_failures << "\n"
      << "round-trip-failures: " << roundtrip_failures << "\n"
      << "order-mismatches: " << order_mismatches << "\n"
      << "typecheck-failures: " << typecheck_failures << "\n";
  if (failure) {
    out << "FAIL: " << to_string(failure->kind) << " (seed " << failure->seed << ")";
    if (!failure->detail.empty()) out << ": " << failure->detail;
    out << "\n";
  }
  return out.str();
}

CampaignReport run_campaign(const CampaignConfig& config) {
  CampaignReport report;
  int attempts = config.max_attempts > 0 ? config.max_attempts : config.count;
  int wanted = config.required_accepted;
  for (int i = 0; i < attempts; ++i) {
    if (wanted > 0 && report.accepted >= wanted) break;
    if (wanted == 0 && report.generated >= config.count) break;
    uint64_t seed = derive_seed(config.gen.seed, static_cast<uint64_t>(i));
    GenConfig gen = config.gen;
    gen.seed = seed;
    Program prog = generate_program(gen);
    ++report.generated;

    auto fail = [&](FailureKind kind, std::string detail, const FailPredicate& pred) {
      if (report.failure) return;
      Program shrunk = shrink_program(prog, pred);
      report.failure = CampaignFailure{kind, seed, std::move(detail),
                                       reproducer_text(shrunk, gen, seed, kind)};
    };

    auto types = check_program(prog);
    if (!types) {
      ++report.typecheck_failures;
      fail(FailureKind::TypecheckDisagreement, "generated program fails to type check",
           [](const Program& p) { return !check_program(p).ok(); });
      continue;
    }

    auto reparsed = parse_source(pretty_print(prog));
    if (!reparsed || !equals_ignoring_spans(reparsed.value(), prog)) {
      ++report.roundtrip_failures;
      fail(FailureKind::RoundTrip, "parse(print(p)) differs from p",
           [](const Program& p) {
             auto again = parse_source(pretty_print(p));
             return !again || !equals_ignoring_spans(again.value(), p);
           });
      continue;
    }

    AliasCheckResult analysis;
    bool accepted = false;
    if (!config.unchecked) {
      analysis = check_program_aliasing(prog, types.value());
      accepted = analysis.accepted();
      if (accepted)
        ++report.accepted;
      else
        ++report.rejected;

      if (config.check_order_independence) {
        CheckOptions permuted;
        permuted.permute_expr_paths_seed = derive_seed(seed, 0xfeed);
        AliasCheckResult other = check_program_aliasing(prog, types.value(), permuted);
        bool same = other.accepted() == accepted;
        if (same && accepted) {
          for (const auto& [name, policy] : analysis.final_policies) {
            auto it = other.final_policies.find(name);
            if (it == other.final_policies.end() || !policy_equal(policy, it->second)) {
              same = false;
              break;
            }
          }
        }
        if (!same) {
          ++report.order_mismatches;
          fail(FailureKind::OrderDependence,
               "permuting expression path order changed the verdict",
               [&](const Program& p) {
                 auto t = check_program(p);
                 if (!t) return false;
                 CheckOptions perm;
                 perm.permute_expr_paths_seed = derive_seed(seed, 0xfeed);
                 return check_program_aliasing(p, t.value()).accepted() !=
                        check_program_aliasing(p, t.value(), perm).accepted();
               });
          continue;
        }
      }

      if (accepted) {
        bool consistent = true;
        for (const auto& [key, policy] : analysis.policies) {
          if (auto violation = consistency_violation(policy, config.consistency_depth)) {
            consistent = false;
            ++report.consistency_failures;
            fail(FailureKind::Consistency,
                 "invariant " + std::to_string(violation->invariant) + " broken at " +
                     key.to_string() + " between " + violation->path.to_string() +
                     " and " + violation->extension.to_string(),
                 [&](const Program& p) {
                   auto verdict = evaluate(p, config);
                   return verdict.typechecks && verdict.accepted && !verdict.consistent;
                 });
            break;
          }
        }
        if (!consistent) continue;
      }
    }

    bool run_it = config.monitored && ((accepted && !config.unchecked) || config.unchecked);
    if (run_it) {
      RunOptions opts;
      opts.fuel = config.fuel;
      opts.monitored = true;
      if (accepted && !config.unchecked)
        opts.policies = &analysis.policies;
      else
        opts.permissive_policy = true;
      ExecOutcome outcome = run_program(prog, types.value(), opts);
      switch (outcome.kind) {
        case ExecOutcome::Kind::Completed: ++report.completed; break;
        case ExecOutcome::Kind::Blocked: ++report.blocked; break;
        case ExecOutcome::Kind::FuelExhausted: ++report.fuel_exhausted; break;
        case ExecOutcome::Kind::CrewViolation: {
          ++report.crew_violations;
          if (!config.unchecked) {
            std::string detail = "paths " + outcome.crew->p.to_string() + " (" +
                                 to_string(outcome.crew->perm_p) + ") and " +
                                 outcome.crew->q.to_string() + " (" +
                                 to_string(outcome.crew->perm_q) + ") alias at " +
                                 outcome.crew->point.to_string();
            fail(FailureKind::CrewViolation, std::move(detail),
                 [&](const Program& p) {
                   auto verdict = evaluate(p, config);
                   return verdict.typechecks && verdict.accepted && verdict.crew;
                 });
          }
          break;
        }
      }
    }
  }
  return report;
}

}  // namespace muspark
