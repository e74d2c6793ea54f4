#include "muspark/alias_check.hpp"

#include <algorithm>
#include <charconv>
#include <random>

namespace muspark {

const char* to_string(Rule rule) {
  switch (rule) {
    case Rule::PAssign: return "P-assign";
    case Rule::PAlloc: return "P-alloc";
    case Rule::PIf: return "P-if";
    case Rule::PWhile: return "P-while";
    case Rule::PCall: return "P-call";
    case Rule::ProcExit: return "Proc-exit";
  }
  return "?";
}

std::string PointKey::to_string() const {
  return proc + "#" + std::to_string(stmt) + (after ? ":after" : ":before");
}

std::optional<PointKey> PointKey::parse(std::string_view text) {
  size_t hash = text.find('#');
  size_t colon = text.rfind(':');
  if (hash == std::string_view::npos || colon == std::string_view::npos || colon < hash)
    return std::nullopt;
  PointKey key;
  key.proc = std::string(text.substr(0, hash));
  std::string_view num = text.substr(hash + 1, colon - hash - 1);
  auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), key.stmt);
  if (ec != std::errc{} || p != num.data() + num.size()) return std::nullopt;
  std::string_view suffix = text.substr(colon + 1);
  if (suffix == "after")
    key.after = true;
  else if (suffix == "before")
    key.after = false;
  else
    return std::nullopt;
  return key;
}

AccessPolicy entry_policy(const TypeEnv& env) {
  AccessPolicy policy(env);
  for (const auto& [name, var] : *env.vars) {
    Path root(name);
    if (var.is_param && var.mode == Mode::In) {
      policy.fresh(root, Permission::R);
    } else if (var.is_param && var.mode == Mode::InOut) {
      policy.fresh(root, Permission::RW);
    } else {
      // out parameters and locals
      policy.fresh(root, Permission::W);
      policy.cut(root);
    }
  }
  return policy;
}

namespace {

class ProcChecker {
 public:
  ProcChecker(const TypeInfo& types, const ProcDecl& proc, const CheckOptions& options,
              AliasCheckResult& result, bool record = true)
      : types_(types), proc_(proc), env_(types.env(proc)), result_(result),
        record_(record) {
    if (options.permute_expr_paths_seed) {
      rng_.seed(*options.permute_expr_paths_seed ^ std::hash<std::string>{}(proc.name));
      shuffle_ = [this](std::vector<Path>& paths) {
        std::shuffle(paths.begin(), paths.end(), rng_);
      };
    }
  }

  void run() {
    AccessPolicy policy = entry_policy(env_);
    if (!check_seq(policy, proc_.body)) return;
    bool ok = true;
    for (const Param& param : proc_.params) {
      if (param.mode == Mode::In) continue;
      Path root(param.name);
      root.span = param.span;
      Permission perm = policy.get(root);
      if (perm != Permission::RW) {
        ok = false;
        Diagnostic d;
        d.span = param.span;
        d.rule = Rule::ProcExit;
        d.path = root;
        d.required = Permission::RW;
        d.actual = perm;
        d.code = "exit-permission";
        d.message = "parameter " + param.name + " of " + proc_.name +
                    " must hold full ownership at the end of the procedure";
        result_.diagnostics.push_back(std::move(d));
      }
    }
    if (ok) result_.final_policies.emplace(proc_.name, std::move(policy));
  }

  bool run_sequence(AccessPolicy& policy, const std::vector<StmtPtr>& stmts) {
    return check_seq(policy, stmts);
  }

 private:
  const PathShuffle* shuffler() const { return shuffle_ ? &shuffle_ : nullptr; }

  void record(const AccessPolicy& policy, int stmt_id, bool after) {
    if (record_) result_.policies.emplace(PointKey{proc_.name, stmt_id, after}, policy);
  }

  bool fail(const PermError& err, Rule rule, Span fallback, std::string message) {
    Diagnostic d;
    d.span = err.path.span.line ? err.path.span : fallback;
    d.rule = rule;
    d.path = err.path;
    d.required = err.required;
    d.actual = err.actual;
    d.code = "insufficient-permission";
    d.message = std::move(message);
    result_.diagnostics.push_back(std::move(d));
    return false;
  }

  bool check_seq(AccessPolicy& policy, const std::vector<StmtPtr>& stmts) {
    for (const StmtPtr& s : stmts)
      if (!check_stmt(policy, *s)) return false;
    return true;
  }

  bool check_stmt(AccessPolicy& policy, const Stmt& s) {
    record(policy, s.id, false);
    if (!apply_stmt(policy, s)) return false;
    record(policy, s.id, true);
    return true;
  }

  bool apply_stmt(AccessPolicy& policy, const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        if (auto err = policy.move_expr(*s.rhs, shuffler()))
          return fail(*err, Rule::PAssign, s.span,
                      "right-hand side of assignment cannot be " +
                          std::string(err->required == Permission::RW ? "moved" : "read"));
        if (auto err = policy.check(s.lhs, Permission::W))
          return fail(*err, Rule::PAssign, s.span,
                      "assignment target lacks the write permission");
        policy.fresh(s.lhs, Permission::RW);
        policy.lift(s.lhs);
        return true;
      }
      case Stmt::Kind::Alloc: {
        if (auto err = policy.check(s.lhs, Permission::W))
          return fail(*err, Rule::PAlloc, s.span,
                      "allocation target lacks the write permission");
        Path target = s.lhs.deref();
        policy.fresh(target, Permission::W);
        policy.cut(target);
        policy.block(target);
        return true;
      }
      case Stmt::Kind::If: {
        if (auto err = policy.check_expr(*s.cond, Permission::R, shuffler()))
          return fail(*err, Rule::PIf, s.span, "condition operand cannot be read");
        AccessPolicy then_policy = policy;
        if (!check_seq(then_policy, s.then_body)) return false;
        AccessPolicy else_policy = policy;
        if (!check_seq(else_policy, s.else_body)) return false;
        policy = policy_meet(then_policy, else_policy);
        return true;
      }
      case Stmt::Kind::While: {
        if (auto err = policy.check_expr(*s.cond, Permission::R, shuffler()))
          return fail(*err, Rule::PWhile, s.span, "condition operand cannot be read");
        AccessPolicy body_policy = policy;
        if (!check_seq(body_policy, s.body)) return false;
        PolicyLeq leq = policy_leq(body_policy, policy);
        if (!leq.ok) {
          Diagnostic d;
          d.span = s.span;
          d.rule = Rule::PWhile;
          d.path = leq.witness;
          d.required = leq.rhs;  // permission at loop entry
          d.actual = leq.lhs;    // permission after one iteration
          d.code = "loop-permission-loss";
          d.message = "loop body weakens the permission of " + leq.witness.to_string();
          result_.diagnostics.push_back(std::move(d));
          return false;
        }
        // The policy at exit is the entry policy.
        return true;
      }
      case Stmt::Kind::Call:
        return apply_call(policy, s);
    }
    return true;
  }

  bool apply_call(AccessPolicy& policy, const Stmt& s) {
    const ProcDecl* callee = types_.program->find_procedure(s.callee);
    // Premises are checked on a scratch policy; the result policy is
    // computed from the pre-call one.
    AccessPolicy scratch = policy;
    std::vector<const Path*> restored;  // in-out then out argument paths
    for (Mode mode : {Mode::In, Mode::InOut, Mode::Out}) {
      for (size_t i = 0; i < s.args.size(); ++i) {
        if (callee->params[i].mode != mode) continue;
        const Arg& arg = s.args[i];
        if (mode == Mode::In) {
          ExprPtr path_expr;
          const Expr* expr = arg.expr.get();
          if (arg.is_path) {
            path_expr = Expr::path_ref(arg.path);
            expr = path_expr.get();
          }
          if (auto err = scratch.check_expr(*expr, Permission::R, shuffler()))
            return fail(*err, Rule::PCall, arg.span, "in argument cannot be read");
          scratch.observe_expr(*expr);
        } else if (mode == Mode::InOut) {
          if (auto err = scratch.check(arg.path, Permission::RW))
            return fail(*err, Rule::PCall, arg.span,
                        "in out argument lacks full ownership");
          scratch.borrow(arg.path);
          restored.push_back(&arg.path);
        } else {
          if (auto err = scratch.check(arg.path, Permission::W))
            return fail(*err, Rule::PCall, arg.span,
                        "out argument lacks the write permission");
          scratch.borrow(arg.path);
          restored.push_back(&arg.path);
        }
      }
    }
    // The callee returns full ownership of every in-out and out argument.
    for (const Path* path : restored) {
      policy.fresh(*path, Permission::RW);
      policy.lift(*path);
    }
    return true;
  }

  const TypeInfo& types_;
  const ProcDecl& proc_;
  TypeEnv env_;
  AliasCheckResult& result_;
  std::mt19937_64 rng_;
  PathShuffle shuffle_;
  bool record_ = true;
};

}  // namespace

AliasCheckResult check_program_aliasing(const Program& program, const TypeInfo& types,
                                        const CheckOptions& options) {
  AliasCheckResult result;
  for (const ProcDecl& proc : program.procedures)
    ProcChecker(types, proc, options, result).run();
  return result;
}

std::optional<Diagnostic> check_statement(const TypeInfo& types, AccessPolicy& policy,
                                          const Stmt& stmt, const CheckOptions& options) {
  AliasCheckResult scratch;
  ProcChecker checker(types, *policy.env().proc, options, scratch, /*record=*/false);
  std::vector<StmtPtr> one;
  one.push_back(stmt.clone());
  checker.run_sequence(policy, one);
  if (scratch.diagnostics.empty()) return std::nullopt;
  return scratch.diagnostics.front();
}

std::optional<Diagnostic> check_sequence(const TypeInfo& types, AccessPolicy& policy,
                                         const std::vector<StmtPtr>& stmts,
                                         const CheckOptions& options) {
  AliasCheckResult scratch;
  ProcChecker checker(types, *policy.env().proc, options, scratch, /*record=*/false);
  checker.run_sequence(policy, stmts);
  if (scratch.diagnostics.empty()) return std::nullopt;
  return scratch.diagnostics.front();
}

}  // namespace muspark
