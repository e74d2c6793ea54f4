// The alias safety judgment: statement rules over access policies, the
// per-procedure rule, and the policy map over all sequence points.
#ifndef MUSPARK_ALIAS_CHECK_HPP
#define MUSPARK_ALIAS_CHECK_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "muspark/permission.hpp"
#include "muspark/syntax.hpp"
#include "muspark/typecheck.hpp"

namespace muspark {

enum class Rule : uint8_t { PAssign, PAlloc, PIf, PWhile, PCall, ProcExit };

const char* to_string(Rule rule);

// A sequence point: before or after one statement of one procedure.
struct PointKey {
  std::string proc;
  int stmt = 0;
  bool after = false;

  bool operator<(const PointKey& other) const {
    if (proc != other.proc) return proc < other.proc;
    if (stmt != other.stmt) return stmt < other.stmt;
    return after < other.after;
  }
  bool operator==(const PointKey& other) const {
    return proc == other.proc && stmt == other.stmt && after == other.after;
  }

  // Rendered as `Proc#3:before` / `Proc#3:after`.
  std::string to_string() const;
  static std::optional<PointKey> parse(std::string_view text);
};

using PolicyMap = std::map<PointKey, AccessPolicy>;

struct Diagnostic {
  Span span;
  Rule rule = Rule::PAssign;
  Path path;
  Permission required = Permission::NO;
  Permission actual = Permission::NO;
  std::string code;
  std::string message;
};

struct CheckOptions {
  // When set, the processing order of expression operand paths is permuted
  // (seeded); accept/reject decisions must not depend on it.
  std::optional<uint64_t> permute_expr_paths_seed;
};

struct AliasCheckResult {
  PolicyMap policies;
  // Exit policies of the procedures that passed.
  std::map<std::string, AccessPolicy> final_policies;
  std::vector<Diagnostic> diagnostics;

  bool accepted() const { return diagnostics.empty(); }
};

// The initial policy of a procedure: R on in parameters, RW on in-out
// parameters, W with restricted extensions on out parameters and locals.
AccessPolicy entry_policy(const TypeEnv& env);

// One statement (or sequence) against a policy, without recording
// snapshots; the policy is updated in place up to the first diagnostic.
std::optional<Diagnostic> check_statement(const TypeInfo& types, AccessPolicy& policy,
                                          const Stmt& stmt,
                                          const CheckOptions& options = {});
std::optional<Diagnostic> check_sequence(const TypeInfo& types, AccessPolicy& policy,
                                         const std::vector<StmtPtr>& stmts,
                                         const CheckOptions& options = {});

// Checks every procedure independently; on a diagnostic the failing
// procedure's policy map is truncated at the failure point but the other
// procedures are still checked.
AliasCheckResult check_program_aliasing(const Program& program, const TypeInfo& types,
                                        const CheckOptions& options = {});

}  // namespace muspark

#endif  // MUSPARK_ALIAS_CHECK_HPP
