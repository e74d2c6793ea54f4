// Type checking for muSPARK programs, plus the type-level queries the alias
// analysis is built on (path typing, deep/shallow classification).
#ifndef MUSPARK_TYPECHECK_HPP
#define MUSPARK_TYPECHECK_HPP

#include <map>
#include <string>
#include <vector>

#include "muspark/result.hpp"
#include "muspark/syntax.hpp"

namespace muspark {

enum class TypeErrorCode : uint8_t {
  UnknownName,
  UnknownField,
  DerefOfNonAccess,
  BinopNonScalar,
  ModeArgNotPath,
  AllocTypeMismatch,
  DuplicateName,
  MissingMain,
  ForwardRecordRef,
  ArityMismatch,
  ArgTypeMismatch,
  AssignTypeMismatch,
  CondNotBoolean,
};

const char* to_string(TypeErrorCode code);

struct TypeError {
  Span span;
  TypeErrorCode code;
  std::string message;
};

struct VarInfo {
  Type type;
  Mode mode = Mode::In;  // meaningful when is_param
  bool is_param = false;
};

// Variable tables in declaration order (params first, then locals).
using VarTable = std::vector<std::pair<std::string, VarInfo>>;

class TypeInfo;

// The typing context of one procedure: the shared record table plus the
// procedure's variables.
struct TypeEnv {
  const TypeInfo* info = nullptr;
  const ProcDecl* proc = nullptr;
  const VarTable* vars = nullptr;

  const VarInfo* find_var(const std::string& name) const;
};

class TypeInfo {
 public:
  const Program* program = nullptr;
  std::map<std::string, const RecordDecl*> records;
  std::map<std::string, VarTable> proc_vars;

  const RecordDecl* find_record(const std::string& name) const;
  TypeEnv env(const ProcDecl& proc) const;
  TypeEnv env(const std::string& proc_name) const;
};

Result<TypeInfo, std::vector<TypeError>> check_program(const Program& program);

Result<Type, TypeError> type_of_path(const TypeEnv& env, const Path& path);

// True iff a pointer is reachable from a value of type `t`.
bool is_deep(const TypeInfo& info, const Type& t);

// Result of typing an expression; `any_access` marks the null literal,
// which inhabits every access type.
struct ExprType {
  bool any_access = false;
  Type type;

  bool matches(const Type& expected) const {
    return any_access ? expected.is_access() : type == expected;
  }
};

Result<ExprType, TypeError> type_of_expr(const TypeEnv& env, const Expr& expr);

// The path extension slots a type exposes: one per field for records, the
// dereference for access types, none for scalars.
std::vector<Segment> child_segments(const TypeInfo& info, const Type& t);

// Type of `t` extended by one segment, if valid.
Result<Type, TypeError> segment_type(const TypeInfo& info, const Type& t,
                                     const Segment& seg, Span span);

// All well-typed paths of the procedure's scope with at most `max_segments`
// segments, in declaration-then-structural order.
std::vector<Path> enumerate_static_paths(const TypeEnv& env, int max_segments);

}  // namespace muspark

#endif  // MUSPARK_TYPECHECK_HPP
