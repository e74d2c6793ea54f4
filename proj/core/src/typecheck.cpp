#include "muspark/typecheck.hpp"

#include <set>

namespace muspark {

const char* to_string(TypeErrorCode code) {
  switch (code) {
    case TypeErrorCode::UnknownName: return "unknown-name";
    case TypeErrorCode::UnknownField: return "unknown-field";
    case TypeErrorCode::DerefOfNonAccess: return "deref-of-non-access";
    case TypeErrorCode::BinopNonScalar: return "binop-non-scalar";
    case TypeErrorCode::ModeArgNotPath: return "mode-arg-not-path";
    case TypeErrorCode::AllocTypeMismatch: return "alloc-type-mismatch";
    case TypeErrorCode::DuplicateName: return "duplicate-name";
    case TypeErrorCode::MissingMain: return "missing-main";
    case TypeErrorCode::ForwardRecordRef: return "forward-record-ref";
    case TypeErrorCode::ArityMismatch: return "arity-mismatch";
    case TypeErrorCode::ArgTypeMismatch: return "arg-type-mismatch";
    case TypeErrorCode::AssignTypeMismatch: return "assign-type-mismatch";
    case TypeErrorCode::CondNotBoolean: return "cond-not-boolean";
  }
  return "?";
}

const VarInfo* TypeEnv::find_var(const std::string& name) const {
  for (const auto& [var, info] : *vars)
    if (var == name) return &info;
  return nullptr;
}

const RecordDecl* TypeInfo::find_record(const std::string& name) const {
  auto it = records.find(name);
  return it == records.end() ? nullptr : it->second;
}

TypeEnv TypeInfo::env(const ProcDecl& proc) const { return env(proc.name); }

TypeEnv TypeInfo::env(const std::string& proc_name) const {
  TypeEnv e;
  e.info = this;
  e.proc = program->find_procedure(proc_name);
  auto it = proc_vars.find(proc_name);
  e.vars = it == proc_vars.end() ? nullptr : &it->second;
  return e;
}

bool is_deep(const TypeInfo& info, const Type& t) {
  switch (t.kind()) {
    case Type::Kind::Scalar: return false;
    case Type::Kind::Access: return true;
    case Type::Kind::Named: {
      const RecordDecl* rec = info.find_record(t.record_name());
      if (!rec) return false;
      for (const RecordField& f : rec->fields)
        if (is_deep(info, f.type)) return true;
      return false;
    }
  }
  return false;
}

std::vector<Segment> child_segments(const TypeInfo& info, const Type& t) {
  std::vector<Segment> out;
  switch (t.kind()) {
    case Type::Kind::Scalar:
      break;
    case Type::Kind::Access:
      out.push_back(Segment::deref());
      break;
    case Type::Kind::Named: {
      const RecordDecl* rec = info.find_record(t.record_name());
      if (rec)
        for (const RecordField& f : rec->fields) out.push_back(Segment::make_field(f.name));
      break;
    }
  }
  return out;
}

Result<Type, TypeError> segment_type(const TypeInfo& info, const Type& t,
                                     const Segment& seg, Span span) {
  if (seg.is_deref()) {
    if (!t.is_access())
      return TypeError{span, TypeErrorCode::DerefOfNonAccess,
                       "cannot dereference a value of type " + t.to_string()};
    return t.element();
  }
  if (!t.is_named())
    return TypeError{span, TypeErrorCode::UnknownField,
                     "type " + t.to_string() + " has no field " + seg.field};
  const RecordDecl* rec = info.find_record(t.record_name());
  const RecordField* field = rec ? rec->find_field(seg.field) : nullptr;
  if (!field)
    return TypeError{span, TypeErrorCode::UnknownField,
                     "record " + t.record_name() + " has no field " + seg.field};
  return field->type;
}

Result<Type, TypeError> type_of_path(const TypeEnv& env, const Path& path) {
  const VarInfo* var = env.find_var(path.root);
  if (!var)
    return TypeError{path.span, TypeErrorCode::UnknownName,
                     "unknown variable " + path.root};
  Type t = var->type;
  for (const Segment& seg : path.segments) {
    auto next = segment_type(*env.info, t, seg, path.span);
    if (!next) return next.error();
    t = next.value();
  }
  return t;
}

Result<ExprType, TypeError> type_of_expr(const TypeEnv& env, const Expr& expr) {
  switch (expr.kind) {
    case Expr::Kind::PathRef: {
      auto t = type_of_path(env, expr.path);
      if (!t) return t.error();
      return ExprType{false, t.value()};
    }
    case Expr::Kind::IntLit: return ExprType{false, Type::integer()};
    case Expr::Kind::RealLit: return ExprType{false, Type::real()};
    case Expr::Kind::BoolLit: return ExprType{false, Type::boolean()};
    case Expr::Kind::Null: return ExprType{true, Type()};
    case Expr::Kind::AddressOf: {
      auto t = type_of_path(env, expr.path);
      if (!t) return t.error();
      return ExprType{false, Type::access(t.value())};
    }
    case Expr::Kind::Binary: {
      auto lt = type_of_expr(env, *expr.lhs);
      if (!lt) return lt.error();
      auto rt = type_of_expr(env, *expr.rhs);
      if (!rt) return rt.error();
      if (lt->any_access || rt->any_access)
        return TypeError{expr.span, TypeErrorCode::ArgTypeMismatch,
                         "null is not a scalar operand"};
      if (!lt->type.is_scalar())
        return TypeError{expr.lhs->span, TypeErrorCode::BinopNonScalar,
                         "operand of type " + lt->type.to_string() + " is not scalar"};
      if (!rt->type.is_scalar())
        return TypeError{expr.rhs->span, TypeErrorCode::BinopNonScalar,
                         "operand of type " + rt->type.to_string() + " is not scalar"};
      if (lt->type.scalar_kind() != rt->type.scalar_kind())
        return TypeError{expr.span, TypeErrorCode::ArgTypeMismatch,
                         "operands have different scalar types (" +
                             lt->type.to_string() + " vs " + rt->type.to_string() + ")"};
      ScalarKind kind = lt->type.scalar_kind();
      if (is_arithmetic(expr.op)) {
        if (kind == ScalarKind::Boolean)
          return TypeError{expr.span, TypeErrorCode::ArgTypeMismatch,
                           "arithmetic on Boolean operands"};
        return ExprType{false, Type::scalar(kind)};
      }
      if (is_comparison(expr.op)) return ExprType{false, Type::boolean()};
      // and / or
      if (kind != ScalarKind::Boolean)
        return TypeError{expr.span, TypeErrorCode::ArgTypeMismatch,
                         "logical operator on non-Boolean operands"};
      return ExprType{false, Type::boolean()};
    }
  }
  return TypeError{expr.span, TypeErrorCode::ArgTypeMismatch, "malformed expression"};
}

namespace {

class Checker {
 public:
  explicit Checker(const Program& program) : program_(program) {}

  Result<TypeInfo, std::vector<TypeError>> run() {
    info_.program = &program_;
    check_records();
    check_procedure_tables();
    if (errors_.empty())
      for (const ProcDecl& proc : program_.procedures) check_body(proc);
    if (!errors_.empty()) return errors_;
    return std::move(info_);
  }

 private:
  void error(Span span, TypeErrorCode code, std::string message) {
    errors_.push_back(TypeError{span, code, std::move(message)});
  }

  static bool is_builtin_type_name(const std::string& name) {
    return name == "Integer" || name == "Real" || name == "Boolean";
  }

  void check_records() {
    std::set<std::string> field_names;
    for (size_t i = 0; i < program_.records.size(); ++i) {
      const RecordDecl& rec = program_.records[i];
      if (is_builtin_type_name(rec.name)) {
        error(rec.span, TypeErrorCode::DuplicateName,
              "record name " + rec.name + " collides with a built-in type");
        continue;
      }
      if (!info_.records.emplace(rec.name, &rec).second) {
        error(rec.span, TypeErrorCode::DuplicateName,
              "record " + rec.name + " declared twice");
        continue;
      }
      record_index_[rec.name] = i;
      for (const RecordField& f : rec.fields) {
        // Field names are globally distinct across all records.
        if (!field_names.insert(f.name).second)
          error(f.span, TypeErrorCode::DuplicateName,
                "field name " + f.name + " is already used");
        check_field_type(f.type, i, /*under_access=*/false, f.span);
      }
    }
  }

  // Named fields may only refer to earlier records; recursion is allowed
  // through access types only.
  void check_field_type(const Type& t, size_t rec_index, bool under_access, Span span) {
    switch (t.kind()) {
      case Type::Kind::Scalar:
        return;
      case Type::Kind::Access:
        check_field_type(t.element(), rec_index, true, span);
        return;
      case Type::Kind::Named: {
        auto it = record_index_.find(t.record_name());
        if (it == record_index_.end()) {
          if (program_.find_record(t.record_name()))
            error(span, TypeErrorCode::ForwardRecordRef,
                  "record " + t.record_name() + " is declared later");
          else
            error(span, TypeErrorCode::UnknownName,
                  "unknown record " + t.record_name());
          return;
        }
        if (it->second == rec_index && !under_access)
          error(span, TypeErrorCode::ForwardRecordRef,
                "record " + t.record_name() + " may only refer to itself through access");
        return;
      }
    }
  }

  void check_type_resolvable(const Type& t, Span span) {
    switch (t.kind()) {
      case Type::Kind::Scalar:
        return;
      case Type::Kind::Access:
        check_type_resolvable(t.element(), span);
        return;
      case Type::Kind::Named:
        if (!info_.find_record(t.record_name()))
          error(span, TypeErrorCode::UnknownName, "unknown record " + t.record_name());
        return;
    }
  }

  void check_procedure_tables() {
    std::set<std::string> proc_names;
    bool has_main = false;
    for (const ProcDecl& proc : program_.procedures) {
      if (!proc_names.insert(proc.name).second) {
        error(proc.span, TypeErrorCode::DuplicateName,
              "procedure " + proc.name + " declared twice");
        continue;
      }
      if (proc.name == "Main") {
        if (proc.params.empty())
          has_main = true;
        else
          error(proc.span, TypeErrorCode::MissingMain,
                "Main must have an empty parameter list");
      }
      VarTable vars;
      std::set<std::string> names;
      for (const Param& p : proc.params) {
        if (!names.insert(p.name).second)
          error(p.span, TypeErrorCode::DuplicateName,
                "name " + p.name + " is declared twice in " + proc.name);
        check_type_resolvable(p.type, p.span);
        vars.emplace_back(p.name, VarInfo{p.type, p.mode, true});
      }
      for (const Local& l : proc.locals) {
        if (!names.insert(l.name).second)
          error(l.span, TypeErrorCode::DuplicateName,
                "name " + l.name + " is declared twice in " + proc.name);
        check_type_resolvable(l.type, l.span);
        vars.emplace_back(l.name, VarInfo{l.type, Mode::In, false});
      }
      info_.proc_vars.emplace(proc.name, std::move(vars));
    }
    if (!has_main)
      error(Span{}, TypeErrorCode::MissingMain,
            "program has no parameterless procedure Main");
  }

  void check_body(const ProcDecl& proc) {
    TypeEnv env = info_.env(proc);
    for (const StmtPtr& s : proc.body) check_stmt(env, *s);
  }

  void check_stmt(const TypeEnv& env, const Stmt& s) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        auto lt = type_of_path(env, s.lhs);
        if (!lt) {
          errors_.push_back(lt.error());
          return;
        }
        auto rt = type_of_expr(env, *s.rhs);
        if (!rt) {
          errors_.push_back(rt.error());
          return;
        }
        if (!rt->matches(lt.value()))
          error(s.span, TypeErrorCode::AssignTypeMismatch,
                "cannot assign " + (rt->any_access ? std::string("null") : rt->type.to_string()) +
                    " to a path of type " + lt.value().to_string());
        return;
      }
      case Stmt::Kind::Alloc: {
        check_type_resolvable(s.alloc_type, s.span);
        auto lt = type_of_path(env, s.lhs);
        if (!lt) {
          errors_.push_back(lt.error());
          return;
        }
        if (!(lt.value() == Type::access(s.alloc_type)))
          error(s.span, TypeErrorCode::AllocTypeMismatch,
                "allocation of " + s.alloc_type.to_string() + " requires a path of type " +
                    Type::access(s.alloc_type).to_string() + ", got " +
                    lt.value().to_string());
        return;
      }
      case Stmt::Kind::If:
      case Stmt::Kind::While: {
        auto ct = type_of_expr(env, *s.cond);
        if (!ct) {
          errors_.push_back(ct.error());
        } else if (ct->any_access || !(ct->type == Type::boolean())) {
          error(s.cond->span, TypeErrorCode::CondNotBoolean,
                "condition must be Boolean");
        }
        if (s.kind == Stmt::Kind::If) {
          for (const StmtPtr& t : s.then_body) check_stmt(env, *t);
          for (const StmtPtr& t : s.else_body) check_stmt(env, *t);
        } else {
          for (const StmtPtr& t : s.body) check_stmt(env, *t);
        }
        return;
      }
      case Stmt::Kind::Call: {
        const ProcDecl* callee = program_.find_procedure(s.callee);
        if (!callee) {
          error(s.span, TypeErrorCode::UnknownName, "unknown procedure " + s.callee);
          return;
        }
        if (callee->params.size() != s.args.size()) {
          error(s.span, TypeErrorCode::ArityMismatch,
                s.callee + " expects " + std::to_string(callee->params.size()) +
                    " arguments, got " + std::to_string(s.args.size()));
          return;
        }
        for (size_t i = 0; i < s.args.size(); ++i) {
          const Param& param = callee->params[i];
          const Arg& arg = s.args[i];
          if (param.mode != Mode::In && !arg.is_path) {
            error(arg.span, TypeErrorCode::ModeArgNotPath,
                  "argument for " + std::string(to_string(param.mode)) + " parameter " +
                      param.name + " must be a path");
            continue;
          }
          if (arg.is_path) {
            auto t = type_of_path(env, arg.path);
            if (!t) {
              errors_.push_back(t.error());
              continue;
            }
            if (!(t.value() == param.type))
              error(arg.span, TypeErrorCode::ArgTypeMismatch,
                    "argument type " + t.value().to_string() + " does not match parameter " +
                        param.name + " of type " + param.type.to_string());
          } else {
            auto t = type_of_expr(env, *arg.expr);
            if (!t) {
              errors_.push_back(t.error());
              continue;
            }
            if (!t->matches(param.type))
              error(arg.span, TypeErrorCode::ArgTypeMismatch,
                    "argument type " +
                        (t->any_access ? std::string("null") : t->type.to_string()) +
                        " does not match parameter " + param.name + " of type " +
                        param.type.to_string());
          }
        }
        return;
      }
    }
  }

  const Program& program_;
  TypeInfo info_;
  std::vector<TypeError> errors_;
  std::map<std::string, size_t> record_index_;
};

}  // namespace

Result<TypeInfo, std::vector<TypeError>> check_program(const Program& program) {
  return Checker(program).run();
}

namespace {

void extend_paths(const TypeInfo& info, const Type& t, const Path& p, int remaining,
                  std::vector<Path>& out) {
  out.push_back(p);
  if (remaining == 0) return;
  for (const Segment& seg : child_segments(info, t)) {
    auto child = segment_type(info, t, seg, p.span);
    if (!child) continue;
    extend_paths(info, child.value(), p.child(seg), remaining - 1, out);
  }
}

}  // namespace

std::vector<Path> enumerate_static_paths(const TypeEnv& env, int max_segments) {
  std::vector<Path> out;
  if (!env.vars) return out;
  for (const auto& [name, var] : *env.vars)
    extend_paths(*env.info, var.type, Path(name), max_segments, out);
  return out;
}

}  // namespace muspark
