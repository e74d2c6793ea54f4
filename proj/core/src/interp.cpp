#include "muspark/interp.hpp"

#include <cassert>
#include <sstream>

namespace muspark {

const char* to_string(BlockReason reason) {
  switch (reason) {
    case BlockReason::NullDeref: return "null-deref";
    case BlockReason::DivByZero: return "div-by-zero";
    case BlockReason::Overflow: return "overflow";
  }
  return "?";
}

const char* to_string(ExecOutcome::Kind kind) {
  switch (kind) {
    case ExecOutcome::Kind::Completed: return "completed";
    case ExecOutcome::Kind::Blocked: return "blocked";
    case ExecOutcome::Kind::FuelExhausted: return "fuel-exhausted";
    case ExecOutcome::Kind::CrewViolation: return "crew-violation";
  }
  return "?";
}

Value Value::integer(int64_t v) {
  Value out;
  out.kind = Kind::Int;
  out.int_value = v;
  return out;
}

Value Value::real(double v) {
  Value out;
  out.kind = Kind::Real;
  out.real_value = v;
  return out;
}

Value Value::boolean(bool v) {
  Value out;
  out.kind = Kind::Bool;
  out.bool_value = v;
  return out;
}

Value Value::address(Address a) {
  Value out;
  out.kind = Kind::Addr;
  out.addr = std::move(a);
  return out;
}

Value Value::null() { return Value{}; }

Value Value::record(std::map<std::string, Value> fields) {
  Value out;
  out.kind = Kind::Record;
  out.fields = std::move(fields);
  return out;
}

bool Value::operator==(const Value& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::Int: return int_value == other.int_value;
    case Kind::Real: return real_value == other.real_value;
    case Kind::Bool: return bool_value == other.bool_value;
    case Kind::Addr: return addr == other.addr;
    case Kind::Null: return true;
    case Kind::Record: return fields == other.fields;
  }
  return false;
}

Location Store::allocate(Value initial) {
  Location loc = next_++;
  cells_.emplace(loc, std::move(initial));
  return loc;
}

const Value* Store::read(const Address& addr) const {
  auto it = cells_.find(addr.base);
  if (it == cells_.end()) return nullptr;
  const Value* v = &it->second;
  for (const std::string& f : addr.fields) {
    if (v->kind != Value::Kind::Record) return nullptr;
    auto fit = v->fields.find(f);
    if (fit == v->fields.end()) return nullptr;
    v = &fit->second;
  }
  return v;
}

void Store::write(const Address& addr, Value value) {
  auto it = cells_.find(addr.base);
  assert(it != cells_.end() && "write to an unallocated location");
  Value* v = &it->second;
  for (const std::string& f : addr.fields) {
    assert(v->kind == Value::Kind::Record && "field write into a non-record");
    v = &v->fields.at(f);
  }
  *v = std::move(value);
}

Value default_value(const TypeInfo& info, const Type& type) {
  switch (type.kind()) {
    case Type::Kind::Scalar:
      switch (type.scalar_kind()) {
        case ScalarKind::Integer: return Value::integer(0);
        case ScalarKind::Real: return Value::real(0.0);
        case ScalarKind::Boolean: return Value::boolean(false);
      }
      return Value::null();
    case Type::Kind::Access:
      return Value::null();  // pointers default to null: no deep allocation
    case Type::Kind::Named: {
      const RecordDecl* rec = info.find_record(type.record_name());
      assert(rec && "unresolved record type");
      std::map<std::string, Value> fields;
      for (const RecordField& f : rec->fields)
        fields.emplace(f.name, default_value(info, f.type));
      return Value::record(std::move(fields));
    }
  }
  return Value::null();
}

Result<Address, Block> eval_lval(const Binding& binding, const Store& store,
                                 const Path& path) {
  auto it = binding.find(path.root);
  assert(it != binding.end() && "unbound variable");
  Address addr = it->second;
  for (const Segment& seg : path.segments) {
    if (!seg.is_deref()) {
      addr = addr.field(seg.field);
      continue;
    }
    const Value* v = store.read(addr);
    assert(v && "dangling address");
    if (v->kind == Value::Kind::Null) return Block{BlockReason::NullDeref, path.span};
    assert(v->kind == Value::Kind::Addr && "dereference of a non-pointer value");
    addr = v->addr;
  }
  return addr;
}

namespace {

Result<Value, Block> apply_binop(BinOp op, const Value& lhs, const Value& rhs, Span span,
                                 bool trap_overflow) {
  if (lhs.kind == Value::Kind::Bool) {
    bool a = lhs.bool_value;
    bool b = rhs.bool_value;
    switch (op) {
      case BinOp::And: return Value::boolean(a && b);
      case BinOp::Or: return Value::boolean(a || b);
      case BinOp::Lt: return Value::boolean(a < b);
      case BinOp::Le: return Value::boolean(a <= b);
      case BinOp::Gt: return Value::boolean(a > b);
      case BinOp::Ge: return Value::boolean(a >= b);
      case BinOp::Eq: return Value::boolean(a == b);
      case BinOp::Ne: return Value::boolean(a != b);
      default: assert(false && "arithmetic on Boolean"); return Value::null();
    }
  }
  if (lhs.kind == Value::Kind::Real) {
    double a = lhs.real_value;
    double b = rhs.real_value;
    switch (op) {
      case BinOp::Add: return Value::real(a + b);
      case BinOp::Sub: return Value::real(a - b);
      case BinOp::Mul: return Value::real(a * b);
      case BinOp::Div:
        if (b == 0.0) return Block{BlockReason::DivByZero, span};
        return Value::real(a / b);
      case BinOp::Lt: return Value::boolean(a < b);
      case BinOp::Le: return Value::boolean(a <= b);
      case BinOp::Gt: return Value::boolean(a > b);
      case BinOp::Ge: return Value::boolean(a >= b);
      case BinOp::Eq: return Value::boolean(a == b);
      case BinOp::Ne: return Value::boolean(a != b);
      default: assert(false && "logical operator on Real"); return Value::null();
    }
  }
  assert(lhs.kind == Value::Kind::Int && rhs.kind == lhs.kind);
  int64_t a = lhs.int_value;
  int64_t b = rhs.int_value;
  auto wrap = [&](int64_t result, bool overflowed) -> Result<Value, Block> {
    if (overflowed && trap_overflow) return Block{BlockReason::Overflow, span};
    return Value::integer(result);
  };
  switch (op) {
    case BinOp::Add: {
      int64_t r;
      bool o = __builtin_add_overflow(a, b, &r);
      return wrap(r, o);
    }
    case BinOp::Sub: {
      int64_t r;
      bool o = __builtin_sub_overflow(a, b, &r);
      return wrap(r, o);
    }
    case BinOp::Mul: {
      int64_t r;
      bool o = __builtin_mul_overflow(a, b, &r);
      return wrap(r, o);
    }
    case BinOp::Div:
      if (b == 0) return Block{BlockReason::DivByZero, span};
      if (a == INT64_MIN && b == -1) return wrap(INT64_MIN, true);
      return Value::integer(a / b);
    case BinOp::Lt: return Value::boolean(a < b);
    case BinOp::Le: return Value::boolean(a <= b);
    case BinOp::Gt: return Value::boolean(a > b);
    case BinOp::Ge: return Value::boolean(a >= b);
    case BinOp::Eq: return Value::boolean(a == b);
    case BinOp::Ne: return Value::boolean(a != b);
    default: assert(false && "logical operator on Integer"); return Value::null();
  }
}

}  // namespace

Result<Value, Block> eval_expr(const Binding& binding, const Store& store, const Expr& expr,
                               bool trap_overflow) {
  switch (expr.kind) {
    case Expr::Kind::IntLit: return Value::integer(expr.int_value);
    case Expr::Kind::RealLit: return Value::real(expr.real_value);
    case Expr::Kind::BoolLit: return Value::boolean(expr.bool_value);
    case Expr::Kind::Null: return Value::null();
    case Expr::Kind::PathRef: {
      auto addr = eval_lval(binding, store, expr.path);
      if (!addr) return addr.error();
      const Value* v = store.read(addr.value());
      assert(v && "read from an unallocated address");
      return *v;
    }
    case Expr::Kind::AddressOf: {
      auto addr = eval_lval(binding, store, expr.path);
      if (!addr) return addr.error();
      return Value::address(addr.value());
    }
    case Expr::Kind::Binary: {
      // Strict in both operands; no short-circuit.
      auto lhs = eval_expr(binding, store, *expr.lhs, trap_overflow);
      if (!lhs) return lhs.error();
      auto rhs = eval_expr(binding, store, *expr.rhs, trap_overflow);
      if (!rhs) return rhs.error();
      return apply_binop(expr.op, lhs.value(), rhs.value(), expr.span, trap_overflow);
    }
  }
  return Value::null();
}

namespace {

struct PathAddr {
  Path path;
  Address addr;
};

void collect_paths(const TypeInfo& info, const Store& store, const Type& type,
                   const Path& path, const Address& addr, int derefs_left,
                   std::vector<PathAddr>& out, int* skipped) {
  out.push_back(PathAddr{path, addr});
  switch (type.kind()) {
    case Type::Kind::Scalar:
      return;
    case Type::Kind::Access: {
      const Value* v = store.read(addr);
      if (!v || v->kind != Value::Kind::Addr) return;  // null prunes the spine
      if (derefs_left == 0) {
        if (skipped) ++(*skipped);
        return;
      }
      collect_paths(info, store, type.element(), path.deref(), v->addr, derefs_left - 1,
                    out, skipped);
      return;
    }
    case Type::Kind::Named: {
      const RecordDecl* rec = info.find_record(type.record_name());
      if (!rec) return;
      for (const RecordField& f : rec->fields)
        collect_paths(info, store, f.type, path.field(f.name), addr.field(f.name),
                      derefs_left, out, skipped);
      return;
    }
  }
}

std::vector<PathAddr> collect_frame_paths(const TypeEnv& env, const Binding& binding,
                                          const Store& store, int depth_bound,
                                          int* skipped) {
  std::vector<PathAddr> out;
  if (!env.vars) return out;
  for (const auto& [name, var] : *env.vars) {
    auto it = binding.find(name);
    if (it == binding.end()) continue;
    collect_paths(*env.info, store, var.type, Path(name), it->second, depth_bound, out,
                  skipped);
  }
  return out;
}

}  // namespace

std::vector<Path> enumerate_paths(const TypeEnv& env, const Binding& binding,
                                  const Store& store, int depth_bound, int* skipped) {
  std::vector<Path> out;
  for (PathAddr& pa : collect_frame_paths(env, binding, store, depth_bound, skipped))
    out.push_back(std::move(pa.path));
  return out;
}

std::optional<CrewViolationInfo> crew_check(const TypeEnv& env, const Binding& binding,
                                            const Store& store, const AccessPolicy& policy,
                                            int depth_bound) {
  std::vector<PathAddr> entries = collect_frame_paths(env, binding, store, depth_bound,
                                                      nullptr);
  std::map<Address, std::vector<size_t>> groups;
  for (size_t i = 0; i < entries.size(); ++i) groups[entries[i].addr].push_back(i);
  for (const auto& [addr, indices] : groups) {
    if (indices.size() < 2) continue;
    size_t writer = SIZE_MAX;
    std::vector<std::pair<size_t, Permission>> readable;
    for (size_t i : indices) {
      Permission perm = policy.get(entries[i].path);
      if (perm != Permission::NO) readable.emplace_back(i, perm);
      if (writer == SIZE_MAX && perm_leq(Permission::W, perm)) writer = i;
    }
    if (writer == SIZE_MAX || readable.size() < 2) continue;
    for (const auto& [i, perm] : readable) {
      if (i == writer) continue;
      CrewViolationInfo v;
      v.p = entries[writer].path;
      v.q = entries[i].path;
      v.perm_p = policy.get(entries[writer].path);
      v.perm_q = perm;
      return v;
    }
  }
  return std::nullopt;
}

namespace {

class Interp {
 public:
  Interp(const Program& program, const TypeInfo& types, const RunOptions& options)
      : program_(program), types_(types), opts_(options), fuel_(options.fuel) {}

  ExecOutcome run() {
    const ProcDecl* main = program_.find_procedure("Main");
    assert(main && "program has no Main");
    Binding binding;
    TypeEnv env = types_.env(*main);
    for (const Local& local : main->locals)
      binding.emplace(local.name,
                      Address(store_.allocate(default_value(types_, local.type))));
    Status status = exec_seq(*main, env, binding, main->body, 0);
    ExecOutcome out;
    switch (status) {
      case Status::Ok: out.kind = ExecOutcome::Kind::Completed; break;
      case Status::Blocked:
        out.kind = ExecOutcome::Kind::Blocked;
        out.reason = block_.reason;
        out.span = block_.span;
        break;
      case Status::Fuel: out.kind = ExecOutcome::Kind::FuelExhausted; break;
      case Status::Crew:
        out.kind = ExecOutcome::Kind::CrewViolation;
        out.crew = violation_;
        break;
    }
    out.store = std::move(store_);
    out.main_frame = std::move(binding);
    out.steps = steps_;
    return out;
  }

 private:
  enum class Status : uint8_t { Ok, Blocked, Fuel, Crew };

  Status blocked(Block b) {
    block_ = b;
    return Status::Blocked;
  }

  bool charge_fuel() {
    if (fuel_ == 0) return false;
    --fuel_;
    ++steps_;
    return true;
  }

  const AccessPolicy* policy_at(const std::string& proc, const PointKey& key) {
    if (opts_.permissive_policy) {
      auto it = permissive_.find(proc);
      if (it == permissive_.end()) {
        AccessPolicy policy(types_.env(proc));
        for (const auto& [name, var] : *policy.env().vars)
          policy.fresh(Path(name), Permission::RW);
        it = permissive_.emplace(proc, std::move(policy)).first;
      }
      return &it->second;
    }
    if (!opts_.policies) return nullptr;
    auto it = opts_.policies->find(key);
    return it == opts_.policies->end() ? nullptr : &it->second;
  }

  Status monitor(const ProcDecl& proc, const TypeEnv& env, const Binding& binding,
                 const Stmt& s, bool after) {
    if (!opts_.monitored) return Status::Ok;
    PointKey key{proc.name, s.id, after};
    const AccessPolicy* policy = policy_at(proc.name, key);
    if (!policy) return Status::Ok;
    if (opts_.verbose) {
      int skipped = 0;
      size_t count =
          enumerate_paths(env, binding, store_, opts_.depth_bound, &skipped).size();
      std::ostringstream line;
      line << key.to_string() << '\t' << store_.size() << '\t' << count;
      if (skipped) line << "\tunmonitored=" << skipped;
      opts_.verbose(line.str());
    }
    auto violation = crew_check(env, binding, store_, *policy, opts_.depth_bound);
    if (violation) {
      violation->point = key;
      violation_ = std::move(violation);
      return Status::Crew;
    }
    return Status::Ok;
  }

  Status exec_seq(const ProcDecl& proc, const TypeEnv& env, Binding& binding,
                  const std::vector<StmtPtr>& stmts, int depth) {
    for (const StmtPtr& s : stmts) {
      Status st = exec_stmt(proc, env, binding, *s, depth);
      if (st != Status::Ok) return st;
    }
    return Status::Ok;
  }

  Status exec_stmt(const ProcDecl& proc, const TypeEnv& env, Binding& binding,
                   const Stmt& s, int depth) {
    if (!charge_fuel()) return Status::Fuel;
    Status st = monitor(proc, env, binding, s, false);
    if (st != Status::Ok) return st;
    st = apply(proc, env, binding, s, depth);
    if (st != Status::Ok) return st;
    return monitor(proc, env, binding, s, true);
  }

  Status apply(const ProcDecl& proc, const TypeEnv& env, Binding& binding, const Stmt& s,
               int depth) {
    switch (s.kind) {
      case Stmt::Kind::Assign: {
        auto value = eval_expr(binding, store_, *s.rhs, opts_.trap_overflow);
        if (!value) return blocked(value.error());
        auto addr = eval_lval(binding, store_, s.lhs);
        if (!addr) return blocked(addr.error());
        store_.write(addr.value(), std::move(value.value()));
        return Status::Ok;
      }
      case Stmt::Kind::Alloc: {
        auto addr = eval_lval(binding, store_, s.lhs);
        if (!addr) return blocked(addr.error());
        Location loc = store_.allocate(default_value(types_, s.alloc_type));
        store_.write(addr.value(), Value::address(Address(loc)));
        return Status::Ok;
      }
      case Stmt::Kind::If: {
        auto cond = eval_expr(binding, store_, *s.cond, opts_.trap_overflow);
        if (!cond) return blocked(cond.error());
        return exec_seq(proc, env, binding,
                        cond.value().bool_value ? s.then_body : s.else_body, depth);
      }
      case Stmt::Kind::While: {
        while (true) {
          auto cond = eval_expr(binding, store_, *s.cond, opts_.trap_overflow);
          if (!cond) return blocked(cond.error());
          if (!cond.value().bool_value) return Status::Ok;
          Status st = exec_seq(proc, env, binding, s.body, depth);
          if (st != Status::Ok) return st;
          // Loop unrolling re-enters the while statement.
          if (!charge_fuel()) return Status::Fuel;
          st = monitor(proc, env, binding, s, false);
          if (st != Status::Ok) return st;
        }
      }
      case Stmt::Kind::Call:
        return exec_call(binding, s, depth);
    }
    return Status::Ok;
  }

  Status exec_call(Binding& caller, const Stmt& s, int depth) {
    if (depth >= opts_.max_call_depth) return Status::Fuel;
    const ProcDecl* callee = program_.find_procedure(s.callee);
    assert(callee && "call to an unknown procedure");
    TypeEnv env = types_.env(*callee);
    Binding binding;
    for (size_t i = 0; i < s.args.size(); ++i) {
      const Param& param = callee->params[i];
      const Arg& arg = s.args[i];
      if (param.mode == Mode::In) {
        // By-copy: a fresh location holding the argument's value.
        Result<Value, Block> value =
            arg.is_path
                ? [&]() -> Result<Value, Block> {
                    auto addr = eval_lval(caller, store_, arg.path);
                    if (!addr) return addr.error();
                    return *store_.read(addr.value());
                  }()
                : eval_expr(caller, store_, *arg.expr, opts_.trap_overflow);
        if (!value) return blocked(value.error());
        binding.emplace(param.name, Address(store_.allocate(std::move(value.value()))));
      } else {
        // By-reference: the callee works on the caller's address.
        auto addr = eval_lval(caller, store_, arg.path);
        if (!addr) return blocked(addr.error());
        binding.emplace(param.name, addr.value());
      }
    }
    for (const Local& local : callee->locals)
      binding.emplace(local.name,
                      Address(store_.allocate(default_value(types_, local.type))));
    return exec_seq(*callee, env, binding, callee->body, depth + 1);
  }

  const Program& program_;
  const TypeInfo& types_;
  const RunOptions& opts_;
  Store store_;
  uint64_t fuel_;
  uint64_t steps_ = 0;
  Block block_;
  std::optional<CrewViolationInfo> violation_;
  std::map<std::string, AccessPolicy> permissive_;
};

}  // namespace

ExecOutcome run_program(const Program& program, const TypeInfo& types,
                        const RunOptions& options) {
  return Interp(program, types, options).run();
}

}  // namespace muspark
