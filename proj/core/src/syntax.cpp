#include "muspark/syntax.hpp"

#include <algorithm>
#include <cassert>

namespace muspark {

const char* to_string(ScalarKind kind) {
  switch (kind) {
    case ScalarKind::Integer: return "Integer";
    case ScalarKind::Real: return "Real";
    case ScalarKind::Boolean: return "Boolean";
  }
  return "?";
}

Type Type::scalar(ScalarKind kind) {
  Type t;
  t.kind_ = Kind::Scalar;
  t.scalar_ = kind;
  return t;
}

Type Type::access(Type element) {
  Type t;
  t.kind_ = Kind::Access;
  t.element_ = std::make_shared<const Type>(std::move(element));
  return t;
}

Type Type::named(std::string record_name) {
  Type t;
  t.kind_ = Kind::Named;
  t.name_ = std::move(record_name);
  return t;
}

bool Type::operator==(const Type& other) const {
  if (kind_ != other.kind_) return false;
  switch (kind_) {
    case Kind::Scalar: return scalar_ == other.scalar_;
    case Kind::Access: return *element_ == *other.element_;
    case Kind::Named: return name_ == other.name_;
  }
  return false;
}

std::string Type::to_string() const {
  switch (kind_) {
    case Kind::Scalar: return muspark::to_string(scalar_);
    case Kind::Access: return "access " + element_->to_string();
    case Kind::Named: return name_;
  }
  return "?";
}

Path Path::child(Segment seg) const {
  Path p = *this;
  p.segments.push_back(std::move(seg));
  return p;
}

Path Path::prefix(size_t count) const {
  assert(count <= segments.size());
  Path p;
  p.root = root;
  p.segments.assign(segments.begin(), segments.begin() + static_cast<long>(count));
  p.span = span;
  return p;
}

size_t Path::deref_count() const {
  return static_cast<size_t>(
      std::count_if(segments.begin(), segments.end(),
                    [](const Segment& s) { return s.is_deref(); }));
}

bool Path::operator<(const Path& other) const {
  if (root != other.root) return root < other.root;
  return segments < other.segments;
}

std::string Path::to_string() const {
  std::string out = root;
  for (const Segment& seg : segments) {
    out += '.';
    out += seg.is_deref() ? "all" : seg.field;
  }
  return out;
}

std::vector<Path> prefixes(const Path& p) {
  std::vector<Path> out;
  out.reserve(p.segments.size());
  for (size_t n = 0; n < p.segments.size(); ++n) out.push_back(p.prefix(n));
  return out;
}

ExtensionKind extension_kind(const Path& p, const Path& q) {
  if (p.root != q.root) return ExtensionKind::NotExtension;
  if (q.segments.size() <= p.segments.size()) return ExtensionKind::NotExtension;
  if (!std::equal(p.segments.begin(), p.segments.end(), q.segments.begin()))
    return ExtensionKind::NotExtension;
  for (size_t i = p.segments.size(); i < q.segments.size(); ++i)
    if (q.segments[i].is_deref()) return ExtensionKind::Far;
  return ExtensionKind::Near;
}

bool comparable(const Path& p, const Path& q) {
  if (p.root != q.root) return false;
  size_t n = std::min(p.segments.size(), q.segments.size());
  return std::equal(p.segments.begin(), p.segments.begin() + static_cast<long>(n),
                    q.segments.begin());
}

const char* to_string(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Lt: return "<";
    case BinOp::Le: return "<=";
    case BinOp::Gt: return ">";
    case BinOp::Ge: return ">=";
    case BinOp::Eq: return "=";
    case BinOp::Ne: return "/=";
    case BinOp::And: return "and";
    case BinOp::Or: return "or";
  }
  return "?";
}

bool is_arithmetic(BinOp op) {
  return op == BinOp::Add || op == BinOp::Sub || op == BinOp::Mul || op == BinOp::Div;
}

bool is_comparison(BinOp op) {
  switch (op) {
    case BinOp::Lt:
    case BinOp::Le:
    case BinOp::Gt:
    case BinOp::Ge:
    case BinOp::Eq:
    case BinOp::Ne:
      return true;
    default:
      return false;
  }
}

bool is_logical(BinOp op) { return op == BinOp::And || op == BinOp::Or; }

ExprPtr Expr::path_ref(Path p) {
  auto e = std::make_unique<Expr>();
  e->kind = Kind::PathRef;
  e->span = p.span;
  e->path = std::move(p);
  return e;
}

ExprPtr Expr::int_lit(int64_t v) {
  auto e = std::make_unique<Expr>();
  e->kind = Kind::IntLit;
  e->int_value = v;
  return e;
}

ExprPtr Expr::real_lit(double v) {
  auto e = std::make_unique<Expr>();
  e->kind = Kind::RealLit;
  e->real_value = v;
  return e;
}

ExprPtr Expr::bool_lit(bool v) {
  auto e = std::make_unique<Expr>();
  e->kind = Kind::BoolLit;
  e->bool_value = v;
  return e;
}

ExprPtr Expr::binary(BinOp op, ExprPtr lhs, ExprPtr rhs) {
  auto e = std::make_unique<Expr>();
  e->kind = Kind::Binary;
  e->op = op;
  e->lhs = std::move(lhs);
  e->rhs = std::move(rhs);
  return e;
}

ExprPtr Expr::address_of(Path p) {
  auto e = std::make_unique<Expr>();
  e->kind = Kind::AddressOf;
  e->span = p.span;
  e->path = std::move(p);
  return e;
}

ExprPtr Expr::null_lit() {
  auto e = std::make_unique<Expr>();
  e->kind = Kind::Null;
  return e;
}

ExprPtr Expr::clone() const {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->span = span;
  e->path = path;
  e->int_value = int_value;
  e->real_value = real_value;
  e->bool_value = bool_value;
  e->op = op;
  if (lhs) e->lhs = lhs->clone();
  if (rhs) e->rhs = rhs->clone();
  return e;
}

Arg Arg::clone() const {
  Arg a;
  a.is_path = is_path;
  a.path = path;
  if (expr) a.expr = expr->clone();
  a.span = span;
  return a;
}

StmtPtr Stmt::assign(Path lhs, ExprPtr rhs) {
  auto s = std::make_unique<Stmt>();
  s->kind = Kind::Assign;
  s->lhs = std::move(lhs);
  s->rhs = std::move(rhs);
  return s;
}

StmtPtr Stmt::alloc(Path lhs, Type type) {
  auto s = std::make_unique<Stmt>();
  s->kind = Kind::Alloc;
  s->lhs = std::move(lhs);
  s->alloc_type = std::move(type);
  return s;
}

StmtPtr Stmt::if_stmt(ExprPtr cond, std::vector<StmtPtr> then_body,
                      std::vector<StmtPtr> else_body) {
  auto s = std::make_unique<Stmt>();
  s->kind = Kind::If;
  s->cond = std::move(cond);
  s->then_body = std::move(then_body);
  s->else_body = std::move(else_body);
  return s;
}

StmtPtr Stmt::while_stmt(ExprPtr cond, std::vector<StmtPtr> body) {
  auto s = std::make_unique<Stmt>();
  s->kind = Kind::While;
  s->cond = std::move(cond);
  s->body = std::move(body);
  return s;
}

StmtPtr Stmt::call(std::string callee, std::vector<Arg> args) {
  auto s = std::make_unique<Stmt>();
  s->kind = Kind::Call;
  s->callee = std::move(callee);
  s->args = std::move(args);
  return s;
}

StmtPtr Stmt::clone() const {
  auto s = std::make_unique<Stmt>();
  s->kind = kind;
  s->span = span;
  s->id = id;
  s->lhs = lhs;
  if (rhs) s->rhs = rhs->clone();
  s->alloc_type = alloc_type;
  if (cond) s->cond = cond->clone();
  s->then_body = clone_stmts(then_body);
  s->else_body = clone_stmts(else_body);
  s->body = clone_stmts(body);
  s->callee = callee;
  for (const Arg& a : args) s->args.push_back(a.clone());
  return s;
}

std::vector<StmtPtr> clone_stmts(const std::vector<StmtPtr>& stmts) {
  std::vector<StmtPtr> out;
  out.reserve(stmts.size());
  for (const StmtPtr& s : stmts) out.push_back(s->clone());
  return out;
}

ProcDecl ProcDecl::clone() const {
  ProcDecl p;
  p.name = name;
  p.params = params;
  p.locals = locals;
  p.body = clone_stmts(body);
  p.span = span;
  return p;
}

const RecordField* RecordDecl::find_field(const std::string& field_name) const {
  for (const RecordField& f : fields)
    if (f.name == field_name) return &f;
  return nullptr;
}

Program Program::clone() const {
  Program p;
  p.records = records;
  p.procedures.reserve(procedures.size());
  for (const ProcDecl& proc : procedures) p.procedures.push_back(proc.clone());
  return p;
}

const ProcDecl* Program::find_procedure(const std::string& name) const {
  for (const ProcDecl& p : procedures)
    if (p.name == name) return &p;
  return nullptr;
}

const RecordDecl* Program::find_record(const std::string& name) const {
  for (const RecordDecl& r : records)
    if (r.name == name) return &r;
  return nullptr;
}

namespace {

void number_stmts(std::vector<StmtPtr>& stmts, int& next) {
  for (StmtPtr& s : stmts) {
    s->id = next++;
    number_stmts(s->then_body, next);
    number_stmts(s->else_body, next);
    number_stmts(s->body, next);
  }
}

}  // namespace

void number_statements(Program& program) {
  for (ProcDecl& proc : program.procedures) {
    int next = 1;
    number_stmts(proc.body, next);
  }
}

bool equals_ignoring_spans(const Expr& a, const Expr& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Expr::Kind::PathRef:
    case Expr::Kind::AddressOf:
      return a.path == b.path;
    case Expr::Kind::IntLit: return a.int_value == b.int_value;
    case Expr::Kind::RealLit: return a.real_value == b.real_value;
    case Expr::Kind::BoolLit: return a.bool_value == b.bool_value;
    case Expr::Kind::Binary:
      return a.op == b.op && equals_ignoring_spans(*a.lhs, *b.lhs) &&
             equals_ignoring_spans(*a.rhs, *b.rhs);
    case Expr::Kind::Null: return true;
  }
  return false;
}

namespace {

bool equals_stmt_list(const std::vector<StmtPtr>& a, const std::vector<StmtPtr>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i)
    if (!equals_ignoring_spans(*a[i], *b[i])) return false;
  return true;
}

}  // namespace

bool equals_ignoring_spans(const Stmt& a, const Stmt& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Stmt::Kind::Assign:
      return a.lhs == b.lhs && equals_ignoring_spans(*a.rhs, *b.rhs);
    case Stmt::Kind::Alloc:
      return a.lhs == b.lhs && a.alloc_type == b.alloc_type;
    case Stmt::Kind::If:
      return equals_ignoring_spans(*a.cond, *b.cond) &&
             equals_stmt_list(a.then_body, b.then_body) &&
             equals_stmt_list(a.else_body, b.else_body);
    case Stmt::Kind::While:
      return equals_ignoring_spans(*a.cond, *b.cond) && equals_stmt_list(a.body, b.body);
    case Stmt::Kind::Call: {
      if (a.callee != b.callee || a.args.size() != b.args.size()) return false;
      for (size_t i = 0; i < a.args.size(); ++i) {
        const Arg& x = a.args[i];
        const Arg& y = b.args[i];
        if (x.is_path != y.is_path) return false;
        if (x.is_path ? !(x.path == y.path) : !equals_ignoring_spans(*x.expr, *y.expr))
          return false;
      }
      return true;
    }
  }
  return false;
}

bool equals_ignoring_spans(const Program& a, const Program& b) {
  if (a.records.size() != b.records.size()) return false;
  for (size_t i = 0; i < a.records.size(); ++i) {
    const RecordDecl& x = a.records[i];
    const RecordDecl& y = b.records[i];
    if (x.name != y.name || x.fields.size() != y.fields.size()) return false;
    for (size_t j = 0; j < x.fields.size(); ++j)
      if (x.fields[j].name != y.fields[j].name || !(x.fields[j].type == y.fields[j].type))
        return false;
  }
  if (a.procedures.size() != b.procedures.size()) return false;
  for (size_t i = 0; i < a.procedures.size(); ++i) {
    const ProcDecl& x = a.procedures[i];
    const ProcDecl& y = b.procedures[i];
    if (x.name != y.name || x.params.size() != y.params.size() ||
        x.locals.size() != y.locals.size())
      return false;
    for (size_t j = 0; j < x.params.size(); ++j)
      if (x.params[j].name != y.params[j].name || x.params[j].mode != y.params[j].mode ||
          !(x.params[j].type == y.params[j].type))
        return false;
    for (size_t j = 0; j < x.locals.size(); ++j)
      if (x.locals[j].name != y.locals[j].name || !(x.locals[j].type == y.locals[j].type))
        return false;
    if (!equals_stmt_list(x.body, y.body)) return false;
  }
  return true;
}

const char* to_string(Mode mode) {
  switch (mode) {
    case Mode::In: return "in";
    case Mode::InOut: return "in out";
    case Mode::Out: return "out";
  }
  return "?";
}

}  // namespace muspark
