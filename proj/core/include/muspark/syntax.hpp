// Abstract syntax for the muSPARK language: types, paths, expressions,
// statements and declarations, plus the path algebra used by the alias
// analysis.
#ifndef MUSPARK_SYNTAX_HPP
#define MUSPARK_SYNTAX_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace muspark {

// Half-open source range, 1-based lines and columns.
struct Span {
  int line = 0;
  int col = 0;
  int end_line = 0;
  int end_col = 0;
};

enum class ScalarKind : uint8_t { Integer, Real, Boolean };

const char* to_string(ScalarKind kind);

// A muSPARK type: scalar, pointer (`access t`) or named record.
class Type {
 public:
  enum class Kind : uint8_t { Scalar, Access, Named };

  Type() = default;

  static Type scalar(ScalarKind kind);
  static Type integer() { return scalar(ScalarKind::Integer); }
  static Type real() { return scalar(ScalarKind::Real); }
  static Type boolean() { return scalar(ScalarKind::Boolean); }
  static Type access(Type element);
  static Type named(std::string record_name);

  Kind kind() const { return kind_; }
  bool is_scalar() const { return kind_ == Kind::Scalar; }
  bool is_access() const { return kind_ == Kind::Access; }
  bool is_named() const { return kind_ == Kind::Named; }

  ScalarKind scalar_kind() const { return scalar_; }
  const Type& element() const { return *element_; }
  const std::string& record_name() const { return name_; }

  bool operator==(const Type& other) const;
  bool operator!=(const Type& other) const { return !(*this == other); }

  std::string to_string() const;

 private:
  Kind kind_ = Kind::Scalar;
  ScalarKind scalar_ = ScalarKind::Integer;
  std::shared_ptr<const Type> element_;  // Access element type
  std::string name_;                     // Named record name
};

// One step of a path: a record field selection or a pointer dereference.
struct Segment {
  enum class Kind : uint8_t { Field, Deref };
  Kind kind = Kind::Field;
  std::string field;  // empty for Deref

  static Segment make_field(std::string name) {
    return Segment{Kind::Field, std::move(name)};
  }
  static Segment deref() { return Segment{Kind::Deref, {}}; }

  bool is_deref() const { return kind == Kind::Deref; }
  bool operator==(const Segment& other) const {
    return kind == other.kind && field == other.field;
  }
  bool operator<(const Segment& other) const {
    if (kind != other.kind) return kind < other.kind;
    return field < other.field;
  }
};

// An l-value: a variable root followed by field selections and dereferences.
struct Path {
  std::string root;
  std::vector<Segment> segments;
  Span span;

  Path() = default;
  explicit Path(std::string root_name) : root(std::move(root_name)) {}
  Path(std::string root_name, std::vector<Segment> segs)
      : root(std::move(root_name)), segments(std::move(segs)) {}

  Path child(Segment seg) const;
  Path field(std::string name) const { return child(Segment::make_field(std::move(name))); }
  Path deref() const { return child(Segment::deref()); }

  // Prefix with the first `count` segments (count <= segments.size()).
  Path prefix(size_t count) const;
  // Longest strict prefix; root must have at least one segment.
  Path parent() const { return prefix(segments.size() - 1); }

  size_t deref_count() const;

  bool operator==(const Path& other) const {
    return root == other.root && segments == other.segments;
  }
  bool operator<(const Path& other) const;

  std::string to_string() const;
};

// All strict prefixes of `p`, shortest first.
std::vector<Path> prefixes(const Path& p);

enum class ExtensionKind { NotExtension, Near, Far };

// Classifies `q` relative to `p`: Near iff q strictly extends p without
// additional dereferences, Far iff it adds at least one.
ExtensionKind extension_kind(const Path& p, const Path& q);

// True iff one path is a prefix of the other (or they are equal).
bool comparable(const Path& p, const Path& q);

enum class BinOp : uint8_t { Add, Sub, Mul, Div, Lt, Le, Gt, Ge, Eq, Ne, And, Or };

const char* to_string(BinOp op);
bool is_arithmetic(BinOp op);
bool is_comparison(BinOp op);
bool is_logical(BinOp op);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  enum class Kind : uint8_t { PathRef, IntLit, RealLit, BoolLit, Binary, AddressOf, Null };

  Kind kind = Kind::Null;
  Span span;

  Path path;             // PathRef, AddressOf
  int64_t int_value = 0; // IntLit
  double real_value = 0; // RealLit
  bool bool_value = false;  // BoolLit
  BinOp op = BinOp::Add; // Binary
  ExprPtr lhs;           // Binary
  ExprPtr rhs;           // Binary

  static ExprPtr path_ref(Path p);
  static ExprPtr int_lit(int64_t v);
  static ExprPtr real_lit(double v);
  static ExprPtr bool_lit(bool v);
  static ExprPtr binary(BinOp op, ExprPtr lhs, ExprPtr rhs);
  static ExprPtr address_of(Path p);
  static ExprPtr null_lit();

  ExprPtr clone() const;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

// A call argument: a bare path (required for in-out and out parameters) or a
// general expression.
struct Arg {
  bool is_path = false;
  Path path;   // valid when is_path
  ExprPtr expr;  // valid when !is_path
  Span span;

  Arg clone() const;
};

struct Stmt {
  enum class Kind : uint8_t { Assign, Alloc, If, While, Call };

  Kind kind = Kind::Assign;
  Span span;
  // Pre-order statement identifier within the enclosing procedure, 1-based.
  int id = 0;

  Path lhs;         // Assign, Alloc
  ExprPtr rhs;      // Assign
  Type alloc_type;  // Alloc
  ExprPtr cond;     // If, While
  std::vector<StmtPtr> then_body;  // If
  std::vector<StmtPtr> else_body;  // If (may be empty)
  std::vector<StmtPtr> body;       // While
  std::string callee;              // Call
  std::vector<Arg> args;           // Call

  static StmtPtr assign(Path lhs, ExprPtr rhs);
  static StmtPtr alloc(Path lhs, Type type);
  static StmtPtr if_stmt(ExprPtr cond, std::vector<StmtPtr> then_body,
                         std::vector<StmtPtr> else_body);
  static StmtPtr while_stmt(ExprPtr cond, std::vector<StmtPtr> body);
  static StmtPtr call(std::string callee, std::vector<Arg> args);

  StmtPtr clone() const;
};

std::vector<StmtPtr> clone_stmts(const std::vector<StmtPtr>& stmts);

enum class Mode : uint8_t { In, InOut, Out };

const char* to_string(Mode mode);

struct Param {
  std::string name;
  Mode mode = Mode::In;
  Type type;
  Span span;
};

struct Local {
  std::string name;
  Type type;
  Span span;
};

struct ProcDecl {
  std::string name;
  std::vector<Param> params;
  std::vector<Local> locals;
  std::vector<StmtPtr> body;
  Span span;

  ProcDecl clone() const;
};

struct RecordField {
  std::string name;
  Type type;
  Span span;
};

struct RecordDecl {
  std::string name;
  std::vector<RecordField> fields;
  Span span;

  const RecordField* find_field(const std::string& name) const;
};

struct Program {
  std::vector<RecordDecl> records;
  std::vector<ProcDecl> procedures;

  Program clone() const;
  const ProcDecl* find_procedure(const std::string& name) const;
  const RecordDecl* find_record(const std::string& name) const;
};

// Assigns pre-order statement ids, restarting from 1 in each procedure.
void number_statements(Program& program);

// Structural equality ignoring spans and statement ids.
bool equals_ignoring_spans(const Expr& a, const Expr& b);
bool equals_ignoring_spans(const Stmt& a, const Stmt& b);
bool equals_ignoring_spans(const Program& a, const Program& b);

}  // namespace muspark

#endif  // MUSPARK_SYNTAX_HPP
