#include <charconv>
#include <sstream>

#include "muspark/parser.hpp"

namespace muspark {

namespace {

int precedence(BinOp op) {
  if (is_logical(op)) return op == BinOp::Or ? 0 : 1;
  if (is_comparison(op)) return 2;
  if (op == BinOp::Add || op == BinOp::Sub) return 3;
  return 4;
}

std::string format_real(double value) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, p);
  if (s.find('e') != std::string::npos || s.find('E') != std::string::npos) {
    // The grammar only has digits '.' digits; re-render in fixed notation.
    auto [p2, ec2] = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::fixed);
    s.assign(buf, p2);
  }
  if (s.find('.') == std::string::npos) s += ".0";
  return s;
}

class Printer {
 public:
  std::string print(const Program& program) {
    bool first = true;
    for (const RecordDecl& rec : program.records) {
      if (!first) out_ << '\n';
      first = false;
      print_record(rec);
    }
    for (const ProcDecl& proc : program.procedures) {
      if (!first) out_ << '\n';
      first = false;
      print_procedure(proc);
    }
    return out_.str();
  }

  void print_expr(const Expr& e, int parent_prec = -1, bool right_operand = false) {
    switch (e.kind) {
      case Expr::Kind::PathRef:
        out_ << e.path.to_string();
        return;
      case Expr::Kind::IntLit:
        out_ << e.int_value;
        return;
      case Expr::Kind::RealLit:
        out_ << format_real(e.real_value);
        return;
      case Expr::Kind::BoolLit:
        out_ << (e.bool_value ? "true" : "false");
        return;
      case Expr::Kind::Null:
        out_ << "null";
        return;
      case Expr::Kind::AddressOf:
        out_ << e.path.to_string() << "'Access";
        return;
      case Expr::Kind::Binary: {
        int prec = precedence(e.op);
        bool parens = prec < parent_prec || (prec == parent_prec && right_operand);
        if (parens) out_ << '(';
        print_expr(*e.lhs, prec, false);
        out_ << ' ' << to_string(e.op) << ' ';
        print_expr(*e.rhs, prec, true);
        if (parens) out_ << ')';
        return;
      }
    }
  }

  std::string str() { return out_.str(); }

 private:
  void print_record(const RecordDecl& rec) {
    out_ << "type " << rec.name << " is record\n";
    for (const RecordField& f : rec.fields)
      out_ << "  " << f.name << " : " << f.type.to_string() << ";\n";
    out_ << "end record;\n";
  }

  void print_procedure(const ProcDecl& proc) {
    out_ << "procedure " << proc.name;
    if (!proc.params.empty()) {
      out_ << " (";
      for (size_t i = 0; i < proc.params.size(); ++i) {
        if (i) out_ << "; ";
        const Param& p = proc.params[i];
        out_ << p.name << " : " << to_string(p.mode) << ' ' << p.type.to_string();
      }
      out_ << ')';
    }
    out_ << " is\n";
    for (const Local& l : proc.locals)
      out_ << "  " << l.name << " : " << l.type.to_string() << ";\n";
    out_ << "begin\n";
    print_stmts(proc.body, 1);
    out_ << "end " << proc.name << ";\n";
  }

  void indent(int depth) {
    for (int i = 0; i < depth; ++i) out_ << "  ";
  }

  void print_stmts(const std::vector<StmtPtr>& stmts, int depth) {
    for (const StmtPtr& s : stmts) print_stmt(*s, depth);
  }

  void print_stmt(const Stmt& s, int depth) {
    indent(depth);
    switch (s.kind) {
      case Stmt::Kind::Assign:
        out_ << s.lhs.to_string() << " := ";
        print_expr(*s.rhs);
        out_ << ";\n";
        return;
      case Stmt::Kind::Alloc:
        out_ << s.lhs.to_string() << " := new " << s.alloc_type.to_string() << ";\n";
        return;
      case Stmt::Kind::If:
        out_ << "if ";
        print_expr(*s.cond);
        out_ << " then\n";
        print_stmts(s.then_body, depth + 1);
        if (!s.else_body.empty()) {
          indent(depth);
          out_ << "else\n";
          print_stmts(s.else_body, depth + 1);
        }
        indent(depth);
        out_ << "end if;\n";
        return;
      case Stmt::Kind::While:
        out_ << "while ";
        print_expr(*s.cond);
        out_ << " loop\n";
        print_stmts(s.body, depth + 1);
        indent(depth);
        out_ << "end loop;\n";
        return;
      case Stmt::Kind::Call:
        out_ << s.callee;
        if (!s.args.empty()) {
          out_ << '(';
          for (size_t i = 0; i < s.args.size(); ++i) {
            if (i) out_ << ", ";
            const Arg& a = s.args[i];
            if (a.is_path)
              out_ << a.path.to_string();
            else
              print_expr(*a.expr);
          }
          out_ << ')';
        }
        out_ << ";\n";
        return;
    }
  }

  std::ostringstream out_;
};

}  // namespace

std::string pretty_print(const Program& program) { return Printer().print(program); }

std::string pretty_print(const Expr& expr) {
  Printer p;
  p.print_expr(expr);
  return p.str();
}

}  // namespace muspark
