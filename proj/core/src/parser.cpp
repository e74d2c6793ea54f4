#include "muspark/parser.hpp"

#include <utility>

namespace muspark {

namespace {

struct Fail {
  ParseError error;
};

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {}

  Result<Program, ParseError> run() {
    try {
      Program program = parse_program();
      number_statements(program);
      return program;
    } catch (const Fail& f) {
      return f.error;
    }
  }

 private:
  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }
  const Token& prev() const { return tokens_[pos_ > 0 ? pos_ - 1 : 0]; }
  bool at_end() const { return peek().kind == Token::Kind::EndOfFile; }

  [[noreturn]] void fail(std::string expected) const {
    const Token& t = peek();
    std::string found = t.kind == Token::Kind::EndOfFile
                            ? "end of input"
                            : "'" + t.lexeme + "'";
    throw Fail{ParseError{t.span, std::move(expected), std::move(found)}};
  }

  bool match_keyword(std::string_view kw) {
    if (peek().is_keyword(kw)) {
      advance();
      return true;
    }
    return false;
  }
  bool match_punct(std::string_view p) {
    if (peek().is_punct(p)) {
      advance();
      return true;
    }
    return false;
  }
  void expect_keyword(std::string_view kw) {
    if (!match_keyword(kw)) fail("'" + std::string(kw) + "'");
  }
  void expect_punct(std::string_view p) {
    if (!match_punct(p)) fail("'" + std::string(p) + "'");
  }
  std::string expect_identifier(std::string_view what) {
    if (peek().kind != Token::Kind::Identifier) fail(std::string(what));
    return advance().lexeme;
  }

  Program parse_program() {
    Program program;
    while (peek().is_keyword("type")) program.records.push_back(parse_record());
    while (peek().is_keyword("procedure")) program.procedures.push_back(parse_procedure());
    if (!at_end()) fail("'type', 'procedure' or end of input");
    return program;
  }

  RecordDecl parse_record() {
    RecordDecl rec;
    rec.span = peek().span;
    expect_keyword("type");
    rec.name = expect_identifier("record name");
    expect_keyword("is");
    expect_keyword("record");
    while (!peek().is_keyword("end")) {
      std::vector<std::pair<std::string, Span>> names;
      names.emplace_back(expect_identifier("field name"), peek().span);
      while (match_punct(",")) names.emplace_back(expect_identifier("field name"), peek().span);
      expect_punct(":");
      Type type = parse_type();
      expect_punct(";");
      for (auto& [name, span] : names) rec.fields.push_back(RecordField{name, type, span});
    }
    expect_keyword("end");
    expect_keyword("record");
    expect_punct(";");
    return rec;
  }

  Type parse_type() {
    if (match_keyword("access")) return Type::access(parse_type());
    std::string name = expect_identifier("type name");
    if (name == "Integer") return Type::integer();
    if (name == "Real") return Type::real();
    if (name == "Boolean") return Type::boolean();
    return Type::named(std::move(name));
  }

  Mode parse_mode() {
    if (match_keyword("in")) return match_keyword("out") ? Mode::InOut : Mode::In;
    if (match_keyword("out")) return Mode::Out;
    fail("parameter mode 'in', 'in out' or 'out'");
  }

  ProcDecl parse_procedure() {
    ProcDecl proc;
    proc.span = peek().span;
    expect_keyword("procedure");
    proc.name = expect_identifier("procedure name");
    if (match_punct("(")) {
      if (!peek().is_punct(")")) {
        do {
          std::vector<std::pair<std::string, Span>> names;
          names.emplace_back(expect_identifier("parameter name"), peek().span);
          while (match_punct(",")) names.emplace_back(expect_identifier("parameter name"), peek().span);
          expect_punct(":");
          Mode mode = parse_mode();
          Type type = parse_type();
          for (auto& [name, span] : names)
            proc.params.push_back(Param{name, mode, type, span});
        } while (match_punct(";"));
      }
      expect_punct(")");
    }
    expect_keyword("is");
    // Local declarations, with optional initializers lowered to leading
    // assignments.
    std::vector<StmtPtr> init_stmts;
    while (!peek().is_keyword("begin")) {
      Span decl_span = peek().span;
      std::vector<std::pair<std::string, Span>> names;
      names.emplace_back(expect_identifier("local declaration or 'begin'"), decl_span);
      while (match_punct(",")) names.emplace_back(expect_identifier("local name"), peek().span);
      expect_punct(":");
      Type type = parse_type();
      ExprPtr init;
      if (match_punct(":=")) init = parse_expr();
      expect_punct(";");
      for (auto& [name, span] : names) {
        proc.locals.push_back(Local{name, type, span});
        if (init) {
          Path lhs(name);
          lhs.span = span;
          StmtPtr s = Stmt::assign(std::move(lhs), init->clone());
          s->span = span;
          init_stmts.push_back(std::move(s));
        }
      }
    }
    expect_keyword("begin");
    proc.body = std::move(init_stmts);
    parse_stmt_list(proc.body, "end");
    expect_keyword("end");
    if (peek().kind == Token::Kind::Identifier) {
      std::string trailing = advance().lexeme;
      if (trailing != proc.name)
        throw Fail{ParseError{prev().span, "'" + proc.name + "'", "'" + trailing + "'"}};
    }
    expect_punct(";");
    return proc;
  }

  void parse_stmt_list(std::vector<StmtPtr>& out, std::string_view terminator,
                       std::string_view terminator2 = "") {
    while (!peek().is_keyword(terminator) &&
           (terminator2.empty() || !peek().is_keyword(terminator2))) {
      out.push_back(parse_stmt());
    }
  }

  StmtPtr parse_stmt() {
    Span start = peek().span;
    if (match_keyword("if")) {
      ExprPtr cond = parse_expr();
      expect_keyword("then");
      std::vector<StmtPtr> then_body;
      std::vector<StmtPtr> else_body;
      parse_stmt_list(then_body, "else", "end");
      if (match_keyword("else")) parse_stmt_list(else_body, "end");
      expect_keyword("end");
      expect_keyword("if");
      expect_punct(";");
      StmtPtr s = Stmt::if_stmt(std::move(cond), std::move(then_body), std::move(else_body));
      s->span = start;
      return s;
    }
    if (match_keyword("while")) {
      ExprPtr cond = parse_expr();
      expect_keyword("loop");
      std::vector<StmtPtr> body;
      parse_stmt_list(body, "end");
      expect_keyword("end");
      expect_keyword("loop");
      expect_punct(";");
      StmtPtr s = Stmt::while_stmt(std::move(cond), std::move(body));
      s->span = start;
      return s;
    }
    if (peek().kind != Token::Kind::Identifier) fail("a statement");

    // Call without arguments: `Name;` or `Name();`.
    if (peek(1).is_punct(";") || peek(1).is_punct("(")) {
      std::string callee = advance().lexeme;
      std::vector<Arg> args;
      if (match_punct("(")) {
        if (!peek().is_punct(")")) {
          do {
            args.push_back(parse_arg());
          } while (match_punct(","));
        }
        expect_punct(")");
      }
      expect_punct(";");
      StmtPtr s = Stmt::call(std::move(callee), std::move(args));
      s->span = start;
      return s;
    }

    Path lhs = parse_path();
    expect_punct(":=");
    StmtPtr s;
    if (match_keyword("new")) {
      Type type = parse_type();
      s = Stmt::alloc(std::move(lhs), std::move(type));
    } else {
      s = Stmt::assign(std::move(lhs), parse_expr());
    }
    expect_punct(";");
    s->span = start;
    return s;
  }

  Arg parse_arg() {
    Arg arg;
    arg.span = peek().span;
    ExprPtr e = parse_expr();
    if (e->kind == Expr::Kind::PathRef) {
      arg.is_path = true;
      arg.path = std::move(e->path);
    } else {
      arg.expr = std::move(e);
    }
    return arg;
  }

  Path parse_path() {
    Span start = peek().span;
    Path p(expect_identifier("a path"));
    while (peek().is_punct(".")) {
      advance();
      if (match_keyword("all")) {
        p.segments.push_back(Segment::deref());
      } else {
        p.segments.push_back(Segment::make_field(expect_identifier("field name or 'all'")));
      }
    }
    p.span = Span{start.line, start.col, prev().span.end_line, prev().span.end_col};
    return p;
  }

  // Precedence, loosest first: or < and < comparison < additive < multiplicative.
  ExprPtr parse_expr() { return parse_or(); }

  ExprPtr parse_or() {
    ExprPtr lhs = parse_and();
    while (peek().is_keyword("or")) {
      Span sp = advance().span;
      ExprPtr rhs = parse_and();
      lhs = Expr::binary(BinOp::Or, std::move(lhs), std::move(rhs));
      lhs->span = sp;
    }
    return lhs;
  }

  ExprPtr parse_and() {
    ExprPtr lhs = parse_comparison();
    while (peek().is_keyword("and")) {
      Span sp = advance().span;
      ExprPtr rhs = parse_comparison();
      lhs = Expr::binary(BinOp::And, std::move(lhs), std::move(rhs));
      lhs->span = sp;
    }
    return lhs;
  }

  ExprPtr parse_comparison() {
    ExprPtr lhs = parse_additive();
    while (true) {
      BinOp op;
      if (peek().is_punct("<")) op = BinOp::Lt;
      else if (peek().is_punct("<=")) op = BinOp::Le;
      else if (peek().is_punct(">")) op = BinOp::Gt;
      else if (peek().is_punct(">=")) op = BinOp::Ge;
      else if (peek().is_punct("=")) op = BinOp::Eq;
      else if (peek().is_punct("/=")) op = BinOp::Ne;
      else break;
      Span sp = advance().span;
      ExprPtr rhs = parse_additive();
      lhs = Expr::binary(op, std::move(lhs), std::move(rhs));
      lhs->span = sp;
    }
    return lhs;
  }

  ExprPtr parse_additive() {
    ExprPtr lhs = parse_multiplicative();
    while (peek().is_punct("+") || peek().is_punct("-")) {
      BinOp op = peek().is_punct("+") ? BinOp::Add : BinOp::Sub;
      Span sp = advance().span;
      ExprPtr rhs = parse_multiplicative();
      lhs = Expr::binary(op, std::move(lhs), std::move(rhs));
      lhs->span = sp;
    }
    return lhs;
  }

  ExprPtr parse_multiplicative() {
    ExprPtr lhs = parse_primary();
    while (peek().is_punct("*") || peek().is_punct("/")) {
      BinOp op = peek().is_punct("*") ? BinOp::Mul : BinOp::Div;
      Span sp = advance().span;
      ExprPtr rhs = parse_primary();
      lhs = Expr::binary(op, std::move(lhs), std::move(rhs));
      lhs->span = sp;
    }
    return lhs;
  }

  ExprPtr parse_primary() {
    const Token& t = peek();
    if (t.kind == Token::Kind::IntegerLiteral) {
      advance();
      ExprPtr e = Expr::int_lit(std::stoll(t.lexeme));
      e->span = t.span;
      return e;
    }
    if (t.kind == Token::Kind::RealLiteral) {
      advance();
      ExprPtr e = Expr::real_lit(std::stod(t.lexeme));
      e->span = t.span;
      return e;
    }
    if (t.is_keyword("true") || t.is_keyword("false")) {
      advance();
      ExprPtr e = Expr::bool_lit(t.lexeme == "true");
      e->span = t.span;
      return e;
    }
    if (t.is_keyword("null")) {
      advance();
      ExprPtr e = Expr::null_lit();
      e->span = t.span;
      return e;
    }
    if (t.is_punct("(")) {
      advance();
      ExprPtr e = parse_expr();
      expect_punct(")");
      return e;
    }
    if (t.kind == Token::Kind::Identifier) {
      Path p = parse_path();
      if (peek().kind == Token::Kind::AttributeTick) {
        advance();
        expect_keyword("Access");
        ExprPtr e = Expr::address_of(std::move(p));
        return e;
      }
      Span sp = p.span;
      ExprPtr e = Expr::path_ref(std::move(p));
      e->span = sp;
      return e;
    }
    fail("an expression");
  }

  const std::vector<Token>& tokens_;
  size_t pos_ = 0;
};

}  // namespace

Result<Program, ParseError> parse_program(const std::vector<Token>& tokens) {
  return Parser(tokens).run();
}

Result<Program, ParseError> parse_source(std::string_view source) {
  auto tokens = tokenize(source);
  if (!tokens) return tokens.error();
  return parse_program(tokens.value());
}

}  // namespace muspark
