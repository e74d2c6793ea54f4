#include "muspark/lexer.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <optional>

namespace muspark {

namespace {

constexpr std::array<std::string_view, 21> kKeywords = {
    "access", "all",  "and",  "begin", "else", "end",  "false",
    "if",     "in",   "is",   "loop",  "new",  "null", "or",
    "out",    "procedure", "record", "then", "true", "type", "while",
};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Result<std::vector<Token>, ParseError> run() {
    std::vector<Token> tokens;
    while (true) {
      skip_trivia();
      if (at_end()) break;
      Span start = here();
      char c = peek();
      if (is_ident_start(c)) {
        tokens.push_back(word(start));
      } else if (is_digit(c)) {
        Token tok;
        if (auto err = number(start, tok)) return *err;
        tokens.push_back(std::move(tok));
      } else if (c == '\'') {
        advance();
        tokens.push_back(make(Token::Kind::AttributeTick, "'", start));
        // The attribute name `Access` is reserved only in this position.
        skip_trivia();
        Span attr_start = here();
        if (!at_end() && is_ident_start(peek())) {
          Token name = word(attr_start);
          if (name.lexeme == "Access") name.kind = Token::Kind::Keyword;
          tokens.push_back(std::move(name));
        }
      } else {
        Token tok;
        if (auto err = punct(start, tok)) return *err;
        tokens.push_back(std::move(tok));
      }
    }
    tokens.push_back(make(Token::Kind::EndOfFile, "", here()));
    return tokens;
  }

 private:
  bool at_end() const { return pos_ >= src_.size(); }
  char peek(size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }
  Span here() const { return Span{line_, col_, line_, col_}; }
  Span since(const Span& start) const { return Span{start.line, start.col, line_, col_}; }

  Token make(Token::Kind kind, std::string lexeme, const Span& start) const {
    return Token{kind, std::move(lexeme), since(start)};
  }

  void skip_trivia() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '-' && peek(1) == '-') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  Token word(const Span& start) {
    size_t begin = pos_;
    while (!at_end() && is_ident_char(peek())) advance();
    std::string lexeme(src_.substr(begin, pos_ - begin));
    Token::Kind kind =
        is_reserved_word(lexeme) ? Token::Kind::Keyword : Token::Kind::Identifier;
    return make(kind, std::move(lexeme), start);
  }

  std::optional<ParseError> number(const Span& start, Token& out) {
    size_t begin = pos_;
    while (!at_end() && is_digit(peek())) advance();
    bool real = false;
    if (peek() == '.' && is_digit(peek(1))) {
      real = true;
      advance();
      while (!at_end() && is_digit(peek())) advance();
    }
    std::string lexeme(src_.substr(begin, pos_ - begin));
    if (real) {
      double value = 0;
      auto [p, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
      if (ec != std::errc{} || p != lexeme.data() + lexeme.size())
        return ParseError{since(start), "real literal", "malformed literal '" + lexeme + "'"};
      out = make(Token::Kind::RealLiteral, std::move(lexeme), start);
    } else {
      int64_t value = 0;
      auto [p, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), value);
      if (ec != std::errc{} || p != lexeme.data() + lexeme.size())
        return ParseError{since(start), "integer literal",
                          "malformed literal '" + lexeme + "' (out of range)"};
      out = make(Token::Kind::IntegerLiteral, std::move(lexeme), start);
    }
    return std::nullopt;
  }

  std::optional<ParseError> punct(const Span& start, Token& out) {
    char c = peek();
    // Two-character operators first (longest match).
    char n = peek(1);
    std::string two{c, n};
    if (two == ":=" || two == "<=" || two == ">=" || two == "/=") {
      advance();
      advance();
      out = make(Token::Kind::Punctuation, two, start);
      return std::nullopt;
    }
    switch (c) {
      case '.': case ',': case ';': case ':': case '(': case ')':
      case '+': case '-': case '*': case '/': case '<': case '>': case '=':
        advance();
        out = make(Token::Kind::Punctuation, std::string(1, c), start);
        return std::nullopt;
      default: {
        Span sp = here();
        sp.end_col = sp.col + 1;
        std::string shown = std::isprint(static_cast<unsigned char>(c))
                                ? "'" + std::string(1, c) + "'"
                                : "byte " + std::to_string(static_cast<unsigned char>(c));
        return ParseError{sp, "a token", "unrecognized character " + shown};
      }
    }
  }

  std::string_view src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

}  // namespace

bool is_reserved_word(std::string_view word) {
  for (std::string_view kw : kKeywords)
    if (kw == word) return true;
  return false;
}

std::string ParseError::message() const {
  std::string out = "expected " + expected;
  if (!found.empty()) out += ", found " + found;
  return out;
}

Result<std::vector<Token>, ParseError> tokenize(std::string_view source) {
  return Lexer(source).run();
}

}  // namespace muspark
