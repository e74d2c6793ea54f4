// Tokenizer for muSPARK source text. Comments run from `--` to end of line;
// keywords are reserved, lowercase and case-sensitive.
#ifndef MUSPARK_LEXER_HPP
#define MUSPARK_LEXER_HPP

#include <string>
#include <string_view>
#include <vector>

#include "muspark/result.hpp"
#include "muspark/syntax.hpp"

namespace muspark {

struct Token {
  enum class Kind : uint8_t {
    Identifier,
    IntegerLiteral,
    RealLiteral,
    Keyword,
    Punctuation,
    AttributeTick,
    EndOfFile,
  };

  Kind kind = Kind::EndOfFile;
  std::string lexeme;
  Span span;

  bool is_keyword(std::string_view kw) const {
    return kind == Kind::Keyword && lexeme == kw;
  }
  bool is_punct(std::string_view p) const {
    return kind == Kind::Punctuation && lexeme == p;
  }
};

// Also used for syntax errors from the parser.
struct ParseError {
  Span span;
  std::string expected;  // description of the acceptable token set
  std::string found;     // description of the offending token or byte
  std::string message() const;
};

Result<std::vector<Token>, ParseError> tokenize(std::string_view source);

bool is_reserved_word(std::string_view word);

}  // namespace muspark

#endif  // MUSPARK_LEXER_HPP
