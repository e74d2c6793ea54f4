// Recursive-descent parser and canonical pretty-printer for muSPARK.
#ifndef MUSPARK_PARSER_HPP
#define MUSPARK_PARSER_HPP

#include <string>
#include <string_view>
#include <vector>

#include "muspark/lexer.hpp"
#include "muspark/result.hpp"
#include "muspark/syntax.hpp"

namespace muspark {

// Parses a whole program. Local declarations with initializers are lowered
// to assignments at the head of the body; statement ids are assigned.
Result<Program, ParseError> parse_program(const std::vector<Token>& tokens);

// Convenience: tokenize + parse.
Result<Program, ParseError> parse_source(std::string_view source);

// Canonical text form. parse_source(pretty_print(p)) is structurally equal
// to p (spans aside).
std::string pretty_print(const Program& program);
std::string pretty_print(const Expr& expr);

}  // namespace muspark

#endif  // MUSPARK_PARSER_HPP
