// Shared helpers for the muspark test suites.
#ifndef MUSPARK_TEST_SUPPORT_HPP
#define MUSPARK_TEST_SUPPORT_HPP

#include <doctest.h>

#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "muspark/alias_check.hpp"
#include "muspark/parser.hpp"
#include "muspark/typecheck.hpp"

namespace muspark::test {

inline std::string corpus_file(const std::string& name) {
  return std::string(MUSPARK_CORPUS_DIR) + "/" + name;
}

inline std::string read_corpus(const std::string& name) {
  std::ifstream in(corpus_file(name), std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

// "B.Key.all" -> Path; `all` components become dereferences.
inline Path path(const std::string& text) {
  Path p;
  size_t start = 0;
  bool root = true;
  while (start <= text.size()) {
    size_t dot = text.find('.', start);
    std::string part = text.substr(start, dot == std::string::npos ? dot : dot - start);
    if (root) {
      p.root = part;
      root = false;
    } else if (part == "all") {
      p.segments.push_back(Segment::deref());
    } else {
      p.segments.push_back(Segment::make_field(part));
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return p;
}

// A parsed and type-checked program; keeps the Program alive behind the
// TypeInfo's internal pointers.
struct Checked {
  std::unique_ptr<Program> program;
  TypeInfo types;

  TypeEnv env(const std::string& proc) const { return types.env(proc); }
};

inline Checked check_source(const std::string& source) {
  auto parsed = parse_source(source);
  if (!parsed.ok()) {
    MESSAGE("parse error: ", parsed.error().message());
    REQUIRE(parsed.ok());
  }
  Checked out;
  out.program = std::make_unique<Program>(std::move(parsed.value()));
  auto types = check_program(*out.program);
  if (!types.ok()) {
    for (const TypeError& e : types.error())
      MESSAGE("type error [", to_string(e.code), "] ", e.message);
    REQUIRE(types.ok());
  }
  out.types = std::move(types.value());
  return out;
}

inline AliasCheckResult alias_check(const Checked& checked) {
  return check_program_aliasing(*checked.program, checked.types);
}

}  // namespace muspark::test

#endif  // MUSPARK_TEST_SUPPORT_HPP
