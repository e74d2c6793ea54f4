#include <doctest.h>

#include <set>

#include "muspark/typecheck.hpp"
#include "test_support.hpp"

using namespace muspark;
using muspark::test::check_source;
using muspark::test::path;

namespace {

const char* kListPrelude = R"(
type List is record
  Flag : Boolean;
  Key : access Integer;
  Next : access List;
end record;
)";

std::vector<TypeErrorCode> error_codes(const std::string& source) {
  auto parsed = parse_source(source);
  REQUIRE(parsed.ok());
  auto types = check_program(parsed.value());
  REQUIRE(!types.ok());
  std::vector<TypeErrorCode> codes;
  for (const TypeError& e : types.error()) codes.push_back(e.code);
  return codes;
}

bool has_code(const std::vector<TypeErrorCode>& codes, TypeErrorCode code) {
  for (TypeErrorCode c : codes)
    if (c == code) return true;
  return false;
}

}  // namespace

TEST_CASE("P1 is well-typed") {
  check_source(std::string(kListPrelude) + R"(
procedure P1 (A, B : in out List) is
begin
  A := B;
  B.Flag := true;
  B.Key.all := 42;
end P1;
procedure Main is begin end Main;
)");
}

TEST_CASE("binary operators require scalar operands") {
  auto codes = error_codes(R"(
procedure Main is
  X : Integer;
  Y : access Integer;
  Z : Integer;
begin
  X := Y + Z;
end Main;
)");
  CHECK(has_code(codes, TypeErrorCode::BinopNonScalar));
}

TEST_CASE("out arguments must be paths") {
  auto codes = error_codes(R"(
procedure Take (V : out Integer) is begin V := 1; end Take;
procedure Main is begin Take(5); end Main;
)");
  CHECK(has_code(codes, TypeErrorCode::ModeArgNotPath));
}

TEST_CASE("type_of_path follows fields and dereferences") {
  auto checked = check_source(std::string(kListPrelude) +
                              "procedure Main is A : List; begin end Main;");
  TypeEnv env = checked.env("Main");

  auto t = type_of_path(env, path("A.Next.all.Key"));
  REQUIRE(t.ok());
  CHECK(t.value() == Type::access(Type::integer()));

  auto flag = type_of_path(env, path("A.Flag"));
  REQUIRE(flag.ok());
  CHECK(flag.value() == Type::boolean());

  auto bad = type_of_path(env, path("A.Flag.all"));
  REQUIRE(!bad.ok());
  CHECK(bad.error().code == TypeErrorCode::DerefOfNonAccess);

  auto unknown = type_of_path(env, path("Nope"));
  REQUIRE(!unknown.ok());
  CHECK(unknown.error().code == TypeErrorCode::UnknownName);

  auto nofield = type_of_path(env, path("A.Tail"));
  REQUIRE(!nofield.ok());
  CHECK(nofield.error().code == TypeErrorCode::UnknownField);
}

TEST_CASE("deep and shallow classification") {
  auto checked = check_source(std::string(kListPrelude) + R"(
type Flat is record
  Left : Boolean;
  Right : Boolean;
end record;
procedure Main is begin end Main;
)");
  const TypeInfo& info = checked.types;
  CHECK(is_deep(info, Type::named("List")));
  CHECK(is_deep(info, Type::access(Type::integer())));
  CHECK(!is_deep(info, Type::integer()));
  CHECK(!is_deep(info, Type::real()));
  CHECK(!is_deep(info, Type::named("Flat")));
}

namespace {

// Brute-force: breadth-first over extensions, cutting repeated record names.
bool deep_by_enumeration(const TypeInfo& info, const Type& t,
                         std::set<std::string> seen = {}) {
  switch (t.kind()) {
    case Type::Kind::Scalar: return false;
    case Type::Kind::Access: return true;
    case Type::Kind::Named: {
      if (!seen.insert(t.record_name()).second) return false;
      const RecordDecl* rec = info.find_record(t.record_name());
      if (!rec) return false;
      for (const RecordField& f : rec->fields)
        if (deep_by_enumeration(info, f.type, seen)) return true;
      return false;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("is_deep agrees with a brute-force enumerator") {
  auto checked = check_source(R"(
type A1 is record F1 : Integer; end record;
type A2 is record F2 : A1; F3 : Boolean; end record;
type A3 is record F4 : A2; F5 : access A3; end record;
type A4 is record F6 : A2; F7 : Real; end record;
procedure Main is begin end Main;
)");
  const TypeInfo& info = checked.types;
  std::vector<Type> cases = {
      Type::integer(),
      Type::boolean(),
      Type::named("A1"),
      Type::named("A2"),
      Type::named("A3"),
      Type::named("A4"),
      Type::access(Type::named("A4")),
      Type::access(Type::access(Type::boolean())),
  };
  for (const Type& t : cases) {
    INFO(t.to_string());
    CHECK(is_deep(info, t) == deep_by_enumeration(info, t));
  }
}

TEST_CASE("expression typing") {
  auto checked = check_source(std::string(kListPrelude) + R"(
procedure Main is
  A : List;
  X : access Integer;
begin
end Main;
)");
  TypeEnv env = checked.env("Main");

  auto parsed_expr = [&](const std::string& text) {
    auto program =
        parse_source("procedure Main is begin B := " + text + "; end Main;");
    REQUIRE(program.ok());
    return program.value().procedures[0].body[0]->rhs->clone();
  };

  auto deref_sum = type_of_expr(env, *parsed_expr("X.all + 1"));
  REQUIRE(deref_sum.ok());
  CHECK(deref_sum->type == Type::integer());

  auto addr = type_of_expr(env, *parsed_expr("A'Access"));
  REQUIRE(addr.ok());
  CHECK(addr->type == Type::access(Type::named("List")));

  auto null_cmp = type_of_expr(env, *parsed_expr("null = 1"));
  REQUIRE(!null_cmp.ok());
  CHECK(null_cmp.error().code == TypeErrorCode::ArgTypeMismatch);
}

TEST_CASE("null literal unifies with any access type") {
  check_source(std::string(kListPrelude) + R"(
procedure Take (P : in access List) is begin end Take;
procedure Main is
  X : access Integer;
  L : access List;
begin
  X := null;
  L := null;
  Take(null);
end Main;
)");

  auto codes = error_codes(R"(
procedure Main is
  X : Integer;
begin
  X := null;
end Main;
)");
  CHECK(has_code(codes, TypeErrorCode::AssignTypeMismatch));
}

TEST_CASE("allocation requires the exact access type") {
  auto codes = error_codes(R"(
procedure Main is
  X : access Integer;
begin
  X := new Boolean;
end Main;
)");
  CHECK(has_code(codes, TypeErrorCode::AllocTypeMismatch));

  check_source("procedure Main is X : access Integer; begin X := new Integer; end Main;");
}

TEST_CASE("record declaration rules") {
  auto forward = error_codes(R"(
type A1 is record F1 : A2; end record;
type A2 is record F2 : Integer; end record;
procedure Main is begin end Main;
)");
  CHECK(has_code(forward, TypeErrorCode::ForwardRecordRef));

  auto self_direct = error_codes(R"(
type A1 is record F1 : A1; end record;
procedure Main is begin end Main;
)");
  CHECK(has_code(self_direct, TypeErrorCode::ForwardRecordRef));

  // Recursion through access is fine.
  check_source(R"(
type A1 is record F1 : access A1; end record;
procedure Main is begin end Main;
)");

  auto dup_field = error_codes(R"(
type A1 is record F1 : Integer; end record;
type A2 is record F1 : Boolean; end record;
procedure Main is begin end Main;
)");
  CHECK(has_code(dup_field, TypeErrorCode::DuplicateName));
}

TEST_CASE("procedure environment rules") {
  auto missing = error_codes("procedure NotMain is begin end NotMain;");
  CHECK(has_code(missing, TypeErrorCode::MissingMain));

  auto main_with_params = error_codes(R"(
procedure Main (X : in Integer) is begin end Main;
)");
  CHECK(has_code(main_with_params, TypeErrorCode::MissingMain));

  auto dup = error_codes(R"(
procedure Main is
  X : Integer;
  X : Boolean;
begin
end Main;
)");
  CHECK(has_code(dup, TypeErrorCode::DuplicateName));

  auto arity = error_codes(R"(
procedure Take (V : in Integer) is begin end Take;
procedure Main is begin Take(1, 2); end Main;
)");
  CHECK(has_code(arity, TypeErrorCode::ArityMismatch));

  auto unknown_proc = error_codes("procedure Main is begin Nope(1); end Main;");
  CHECK(has_code(unknown_proc, TypeErrorCode::UnknownName));

  auto cond = error_codes(R"(
procedure Main is begin
  if 1 + 2 then
  end if;
end Main;
)");
  CHECK(has_code(cond, TypeErrorCode::CondNotBoolean));
}

TEST_CASE("path extensions are typed exactly when the type exposes them") {
  auto checked = check_source(std::string(kListPrelude) +
                              "procedure Main is A : List; X : Integer; begin end Main;");
  TypeEnv env = checked.env("Main");
  for (const Path& p : enumerate_static_paths(env, 4)) {
    auto t = type_of_path(env, p);
    REQUIRE(t.ok());
    std::vector<Segment> slots = child_segments(checked.types, t.value());
    for (const Segment& seg : slots) {
      auto child = type_of_path(env, p.child(seg));
      CHECK(child.ok());
    }
    // A segment the type does not expose must fail.
    Segment bogus = t.value().is_access() ? Segment::make_field("Flag") : Segment::deref();
    CHECK(!type_of_path(env, p.child(bogus)).ok());
  }
}
