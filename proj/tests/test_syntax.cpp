#include <doctest.h>

#include <random>

#include "muspark/syntax.hpp"
#include "test_support.hpp"

using namespace muspark;
using muspark::test::path;

TEST_CASE("prefixes lists strict prefixes shortest first") {
  auto p = path("A.Key.all");
  std::vector<Path> expected = {path("A"), path("A.Key")};
  CHECK(prefixes(p) == expected);

  CHECK(prefixes(path("X")).empty());

  std::vector<Path> q_expected = {path("Q"), path("Q.all"), path("Q.all.Next")};
  CHECK(prefixes(path("Q.all.Next.all")) == q_expected);
}

TEST_CASE("extension_kind distinguishes near and far extensions") {
  CHECK(extension_kind(path("A"), path("A.Flag")) == ExtensionKind::Near);
  CHECK(extension_kind(path("A"), path("A.Key.all")) == ExtensionKind::Far);
  CHECK(extension_kind(path("A.Key"), path("A.Flag")) == ExtensionKind::NotExtension);
  CHECK(extension_kind(path("A"), path("A")) == ExtensionKind::NotExtension);
  CHECK(extension_kind(path("A.Flag"), path("A")) == ExtensionKind::NotExtension);
  CHECK(extension_kind(path("A"), path("B.Flag")) == ExtensionKind::NotExtension);
}

namespace {

Path random_path(std::mt19937_64& rng, int max_segments) {
  Path p(std::string(1, static_cast<char>('A' + rng() % 3)));
  int n = static_cast<int>(rng() % static_cast<uint64_t>(max_segments + 1));
  for (int i = 0; i < n; ++i) {
    if (rng() % 3 == 0)
      p.segments.push_back(Segment::deref());
    else
      p.segments.push_back(Segment::make_field(std::string(1, static_cast<char>('f' + rng() % 3))));
  }
  return p;
}

}  // namespace

TEST_CASE("prefix count and extension composition properties") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 2000; ++i) {
    Path p = random_path(rng, 5);
    CHECK(prefixes(p).size() == p.segments.size());

    // Near o Near = Near; any composition with Far is Far.
    Path q = p;
    Path r;
    auto extend = [&](Path base, int count, bool allow_deref) {
      for (int k = 0; k < count; ++k) {
        if (allow_deref && rng() % 2 == 0)
          base.segments.push_back(Segment::deref());
        else
          base.segments.push_back(Segment::make_field("g"));
      }
      return base;
    };
    bool q_far = rng() % 2 == 0;
    bool r_far = rng() % 2 == 0;
    q = extend(p, 1 + static_cast<int>(rng() % 2), false);
    if (q_far) q.segments.push_back(Segment::deref());
    r = extend(q, 1 + static_cast<int>(rng() % 2), false);
    if (r_far) r.segments.push_back(Segment::deref());

    ExtensionKind pq = extension_kind(p, q);
    ExtensionKind qr = extension_kind(q, r);
    ExtensionKind pr = extension_kind(p, r);
    if (pq == ExtensionKind::Near && qr == ExtensionKind::Near)
      CHECK(pr == ExtensionKind::Near);
    if (pq == ExtensionKind::Far || qr == ExtensionKind::Far)
      CHECK(pr == ExtensionKind::Far);
  }
}

TEST_CASE("statement ids are assigned pre-order per procedure") {
  auto checked = muspark::test::check_source(R"(
procedure Main is
  X : Integer;
  Y : Boolean;
begin
  X := 1;
  if true then
    X := 2;
    X := 3;
  else
    X := 4;
  end if;
  while false loop
    X := 5;
  end loop;
end Main;
)");
  const ProcDecl* main = checked.program->find_procedure("Main");
  REQUIRE(main->body.size() == 3);
  CHECK(main->body[0]->id == 1);
  CHECK(main->body[1]->id == 2);
  CHECK(main->body[1]->then_body[0]->id == 3);
  CHECK(main->body[1]->then_body[1]->id == 4);
  CHECK(main->body[1]->else_body[0]->id == 5);
  CHECK(main->body[2]->id == 6);
  CHECK(main->body[2]->body[0]->id == 7);
}

TEST_CASE("structural equality ignores spans") {
  auto a = parse_source("procedure Main is begin X := 1; end Main;");
  auto b = parse_source("procedure Main is\nbegin\n  X :=    1;\nend Main;");
  // Not type-correct (X undeclared) but parseable; equality is syntactic.
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  CHECK(equals_ignoring_spans(a.value(), b.value()));

  auto c = parse_source("procedure Main is begin X := 2; end Main;");
  REQUIRE(c.ok());
  CHECK(!equals_ignoring_spans(a.value(), c.value()));
}
