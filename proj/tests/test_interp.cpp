#include <doctest.h>

#include <set>

#include "muspark/interp.hpp"
#include "test_support.hpp"

using namespace muspark;
using muspark::test::alias_check;
using muspark::test::check_source;
using muspark::test::path;
using muspark::test::read_corpus;

namespace {

const char* kListPrelude = R"(
type List is record
  Flag : Boolean;
  Key : access Integer;
  Next : access List;
end record;
)";

ExecOutcome run_checked(const muspark::test::Checked& checked, RunOptions opts = {}) {
  return run_program(*checked.program, checked.types, opts);
}

ExecOutcome run_monitored(const muspark::test::Checked& checked) {
  AliasCheckResult analysis = alias_check(checked);
  REQUIRE(analysis.accepted());
  RunOptions opts;
  opts.monitored = true;
  opts.policies = &analysis.policies;
  return run_program(*checked.program, checked.types, opts);
}

}  // namespace

TEST_CASE("default values") {
  auto checked = check_source(std::string(kListPrelude) + "procedure Main is begin end Main;");
  const TypeInfo& info = checked.types;

  CHECK(default_value(info, Type::integer()) == Value::integer(0));
  CHECK(default_value(info, Type::real()) == Value::real(0.0));
  CHECK(default_value(info, Type::boolean()) == Value::boolean(false));
  CHECK(default_value(info, Type::access(Type::named("List"))) == Value::null());

  Value list = default_value(info, Type::named("List"));
  REQUIRE(list.kind == Value::Kind::Record);
  CHECK(list.fields.at("Flag") == Value::boolean(false));
  CHECK(list.fields.at("Key") == Value::null());   // no deep allocation
  CHECK(list.fields.at("Next") == Value::null());
}

TEST_CASE("l-value evaluation") {
  auto checked = check_source(std::string(kListPrelude) +
                              "procedure Main is A : List; P : access List; begin end Main;");
  Store store;
  Location la = store.allocate(default_value(checked.types, Type::named("List")));
  Location lp = store.allocate(Value::null());
  Binding binding{{"A", Address(la)}, {"P", Address(lp)}};

  auto var = eval_lval(binding, store, path("A"));
  REQUIRE(var.ok());
  CHECK(var.value() == Address(la));

  auto field = eval_lval(binding, store, path("A.Flag"));
  REQUIRE(field.ok());
  CHECK(field.value() == Address(la).field("Flag"));

  auto blocked = eval_lval(binding, store, path("P.all"));
  REQUIRE(!blocked.ok());
  CHECK(blocked.error().reason == BlockReason::NullDeref);

  // Pointing P at A makes P.all.Flag resolve to A's field.
  store.write(Address(lp), Value::address(Address(la)));
  auto through = eval_lval(binding, store, path("P.all.Flag"));
  REQUIRE(through.ok());
  CHECK(through.value() == Address(la).field("Flag"));
}

TEST_CASE("expression evaluation") {
  auto checked = check_source("procedure Main is X : access Integer; begin end Main;");
  Store store;
  Location cell = store.allocate(Value::integer(5));
  Location xp = store.allocate(Value::address(Address(cell)));
  Binding binding{{"X", Address(xp)}};

  auto lit = eval_expr(binding, store, *Expr::int_lit(42));
  REQUIRE(lit.ok());
  CHECK(lit.value() == Value::integer(42));

  auto addr = eval_expr(binding, store, *Expr::address_of(path("X")));
  REQUIRE(addr.ok());
  CHECK(addr.value() == Value::address(Address(xp)));

  auto sum = eval_expr(binding, store,
                       *Expr::binary(BinOp::Add, Expr::path_ref(path("X.all")),
                                     Expr::int_lit(1)));
  REQUIRE(sum.ok());
  CHECK(sum.value() == Value::integer(6));

  auto div = eval_expr(binding, store,
                       *Expr::binary(BinOp::Div, Expr::int_lit(1), Expr::int_lit(0)));
  REQUIRE(!div.ok());
  CHECK(div.error().reason == BlockReason::DivByZero);
}

TEST_CASE("integer arithmetic wraps unless trapping is on") {
  Binding binding;
  Store store;
  auto big = Expr::binary(BinOp::Add, Expr::int_lit(INT64_MAX), Expr::int_lit(1));
  auto wrapped = eval_expr(binding, store, *big, /*trap_overflow=*/false);
  REQUIRE(wrapped.ok());
  CHECK(wrapped.value() == Value::integer(INT64_MIN));

  auto trapped = eval_expr(binding, store, *big, /*trap_overflow=*/true);
  REQUIRE(!trapped.ok());
  CHECK(trapped.error().reason == BlockReason::Overflow);
}

TEST_CASE("allocation stores a fresh default and the new address") {
  auto checked = check_source(std::string(kListPrelude) + R"(
procedure Main is
  P : access List;
begin
  P := new List;
end Main;
)");
  ExecOutcome outcome = run_checked(checked);
  REQUIRE(outcome.kind == ExecOutcome::Kind::Completed);
  // One location for the local P, one for the allocated record.
  CHECK(outcome.store.size() == 2);
  const Value* p = outcome.store.read(outcome.main_frame.at("P"));
  REQUIRE(p->kind == Value::Kind::Addr);
  const Value* record = outcome.store.read(p->addr);
  REQUIRE(record->kind == Value::Kind::Record);
  CHECK(record->fields.at("Flag") == Value::boolean(false));
}

TEST_CASE("false loops leave the store unchanged") {
  auto checked = check_source(R"(
procedure Main is
  X : Integer;
begin
  X := 3;
  while false loop
    X := 4;
  end loop;
end Main;
)");
  ExecOutcome outcome = run_checked(checked);
  REQUIRE(outcome.kind == ExecOutcome::Kind::Completed);
  CHECK(*outcome.store.read(outcome.main_frame.at("X")) == Value::integer(3));
}

TEST_CASE("swap exchanges the record contents") {
  auto checked = check_source(read_corpus("swap.mus"));
  ExecOutcome outcome = run_monitored(checked);
  REQUIRE(outcome.kind == ExecOutcome::Kind::Completed);
  const Store& store = outcome.store;
  const Binding& frame = outcome.main_frame;

  // Hand-traced: A and B swap wholesale, keys included.
  CHECK(*store.read(frame.at("A").field("Flag")) == Value::boolean(false));
  CHECK(*store.read(frame.at("B").field("Flag")) == Value::boolean(true));
  const Value* a_key = store.read(frame.at("A").field("Key"));
  const Value* b_key = store.read(frame.at("B").field("Key"));
  REQUIRE(a_key->kind == Value::Kind::Addr);
  REQUIRE(b_key->kind == Value::Kind::Addr);
  CHECK(*store.read(a_key->addr) == Value::integer(2));
  CHECK(*store.read(b_key->addr) == Value::integer(1));
}

TEST_CASE("out parameters write through to the caller") {
  auto checked = check_source(read_corpus("out_param.mus"));
  ExecOutcome outcome = run_monitored(checked);
  REQUIRE(outcome.kind == ExecOutcome::Kind::Completed);
  const Value* p = outcome.store.read(outcome.main_frame.at("P"));
  REQUIRE(p->kind == Value::Kind::Addr);
  CHECK(*outcome.store.read(p->addr) == Value::integer(8));
}

TEST_CASE("assign_incr leaves the incremented value in the second pointer") {
  auto checked = check_source(read_corpus("assign_incr.mus"));
  ExecOutcome outcome = run_monitored(checked);
  REQUIRE(outcome.kind == ExecOutcome::Kind::Completed);
  const Value* q = outcome.store.read(outcome.main_frame.at("Q"));
  REQUIRE(q->kind == Value::Kind::Addr);
  CHECK(*outcome.store.read(q->addr) == Value::integer(6));
}

TEST_CASE("run outcomes cover completion, blocking and fuel") {
  auto trivial = check_source("procedure Main is X : Integer; begin X := 1; end Main;");
  CHECK(run_checked(trivial).kind == ExecOutcome::Kind::Completed);

  auto null_deref = check_source(read_corpus("null_deref.mus"));
  ExecOutcome blocked = run_checked(null_deref);
  CHECK(blocked.kind == ExecOutcome::Kind::Blocked);
  CHECK(blocked.reason == BlockReason::NullDeref);
  CHECK(blocked.span.line == 7);

  auto fuel = check_source(read_corpus("fuel.mus"));
  RunOptions small;
  small.fuel = 1000;
  ExecOutcome exhausted = run_checked(fuel, small);
  CHECK(exhausted.kind == ExecOutcome::Kind::FuelExhausted);
  CHECK(exhausted.steps == 1000);
}

TEST_CASE("monitored runs of accepted corpus programs never violate CREW") {
  for (const char* name : {"swap.mus", "assign_incr.mus", "alloc.mus", "rotate.mus",
                           "flag_access.mus", "out_param.mus", "in_args.mus",
                           "access_arg.mus"}) {
    INFO(name);
    auto checked = check_source(read_corpus(name));
    ExecOutcome outcome = run_monitored(checked);
    CHECK(outcome.kind == ExecOutcome::Kind::Completed);
  }
}

TEST_CASE("crew_check flags exactly the write-aliased states") {
  auto checked = check_source(std::string(kListPrelude) + R"(
procedure Demo (A : in out List; B : in out List) is
begin
end Demo;
procedure Main is begin end Main;
)");
  TypeEnv env = checked.env("Demo");

  Store store;
  Location key_cell = store.allocate(Value::integer(7));
  auto make_list = [&](bool aliased) {
    Value rec = default_value(checked.types, Type::named("List"));
    if (aliased) rec.fields["Key"] = Value::address(Address(key_cell));
    return rec;
  };
  Location la = store.allocate(make_list(true));
  Location lb = store.allocate(make_list(true));
  Binding binding{{"A", Address(la)}, {"B", Address(lb)}};

  AccessPolicy policy(env);
  policy.fresh(path("A"), Permission::RW);
  policy.fresh(path("B"), Permission::RW);

  SUBCASE("ownership transferred, alias demoted to NO: fine") {
    policy.fresh(path("B.Key.all"), Permission::NO);
    CHECK(!crew_check(env, binding, store, policy, 64).has_value());
  }

  SUBCASE("two write-capable views of one address: violation") {
    policy.fresh(path("B.Key.all"), Permission::W);
    auto violation = crew_check(env, binding, store, policy, 64);
    REQUIRE(violation.has_value());
    std::set<std::string> involved = {violation->p.to_string(), violation->q.to_string()};
    CHECK(involved == std::set<std::string>{"A.Key.all", "B.Key.all"});
  }

  SUBCASE("read-only sharing is concurrent read: fine") {
    policy.fresh(path("A"), Permission::R);
    policy.fresh(path("B"), Permission::R);
    CHECK(!crew_check(env, binding, store, policy, 64).has_value());
  }

  SUBCASE("distinct locations never conflict") {
    Store disjoint;
    Location c1 = disjoint.allocate(Value::integer(1));
    Location c2 = disjoint.allocate(Value::integer(2));
    Value ra = default_value(checked.types, Type::named("List"));
    ra.fields["Key"] = Value::address(Address(c1));
    Value rb = default_value(checked.types, Type::named("List"));
    rb.fields["Key"] = Value::address(Address(c2));
    Location da = disjoint.allocate(std::move(ra));
    Location db = disjoint.allocate(std::move(rb));
    Binding b2{{"A", Address(da)}, {"B", Address(db)}};
    CHECK(!crew_check(env, b2, disjoint, policy, 64).has_value());
  }
}

TEST_CASE("path enumeration prunes null pointers and respects the bound") {
  auto checked = check_source(std::string(kListPrelude) +
                              "procedure Demo (A : in out List) is begin end Demo;"
                              "procedure Main is begin end Main;");
  TypeEnv env = checked.env("Demo");

  Store store;
  Location la = store.allocate(default_value(checked.types, Type::named("List")));
  Binding binding{{"A", Address(la)}};

  std::vector<std::string> names;
  for (const Path& p : enumerate_paths(env, binding, store, 64))
    names.push_back(p.to_string());
  CHECK(names == std::vector<std::string>{"A", "A.Flag", "A.Key", "A.Next"});

  // Cyclic store (unreachable through checked programs): the bound cuts off.
  store.write(Address(la).field("Next"), Value::address(Address(la)));
  int skipped = 0;
  auto bounded = enumerate_paths(env, binding, store, 2, &skipped);
  CHECK(skipped == 1);
  size_t with_two_derefs = 0;
  for (const Path& p : bounded) with_two_derefs += p.deref_count() == 2;
  CHECK(with_two_derefs == 4);  // A.Next.all.Next.all and its three fields
}

namespace {

// Independent reachability walk over the store, counting addresses the
// typed path enumeration should reach.
size_t count_reachable_paths(const TypeInfo& info, const Store& store, const Type& type,
                             const Address& addr) {
  size_t count = 1;
  switch (type.kind()) {
    case Type::Kind::Scalar: return count;
    case Type::Kind::Access: {
      const Value* v = store.read(addr);
      if (v && v->kind == Value::Kind::Addr)
        count += count_reachable_paths(info, store, type.element(), v->addr);
      return count;
    }
    case Type::Kind::Named: {
      const RecordDecl* rec = info.find_record(type.record_name());
      for (const RecordField& f : rec->fields)
        count += count_reachable_paths(info, store, f.type, addr.field(f.name));
      return count;
    }
  }
  return count;
}

}  // namespace

TEST_CASE("path enumeration matches a reachability oracle on an acyclic list") {
  auto checked = check_source(std::string(kListPrelude) +
                              "procedure Demo (A : in out List) is begin end Demo;"
                              "procedure Main is begin end Main;");
  TypeEnv env = checked.env("Demo");

  // Two-node list: A.Next -> node2, both keys point at integers.
  Store store;
  Location k1 = store.allocate(Value::integer(1));
  Location k2 = store.allocate(Value::integer(2));
  Value node2 = default_value(checked.types, Type::named("List"));
  node2.fields["Key"] = Value::address(Address(k2));
  Location l2 = store.allocate(std::move(node2));
  Value node1 = default_value(checked.types, Type::named("List"));
  node1.fields["Key"] = Value::address(Address(k1));
  node1.fields["Next"] = Value::address(Address(l2));
  Location l1 = store.allocate(std::move(node1));
  Binding binding{{"A", Address(l1)}};

  auto paths = enumerate_paths(env, binding, store, 64);
  CHECK(paths.size() ==
        count_reachable_paths(checked.types, store, Type::named("List"), Address(l1)));
  CHECK(paths.size() == 10);
}

TEST_CASE("frames are isolated: in parameters are value copies") {
  // Rejected by the alias rules (writing an in parameter), so run unchecked:
  // the callee's write must not reach the caller.
  auto checked = check_source(R"(
procedure Scribble (V : in Integer) is
begin
  V := 99;
end Scribble;
procedure Main is
  X : Integer;
begin
  X := 7;
  Scribble(X);
end Main;
)");
  AliasCheckResult analysis = alias_check(checked);
  CHECK(!analysis.accepted());
  ExecOutcome outcome = run_checked(checked);
  REQUIRE(outcome.kind == ExecOutcome::Kind::Completed);
  CHECK(*outcome.store.read(outcome.main_frame.at("X")) == Value::integer(7));
}

TEST_CASE("store only grows and all stored addresses stay valid") {
  auto checked = check_source(read_corpus("rotate.mus"));
  ExecOutcome outcome = run_checked(checked);
  REQUIRE(outcome.kind == ExecOutcome::Kind::Completed);
  // Main's two locals plus four allocations plus the callee's local.
  CHECK(outcome.store.size() == 7);
  for (const auto& [loc, value] : outcome.store.cells()) {
    std::vector<const Value*> stack{&value};
    while (!stack.empty()) {
      const Value* v = stack.back();
      stack.pop_back();
      if (v->kind == Value::Kind::Addr) CHECK(outcome.store.contains(v->addr.base));
      if (v->kind == Value::Kind::Record)
        for (const auto& [name, field] : v->fields) stack.push_back(&field);
    }
  }
}

TEST_CASE("execution is deterministic") {
  auto checked = check_source(read_corpus("rotate.mus"));
  ExecOutcome a = run_checked(checked);
  ExecOutcome b = run_checked(checked);
  CHECK(a.kind == b.kind);
  CHECK(a.steps == b.steps);
  CHECK(a.store == b.store);
  CHECK(a.main_frame == b.main_frame);
}

TEST_CASE("the verbose stream reports every sequence point") {
  auto checked = check_source("procedure Main is X : Integer; begin X := 1; X := 2; end Main;");
  AliasCheckResult analysis = alias_check(checked);
  REQUIRE(analysis.accepted());
  RunOptions opts;
  opts.monitored = true;
  opts.policies = &analysis.policies;
  std::vector<std::string> lines;
  opts.verbose = [&](const std::string& line) { lines.push_back(line); };
  run_program(*checked.program, checked.types, opts);
  REQUIRE(lines.size() == 4);  // before/after for each of the two statements
  CHECK(lines[0].substr(0, lines[0].find('\t')) == "Main#1:before");
  CHECK(lines[3].substr(0, lines[3].find('\t')) == "Main#2:after");
}
