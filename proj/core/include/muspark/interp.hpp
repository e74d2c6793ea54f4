// Big-step reference interpreter for muSPARK with blocking semantics, plus
// the runtime monitor that checks the Concurrent Read, Exclusive Write
// condition against the statically computed policies.
#ifndef MUSPARK_INTERP_HPP
#define MUSPARK_INTERP_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "muspark/alias_check.hpp"
#include "muspark/result.hpp"
#include "muspark/syntax.hpp"
#include "muspark/typecheck.hpp"

namespace muspark {

// Allocation unit; never reused.
using Location = uint64_t;

// A location or a component inside the record stored at one.
struct Address {
  Location base = 0;
  std::vector<std::string> fields;

  Address() = default;
  explicit Address(Location loc) : base(loc) {}

  Address field(const std::string& name) const {
    Address a = *this;
    a.fields.push_back(name);
    return a;
  }

  bool operator==(const Address& other) const {
    return base == other.base && fields == other.fields;
  }
  bool operator<(const Address& other) const {
    if (base != other.base) return base < other.base;
    return fields < other.fields;
  }
};

struct Value {
  enum class Kind : uint8_t { Int, Real, Bool, Addr, Null, Record };

  Kind kind = Kind::Null;
  int64_t int_value = 0;
  double real_value = 0;
  bool bool_value = false;
  Address addr;
  std::map<std::string, Value> fields;

  static Value integer(int64_t v);
  static Value real(double v);
  static Value boolean(bool v);
  static Value address(Address a);
  static Value null();
  static Value record(std::map<std::string, Value> fields);

  bool operator==(const Value& other) const;
};

// Locations to values. Reads and single-component updates work through
// arbitrary addresses.
class Store {
 public:
  Location allocate(Value initial);
  const Value* read(const Address& addr) const;
  void write(const Address& addr, Value value);

  size_t size() const { return cells_.size(); }
  bool contains(Location loc) const { return cells_.count(loc) != 0; }
  const std::map<Location, Value>& cells() const { return cells_; }
  bool operator==(const Store& other) const { return cells_ == other.cells_; }

 private:
  std::map<Location, Value> cells_;
  Location next_ = 1;
};

// Variables of one active frame to addresses.
using Binding = std::map<std::string, Address>;

enum class BlockReason : uint8_t { NullDeref, DivByZero, Overflow };

const char* to_string(BlockReason reason);

struct CrewViolationInfo {
  PointKey point;
  Path p;
  Path q;
  Permission perm_p = Permission::NO;
  Permission perm_q = Permission::NO;
};

struct ExecOutcome {
  enum class Kind : uint8_t { Completed, Blocked, FuelExhausted, CrewViolation };

  Kind kind = Kind::Completed;
  BlockReason reason = BlockReason::NullDeref;  // when Blocked
  Span span;                                    // when Blocked
  std::optional<CrewViolationInfo> crew;        // when CrewViolation
  Store store;
  Binding main_frame;
  uint64_t steps = 0;
};

const char* to_string(ExecOutcome::Kind kind);

struct RunOptions {
  uint64_t fuel = 100000;
  bool monitored = false;
  // Static policy snapshots, required for monitored runs of checked
  // programs; ignored when permissive_policy is set.
  const PolicyMap* policies = nullptr;
  // Monitor against an all-RW policy (negative-control mode for unchecked
  // runs).
  bool permissive_policy = false;
  int depth_bound = 64;  // dereference steps monitored per path
  bool trap_overflow = false;
  // Recursion guard; exceeding it counts as fuel exhaustion. Execution
  // recurses on the host stack, so this stays conservative.
  int max_call_depth = 256;
  std::function<void(const std::string&)> verbose;
};

Value default_value(const TypeInfo& info, const Type& type);

struct Block {
  BlockReason reason = BlockReason::NullDeref;
  Span span;
};

Result<Address, Block> eval_lval(const Binding& binding, const Store& store, const Path& path);
Result<Value, Block> eval_expr(const Binding& binding, const Store& store, const Expr& expr,
                               bool trap_overflow = false);

// All paths of the frame's scope whose addresses exist, within `depth_bound`
// dereference steps; null pointers prune their extensions. `skipped`, when
// given, counts paths cut off by the bound.
std::vector<Path> enumerate_paths(const TypeEnv& env, const Binding& binding,
                                  const Store& store, int depth_bound,
                                  int* skipped = nullptr);

// Checks the CREW condition for the frame: two distinct paths that evaluate
// to the same address may not pair a writer with anything readable.
std::optional<CrewViolationInfo> crew_check(const TypeEnv& env, const Binding& binding,
                                            const Store& store, const AccessPolicy& policy,
                                            int depth_bound);

ExecOutcome run_program(const Program& program, const TypeInfo& types,
                        const RunOptions& options = {});

}  // namespace muspark

#endif  // MUSPARK_INTERP_HPP
