// The permission lattice and access policies: lazily represented maps from
// every well-typed path of a procedure's scope to a permission, together
// with the permission transformers the alias safety rules are built from.
#ifndef MUSPARK_PERMISSION_HPP
#define MUSPARK_PERMISSION_HPP

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "muspark/syntax.hpp"
#include "muspark/typecheck.hpp"

namespace muspark {

// Diamond lattice: RW above R and W, which are incomparable, above NO.
// Encoded as read/write bits so that meet is bitwise and.
enum class Permission : uint8_t { NO = 0, R = 1, W = 2, RW = 3 };

inline Permission meet(Permission a, Permission b) {
  return static_cast<Permission>(static_cast<uint8_t>(a) & static_cast<uint8_t>(b));
}
// True iff a <= b in the lattice order.
inline bool perm_leq(Permission a, Permission b) { return meet(a, b) == a; }

const char* to_string(Permission p);
std::optional<Permission> permission_from_string(std::string_view s);

// Describes every unexpanded child subtree of a policy node.
//   Uniform(p): all descendants carry p.
//   CutFrom(p): the image of a Uniform(p) subtree under `cut`; expanding one
//   slot yields W on deep fields (frontier CutFrom(p) again), p on shallow
//   fields (frontier Uniform(p)) and NO under dereferences (Uniform(NO)).
struct Frontier {
  enum class Kind : uint8_t { Uniform, CutFrom };
  Kind kind = Kind::Uniform;
  Permission perm = Permission::NO;

  static Frontier uniform(Permission p) { return Frontier{Kind::Uniform, p}; }
  static Frontier cut_from(Permission p) { return Frontier{Kind::CutFrom, p}; }
  bool operator==(const Frontier& other) const {
    return kind == other.kind && perm == other.perm;
  }
};

struct PolicyNode {
  Permission perm = Permission::NO;
  Frontier frontier = Frontier::uniform(Permission::NO);
  std::map<Segment, std::unique_ptr<PolicyNode>> children;

  PolicyNode() = default;
  PolicyNode(Permission p, Frontier f) : perm(p), frontier(f) {}
  PolicyNode clone() const;
};

// A failed `check` premise.
struct PermError {
  Path path;
  Permission required = Permission::NO;
  Permission actual = Permission::NO;
  std::string transformer;
};

// Optional reordering hook for the paths of an expression; checking must be
// order-independent, which the fuzzer exercises through this.
using PathShuffle = std::function<void(std::vector<Path>&)>;

// Maximal operand paths of an expression, left to right, duplicates kept.
// Address-of operands are handled by move/observe directly and contribute
// nothing here.
std::vector<Path> paths_of_expr(const Expr& expr);

class AccessPolicy {
 public:
  AccessPolicy() = default;
  explicit AccessPolicy(TypeEnv env);

  AccessPolicy(const AccessPolicy& other);
  AccessPolicy& operator=(const AccessPolicy& other);
  AccessPolicy(AccessPolicy&&) = default;
  AccessPolicy& operator=(AccessPolicy&&) = default;

  const TypeEnv& env() const { return env_; }

  // Permission of a well-typed path; pure, never expands the tree.
  Permission get(const Path& path) const;

  // Verifies that `path` has permission `required` or greater.
  std::optional<PermError> check(const Path& path, Permission required) const;
  // check over every operand path of an expression.
  std::optional<PermError> check_expr(const Expr& expr, Permission required,
                                      const PathShuffle* shuffle = nullptr) const;

  // Assigns `perm` to the path and all its extensions.
  void fresh(const Path& path, Permission perm);
  // Restricts a freshly moved-from subtree: the path and its near deep
  // extensions become W, near shallow extensions keep their permissions,
  // far extensions lose everything. On a shallow path only the path itself
  // becomes W.
  void cut(const Path& path);
  // Propagates the loss of the read permission to the path's prefixes.
  void block(const Path& path);
  // Revokes prefixes up to the first pointer, then behaves like block.
  void drop(const Path& path);
  // Propagates RW to prefixes wherever the whole sibling subtree allows it.
  void lift(const Path& path);
  // NO on the path, all its extensions and all its prefixes.
  void borrow(const Path& path);
  // Caps the path, its prefixes and its extensions at R.
  void freeze(const Path& path);

  // Right-hand side of an assignment: read check for shallow values,
  // ownership transfer for deep paths and 'Access expressions.
  std::optional<PermError> move_expr(const Expr& expr,
                                     const PathShuffle* shuffle = nullptr);
  // Temporary read-only sharing of an in argument.
  void observe_expr(const Expr& expr);

  // Collapses expanded subtrees that match their frontier descriptor.
  void normalize();

 private:
  friend AccessPolicy policy_meet(const AccessPolicy&, const AccessPolicy&);
  friend struct LeqChecker;

  TypeEnv env_;
  std::map<std::string, PolicyNode> roots_;
};

// Pointwise meet of two policies over the same scope.
AccessPolicy policy_meet(const AccessPolicy& a, const AccessPolicy& b);

struct PolicyLeq {
  bool ok = true;
  // On failure, a witness path of minimal length with the offending pair.
  Path witness;
  Permission lhs = Permission::NO;
  Permission rhs = Permission::NO;
};

// True iff a(p) >= b(p) for every well-typed path p.
PolicyLeq policy_leq(const AccessPolicy& a, const AccessPolicy& b);

inline bool policy_equal(const AccessPolicy& a, const AccessPolicy& b) {
  return policy_leq(a, b).ok && policy_leq(b, a).ok;
}

// Consistency invariants: RW and R propagate to all extensions, W propagates
// to record fields.
struct ConsistencyViolation {
  Path path;
  Path extension;
  Permission perm;
  Permission extension_perm;
  int invariant = 0;  // 1, 2 or 3
};

std::optional<ConsistencyViolation> consistency_violation(const AccessPolicy& policy,
                                                          int max_segments);

// Fault-injection hook for mutation testing of the transformers. Not for
// production use.
enum class Mutation : uint8_t { None, CutKeepsFar, BlockNoop, BorrowKeepsPrefixes };
void set_mutation_for_testing(Mutation m);
Mutation current_mutation();

}  // namespace muspark

#endif  // MUSPARK_PERMISSION_HPP
