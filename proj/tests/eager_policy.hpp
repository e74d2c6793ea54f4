// Test-only oracle: an access policy materialized as an explicit map over
// every path up to a fixed depth, with the permission transformers written
// directly from their definitions. Independent of the lazy tree
// implementation it is used to validate.
#ifndef MUSPARK_EAGER_POLICY_HPP
#define MUSPARK_EAGER_POLICY_HPP

#include <cassert>
#include <map>
#include <random>
#include <string>

#include "muspark/permission.hpp"
#include "muspark/typecheck.hpp"

namespace muspark::test {

// Random record declarations plus a Demo procedure with a few in-out
// variables; dereference nesting stays at or below four so that a
// depth-8 eager policy determines every query up to depth 6.
inline std::string random_env_source(std::mt19937_64& rng) {
  auto pick_type = [&](int max_named, int depth, auto&& self) -> std::string {
    int roll = static_cast<int>(rng() % 10);
    if (roll < 4 || depth >= 4) {
      const char* scalars[] = {"Integer", "Real", "Boolean"};
      return scalars[rng() % 3];
    }
    if (roll < 8 && max_named > 0)
      return "T" + std::to_string(1 + rng() % static_cast<uint64_t>(max_named));
    return "access " + self(max_named, depth + 1, self);
  };
  std::string out;
  int records = 1 + static_cast<int>(rng() % 3);
  int field = 0;
  for (int r = 1; r <= records; ++r) {
    out += "type T" + std::to_string(r) + " is record\n";
    int fields = 1 + static_cast<int>(rng() % 3);
    for (int f = 0; f < fields; ++f) {
      // Earlier records directly, the current one only behind access.
      bool behind_access = rng() % 2 == 0;
      std::string type = behind_access ? "access " + pick_type(r, 1, pick_type)
                                       : pick_type(r - 1, 0, pick_type);
      out += "  G" + std::to_string(++field) + " : " + type + ";\n";
    }
    out += "end record;\n";
  }
  out += "procedure Demo (";
  int vars = 2 + static_cast<int>(rng() % 2);
  for (int v = 0; v < vars; ++v) {
    if (v) out += "; ";
    out += "V" + std::to_string(v + 1) + " : in out " + pick_type(records, 0, pick_type);
  }
  out += ") is begin end Demo;\nprocedure Main is begin end Main;\n";
  return out;
}

class EagerPolicy {
 public:
  EagerPolicy(TypeEnv env, int depth) : env_(env), depth_(depth) {
    for (const Path& p : enumerate_static_paths(env, depth))
      perms_.emplace(p, Permission::NO);
  }

  const std::map<Path, Permission>& entries() const { return perms_; }

  Permission get(const Path& p) const {
    auto it = perms_.find(p);
    assert(it != perms_.end());
    return it->second;
  }

  void set(const Path& p, Permission perm) { perms_.at(p) = perm; }

  bool is_deep_path(const Path& p) const {
    auto t = type_of_path(env_, p);
    assert(t.ok());
    return is_deep(*env_.info, t.value());
  }

  void fresh(const Path& p, Permission perm) {
    for (auto& [q, v] : perms_)
      if (q == p || extension_kind(p, q) != ExtensionKind::NotExtension) v = perm;
  }

  void cut(const Path& p) {
    if (!is_deep_path(p)) {
      perms_.at(p) = Permission::W;
      return;
    }
    perms_.at(p) = Permission::W;
    for (auto& [q, v] : perms_) {
      switch (extension_kind(p, q)) {
        case ExtensionKind::NotExtension:
          break;
        case ExtensionKind::Near:
          // near deep extensions get W; near shallow ones keep theirs
          if (is_deep_path(q)) v = Permission::W;
          break;
        case ExtensionKind::Far:
          v = Permission::NO;
          break;
      }
    }
  }

  // True iff the block recursion would reach a record-field prefix whose
  // permission is exactly R (the undefined case).
  bool block_would_fail(const Path& p) const {
    Path cur = p;
    while (!cur.segments.empty()) {
      Segment last = cur.segments.back();
      Path prefix = cur.parent();
      if (last.is_deref()) {
        cur = prefix;
        continue;
      }
      Permission perm = get(prefix);
      if (perm == Permission::NO) return false;
      if (perm == Permission::R) return true;
      cur = prefix;
    }
    return false;
  }

  // drop ignores field prefixes below the first dereference, so its
  // undefined case differs from block's.
  bool drop_would_fail(const Path& p) const {
    bool in_block = false;
    for (size_t k = p.segments.size(); k > 0; --k) {
      if (p.segments[k - 1].is_deref()) {
        in_block = true;
        continue;
      }
      if (!in_block) continue;
      Permission perm = get(p.prefix(k - 1));
      if (perm == Permission::NO) return false;
      if (perm == Permission::R) return true;
    }
    return false;
  }

  void block(const Path& p) {
    Path cur = p;
    while (!cur.segments.empty()) {
      Segment last = cur.segments.back();
      Path prefix = cur.parent();
      if (last.is_deref()) {
        perms_.at(prefix) = Permission::W;
        cur = prefix;
        continue;
      }
      Permission perm = get(prefix);
      if (perm == Permission::NO) return;
      assert(perm != Permission::R && "block has no rule for an R field prefix");
      perms_.at(prefix) = Permission::W;
      cur = prefix;
    }
  }

  void drop(const Path& p) {
    Path cur = p;
    while (!cur.segments.empty()) {
      Segment last = cur.segments.back();
      Path prefix = cur.parent();
      if (last.is_deref()) {
        perms_.at(prefix) = Permission::W;
        block(prefix);
        return;
      }
      perms_.at(prefix) = Permission::NO;
      cur = prefix;
    }
  }

  void lift(const Path& p) {
    Path cur = p;
    while (!cur.segments.empty()) {
      Segment last = cur.segments.back();
      Path prefix = cur.parent();
      if (last.is_deref()) {
        perms_.at(prefix) = Permission::RW;
        cur = prefix;
        continue;
      }
      bool all_rw = true;
      for (const auto& [q, v] : perms_)
        if (extension_kind(prefix, q) != ExtensionKind::NotExtension &&
            v != Permission::RW)
          all_rw = false;
      if (!all_rw) return;
      perms_.at(prefix) = Permission::RW;
      cur = prefix;
    }
  }

  void borrow(const Path& p) {
    for (auto& [q, v] : perms_)
      if (comparable(p, q)) v = Permission::NO;
  }

  void freeze(const Path& p) {
    for (auto& [q, v] : perms_)
      if (comparable(p, q)) v = meet(v, Permission::R);
  }

 private:
  TypeEnv env_;
  int depth_;
  std::map<Path, Permission> perms_;
};

}  // namespace muspark::test

#endif  // MUSPARK_EAGER_POLICY_HPP
