#include "muspark/permission.hpp"

#include <cassert>
#include <deque>
#include <stdexcept>

namespace muspark {

namespace {

Mutation g_mutation = Mutation::None;

// A type position inside a procedure's scope, for type-directed tree walks.
struct TypeCursor {
  const TypeInfo* info = nullptr;
  Type type;

  bool deep() const { return is_deep(*info, type); }
  bool scalar() const { return type.is_scalar(); }
  std::vector<Segment> slots() const { return child_segments(*info, type); }
  TypeCursor child(const Segment& seg) const {
    auto t = segment_type(*info, type, seg, Span{});
    assert(t.ok() && "ill-typed segment reached the permission tree");
    return TypeCursor{info, t.value()};
  }
};

TypeCursor root_cursor(const TypeEnv& env, const std::string& var) {
  const VarInfo* info = env.find_var(var);
  assert(info && "unknown variable reached the permission tree");
  return TypeCursor{env.info, info->type};
}

// Node contents a frontier descriptor yields for one child slot.
std::pair<Permission, Frontier> synthesize(const Frontier& f, const Segment& seg,
                                           const TypeCursor& child_cursor) {
  if (f.kind == Frontier::Kind::Uniform) return {f.perm, Frontier::uniform(f.perm)};
  if (seg.is_deref()) return {Permission::NO, Frontier::uniform(Permission::NO)};
  if (child_cursor.deep()) return {Permission::W, Frontier::cut_from(f.perm)};
  return {f.perm, Frontier::uniform(f.perm)};
}

PolicyNode* child_mut(PolicyNode& node, const Segment& seg, const TypeCursor& child_cursor) {
  auto it = node.children.find(seg);
  if (it != node.children.end()) return it->second.get();
  auto [perm, frontier] = synthesize(node.frontier, seg, child_cursor);
  auto inserted =
      node.children.emplace(seg, std::make_unique<PolicyNode>(perm, frontier));
  return inserted.first->second.get();
}

// Expands every child slot of `node`, after which its frontier is inert.
void materialize_all(PolicyNode& node, const TypeCursor& cursor) {
  for (const Segment& seg : cursor.slots()) child_mut(node, seg, cursor.child(seg));
  node.frontier = Frontier::uniform(Permission::NO);
}

// Read-only view of a policy subtree, real or synthesized from a frontier.
struct View {
  Permission perm = Permission::NO;
  const PolicyNode* node = nullptr;
  Frontier frontier = Frontier::uniform(Permission::NO);

  Frontier effective_frontier() const { return node ? node->frontier : frontier; }
  static View of(const PolicyNode& n) { return View{n.perm, &n, n.frontier}; }
};

View child_view(const View& v, const Segment& seg, const TypeCursor& child_cursor) {
  if (v.node) {
    auto it = v.node->children.find(seg);
    if (it != v.node->children.end()) return View::of(*it->second);
  }
  auto [perm, frontier] = synthesize(v.effective_frontier(), seg, child_cursor);
  return View{perm, nullptr, frontier};
}

bool frontier_all(const Frontier& f, Permission p) {
  return f.kind == Frontier::Kind::Uniform && f.perm == p;
}

// Whether every path in the viewed subtree (excluding the node itself when
// `include_root` is false) has exactly permission RW.
bool subtree_all_rw(const View& v, const TypeCursor& cursor, bool include_root) {
  if (include_root && v.perm != Permission::RW) return false;
  if (cursor.scalar()) return true;
  // A CutFrom frontier always contains a node below RW.
  if (!v.node) return frontier_all(v.frontier, Permission::RW);
  for (const Segment& seg : cursor.slots()) {
    auto it = v.node->children.find(seg);
    if (it == v.node->children.end()) {
      if (!frontier_all(v.node->frontier, Permission::RW)) return false;
      continue;
    }
    if (!subtree_all_rw(View::of(*it->second), cursor.child(seg), true)) return false;
  }
  return true;
}

}  // namespace

const char* to_string(Permission p) {
  switch (p) {
    case Permission::NO: return "NO";
    case Permission::R: return "R";
    case Permission::W: return "W";
    case Permission::RW: return "RW";
  }
  return "?";
}

std::optional<Permission> permission_from_string(std::string_view s) {
  if (s == "NO") return Permission::NO;
  if (s == "R") return Permission::R;
  if (s == "W") return Permission::W;
  if (s == "RW") return Permission::RW;
  return std::nullopt;
}

void set_mutation_for_testing(Mutation m) { g_mutation = m; }
Mutation current_mutation() { return g_mutation; }

PolicyNode PolicyNode::clone() const {
  PolicyNode out(perm, frontier);
  for (const auto& [seg, child] : children)
    out.children.emplace(seg, std::make_unique<PolicyNode>(child->clone()));
  return out;
}

std::vector<Path> paths_of_expr(const Expr& expr) {
  std::vector<Path> out;
  struct Walk {
    static void go(const Expr& e, std::vector<Path>& out) {
      switch (e.kind) {
        case Expr::Kind::PathRef:
          out.push_back(e.path);
          return;
        case Expr::Kind::Binary:
          go(*e.lhs, out);
          go(*e.rhs, out);
          return;
        default:
          return;  // literals, null and 'Access contribute nothing
      }
    }
  };
  Walk::go(expr, out);
  return out;
}

AccessPolicy::AccessPolicy(TypeEnv env) : env_(env) {
  if (env_.vars)
    for (const auto& [name, info] : *env_.vars) roots_.emplace(name, PolicyNode{});
}

AccessPolicy::AccessPolicy(const AccessPolicy& other) : env_(other.env_) {
  for (const auto& [name, node] : other.roots_) roots_.emplace(name, node.clone());
}

AccessPolicy& AccessPolicy::operator=(const AccessPolicy& other) {
  if (this == &other) return *this;
  env_ = other.env_;
  roots_.clear();
  for (const auto& [name, node] : other.roots_) roots_.emplace(name, node.clone());
  return *this;
}

Permission AccessPolicy::get(const Path& path) const {
  auto it = roots_.find(path.root);
  assert(it != roots_.end() && "path root is not in scope");
  const PolicyNode* node = &it->second;
  TypeCursor cursor = root_cursor(env_, path.root);
  size_t i = 0;
  for (; i < path.segments.size(); ++i) {
    const Segment& seg = path.segments[i];
    TypeCursor child = cursor.child(seg);
    auto child_it = node->children.find(seg);
    if (child_it == node->children.end()) break;
    node = child_it->second.get();
    cursor = child;
  }
  if (i == path.segments.size()) return node->perm;
  // Continue through the frontier without expanding.
  Frontier f = node->frontier;
  Permission perm = node->perm;
  for (; i < path.segments.size(); ++i) {
    const Segment& seg = path.segments[i];
    cursor = cursor.child(seg);
    auto [p, next] = synthesize(f, seg, cursor);
    perm = p;
    f = next;
  }
  return perm;
}

std::optional<PermError> AccessPolicy::check(const Path& path, Permission required) const {
  Permission actual = get(path);
  if (perm_leq(required, actual)) return std::nullopt;
  return PermError{path, required, actual, "check"};
}

std::optional<PermError> AccessPolicy::check_expr(const Expr& expr, Permission required,
                                                  const PathShuffle* shuffle) const {
  std::vector<Path> paths = paths_of_expr(expr);
  if (shuffle) (*shuffle)(paths);
  for (const Path& p : paths)
    if (auto err = check(p, required)) return err;
  return std::nullopt;
}

namespace {

struct WalkEntry {
  PolicyNode* node;
  TypeCursor cursor;
};

}  // namespace

// Nodes along the path, prefixes first, materializing as needed;
// result[k] corresponds to the prefix with k segments.
static std::vector<WalkEntry> walk_mut(std::map<std::string, PolicyNode>& roots,
                                       const TypeEnv& env, const Path& path) {
  auto it = roots.find(path.root);
  assert(it != roots.end() && "path root is not in scope");
  std::vector<WalkEntry> entries;
  entries.push_back(WalkEntry{&it->second, root_cursor(env, path.root)});
  for (const Segment& seg : path.segments) {
    WalkEntry& back = entries.back();
    TypeCursor child_cursor = back.cursor.child(seg);
    PolicyNode* child = child_mut(*back.node, seg, child_cursor);
    entries.push_back(WalkEntry{child, child_cursor});
  }
  return entries;
}

void AccessPolicy::fresh(const Path& path, Permission perm) {
  auto entries = walk_mut(roots_, env_, path);
  PolicyNode& node = *entries.back().node;
  node.perm = perm;
  node.frontier = Frontier::uniform(perm);
  node.children.clear();
}

namespace {

void cut_node(PolicyNode& node, const TypeCursor& cursor) {
  node.perm = Permission::W;
  if (!cursor.deep()) return;  // generalized cut: extensions unchanged
  if (g_mutation == Mutation::CutKeepsFar) {
    // Weakened for mutation testing: far extensions keep their permissions.
    materialize_all(node, cursor);
    for (auto& [seg, child] : node.children) {
      if (seg.is_deref()) continue;
      TypeCursor cc = cursor.child(seg);
      if (cc.deep()) cut_node(*child, cc);
    }
    return;
  }
  for (auto& [seg, child] : node.children) {
    if (seg.is_deref()) {
      *child = PolicyNode(Permission::NO, Frontier::uniform(Permission::NO));
      continue;
    }
    TypeCursor cc = cursor.child(seg);
    if (cc.deep()) cut_node(*child, cc);
    // near shallow extensions keep their permissions
  }
  if (node.frontier.kind == Frontier::Kind::Uniform)
    node.frontier = Frontier::cut_from(node.frontier.perm);
  // A CutFrom frontier is already its own image under cut.
}

}  // namespace

void AccessPolicy::cut(const Path& path) {
  auto entries = walk_mut(roots_, env_, path);
  cut_node(*entries.back().node, entries.back().cursor);
}

// Shared upward recursion of block, starting above prefix `k` of the path.
static void block_from(std::vector<WalkEntry>& entries, const Path& path, size_t k) {
  while (k > 0) {
    const Segment& seg = path.segments[k - 1];
    PolicyNode& prefix = *entries[k - 1].node;
    if (seg.is_deref()) {
      prefix.perm = Permission::W;
      --k;
      continue;
    }
    if (prefix.perm == Permission::NO) return;
    if (perm_leq(Permission::W, prefix.perm)) {
      prefix.perm = Permission::W;
      --k;
      continue;
    }
    // No rule covers a field prefix at R; consistency makes this unreachable.
    throw std::logic_error("block: field prefix " +
                           path.prefix(k - 1).to_string() + " has permission R");
  }
}

void AccessPolicy::block(const Path& path) {
  if (g_mutation == Mutation::BlockNoop) return;
  auto entries = walk_mut(roots_, env_, path);
  block_from(entries, path, path.segments.size());
}

void AccessPolicy::drop(const Path& path) {
  auto entries = walk_mut(roots_, env_, path);
  size_t k = path.segments.size();
  while (k > 0) {
    const Segment& seg = path.segments[k - 1];
    PolicyNode& prefix = *entries[k - 1].node;
    if (seg.is_deref()) {
      prefix.perm = Permission::W;
      block_from(entries, path, k - 1);
      return;
    }
    prefix.perm = Permission::NO;
    --k;
  }
}

void AccessPolicy::lift(const Path& path) {
  auto entries = walk_mut(roots_, env_, path);
  size_t k = path.segments.size();
  while (k > 0) {
    const Segment& seg = path.segments[k - 1];
    WalkEntry& prefix = entries[k - 1];
    if (seg.is_deref()) {
      prefix.node->perm = Permission::RW;
      --k;
      continue;
    }
    if (!subtree_all_rw(View::of(*prefix.node), prefix.cursor, false)) return;
    prefix.node->perm = Permission::RW;
    --k;
  }
}

void AccessPolicy::borrow(const Path& path) {
  auto entries = walk_mut(roots_, env_, path);
  if (g_mutation != Mutation::BorrowKeepsPrefixes)
    for (size_t k = 0; k < path.segments.size(); ++k)
      entries[k].node->perm = Permission::NO;
  PolicyNode& node = *entries.back().node;
  node.perm = Permission::NO;
  node.frontier = Frontier::uniform(Permission::NO);
  node.children.clear();
}

namespace {

void freeze_node(PolicyNode& node, const TypeCursor& cursor) {
  node.perm = meet(node.perm, Permission::R);
  if (cursor.scalar()) return;
  if (node.frontier.kind == Frontier::Kind::CutFrom) materialize_all(node, cursor);
  node.frontier = Frontier::uniform(meet(node.frontier.perm, Permission::R));
  for (auto& [seg, child] : node.children) freeze_node(*child, cursor.child(seg));
}

}  // namespace

void AccessPolicy::freeze(const Path& path) {
  auto entries = walk_mut(roots_, env_, path);
  for (size_t k = 0; k < path.segments.size(); ++k)
    entries[k].node->perm = meet(entries[k].node->perm, Permission::R);
  freeze_node(*entries.back().node, entries.back().cursor);
}

std::optional<PermError> AccessPolicy::move_expr(const Expr& expr,
                                                 const PathShuffle* shuffle) {
  if (expr.kind == Expr::Kind::Null) return std::nullopt;
  if (expr.kind == Expr::Kind::AddressOf) {
    if (auto err = check(expr.path, Permission::RW)) {
      err->transformer = "move";
      return err;
    }
    fresh(expr.path, Permission::NO);
    drop(expr.path);
    return std::nullopt;
  }
  if (expr.kind == Expr::Kind::PathRef) {
    auto type = type_of_path(env_, expr.path);
    assert(type.ok() && "move over an ill-typed expression");
    if (is_deep(*env_.info, type.value())) {
      if (auto err = check(expr.path, Permission::RW)) {
        err->transformer = "move";
        return err;
      }
      cut(expr.path);
      block(expr.path);
      return std::nullopt;
    }
  }
  // Shallow value: a read suffices.
  if (auto err = check_expr(expr, Permission::R, shuffle)) {
    err->transformer = "move";
    return err;
  }
  return std::nullopt;
}

void AccessPolicy::observe_expr(const Expr& expr) {
  if (expr.kind == Expr::Kind::AddressOf) {
    freeze(expr.path);
    return;
  }
  if (expr.kind == Expr::Kind::PathRef) {
    auto type = type_of_path(env_, expr.path);
    assert(type.ok() && "observe over an ill-typed expression");
    if (is_deep(*env_.info, type.value())) freeze(expr.path);
  }
  // Shallow expressions and null need no permission change.
}

namespace {

bool matches_synthesis(const Frontier& f, const Segment& seg, const PolicyNode& child,
                       const TypeCursor& child_cursor) {
  if (!child.children.empty()) return false;
  auto [perm, frontier] = synthesize(f, seg, child_cursor);
  return child.perm == perm && child.frontier == frontier;
}

void normalize_node(PolicyNode& node, const TypeCursor& cursor) {
  for (auto it = node.children.begin(); it != node.children.end();) {
    TypeCursor cc = cursor.child(it->first);
    normalize_node(*it->second, cc);
    if (matches_synthesis(node.frontier, it->first, *it->second, cc))
      it = node.children.erase(it);
    else
      ++it;
  }
}

}  // namespace

void AccessPolicy::normalize() {
  for (auto& [name, node] : roots_) normalize_node(node, root_cursor(env_, name));
}

namespace {

PolicyNode meet_views(const View& a, const View& b, const TypeCursor& cursor) {
  PolicyNode out(meet(a.perm, b.perm), Frontier::uniform(Permission::NO));
  if (cursor.scalar()) return out;

  Frontier fa = a.effective_frontier();
  Frontier fb = b.effective_frontier();
  bool expand_all = false;
  if (fa.kind == fb.kind) {
    out.frontier = Frontier{fa.kind, meet(fa.perm, fb.perm)};
  } else if (frontier_all(fa, Permission::RW)) {
    out.frontier = fb;
  } else if (frontier_all(fb, Permission::RW)) {
    out.frontier = fa;
  } else if (frontier_all(fa, Permission::NO) || frontier_all(fb, Permission::NO)) {
    out.frontier = Frontier::uniform(Permission::NO);
  } else {
    expand_all = true;
  }

  for (const Segment& seg : cursor.slots()) {
    bool expanded = (a.node && a.node->children.count(seg)) ||
                    (b.node && b.node->children.count(seg));
    if (!expanded && !expand_all) continue;
    TypeCursor cc = cursor.child(seg);
    out.children.emplace(seg, std::make_unique<PolicyNode>(meet_views(
                                  child_view(a, seg, cc), child_view(b, seg, cc), cc)));
  }
  return out;
}

}  // namespace

AccessPolicy policy_meet(const AccessPolicy& a, const AccessPolicy& b) {
  AccessPolicy out(a.env_);
  for (auto& [name, node] : out.roots_) {
    auto ia = a.roots_.find(name);
    auto ib = b.roots_.find(name);
    assert(ib != b.roots_.end() && "policies over different scopes");
    node = meet_views(View::of(ia->second), View::of(ib->second),
                      root_cursor(a.env_, name));
  }
  out.normalize();
  return out;
}

struct LeqChecker {
  static PolicyLeq run(const AccessPolicy& a, const AccessPolicy& b) {
    // Breadth-first so that a failure witness has minimal length.
    std::deque<std::tuple<Path, View, View, TypeCursor>> queue;
    if (a.env_.vars)
      for (const auto& [name, info] : *a.env_.vars)
        queue.emplace_back(Path(name), View::of(a.roots_.at(name)),
                           View::of(b.roots_.at(name)), root_cursor(a.env_, name));
    while (!queue.empty()) {
      auto [path, va, vb, cursor] = std::move(queue.front());
      queue.pop_front();
      if (!perm_leq(vb.perm, va.perm)) return PolicyLeq{false, path, va.perm, vb.perm};
      if (cursor.scalar()) continue;
      if (!va.node && !vb.node) {
        Frontier fa = va.frontier;
        Frontier fb = vb.frontier;
        if (frontier_all(fa, Permission::RW) || frontier_all(fb, Permission::NO)) continue;
        if (fa.kind == Frontier::Kind::Uniform && fb.kind == Frontier::Kind::Uniform) {
          if (perm_leq(fb.perm, fa.perm)) continue;
          // Fails one level down; fall through to enqueue the children.
        }
        if (fa.kind == Frontier::Kind::CutFrom && fb.kind == Frontier::Kind::CutFrom &&
            perm_leq(fb.perm, fa.perm))
          continue;
      }
      for (const Segment& seg : cursor.slots()) {
        TypeCursor cc = cursor.child(seg);
        queue.emplace_back(path.child(seg), child_view(va, seg, cc),
                           child_view(vb, seg, cc), cc);
      }
    }
    return PolicyLeq{};
  }
};

PolicyLeq policy_leq(const AccessPolicy& a, const AccessPolicy& b) {
  return LeqChecker::run(a, b);
}

namespace {

std::optional<ConsistencyViolation> check_consistency_node(
    const AccessPolicy& policy, const Path& path, const TypeCursor& cursor,
    int remaining) {
  if (remaining == 0) return std::nullopt;
  Permission perm = policy.get(path);
  for (const Segment& seg : cursor.slots()) {
    Path ext = path.child(seg);
    Permission child = policy.get(ext);
    if (perm == Permission::RW && child != Permission::RW)
      return ConsistencyViolation{path, ext, perm, child, 1};
    if (perm == Permission::R && child != Permission::R)
      return ConsistencyViolation{path, ext, perm, child, 2};
    if (perm == Permission::W && !seg.is_deref() && !perm_leq(Permission::W, child))
      return ConsistencyViolation{path, ext, perm, child, 3};
    if (auto v = check_consistency_node(policy, ext, cursor.child(seg), remaining - 1))
      return v;
  }
  return std::nullopt;
}

}  // namespace

std::optional<ConsistencyViolation> consistency_violation(const AccessPolicy& policy,
                                                          int max_segments) {
  const TypeEnv& env = policy.env();
  if (!env.vars) return std::nullopt;
  for (const auto& [name, info] : *env.vars) {
    TypeCursor cursor{env.info, info.type};
    if (auto v = check_consistency_node(policy, Path(name), cursor, max_segments))
      return v;
  }
  return std::nullopt;
}

}  // namespace muspark
