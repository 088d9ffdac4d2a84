#include <algorithm>
#include <cmath>
#include <tuple>
#include <unordered_map>

#include "diff.hpp"

namespace maintminer::distiller::detail {

using java::Node;
using java::NodeKind;

namespace {

std::vector<std::uint32_t> bigrams(std::string_view s) {
  std::vector<std::uint32_t> out;
  if (s.size() < 2) return out;
  out.reserve(s.size() - 1);
  for (std::size_t i = 0; i + 1 < s.size(); ++i)
    out.push_back((static_cast<std::uint32_t>(static_cast<unsigned char>(s[i])) << 8) |
                  static_cast<unsigned char>(s[i + 1]));
  std::sort(out.begin(), out.end());
  return out;
}

double dice(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b, std::string_view sa,
            std::string_view sb) {
  if (a.empty() || b.empty()) return sa == sb ? 1.0 : 0.0;
  std::size_t i = 0, j = 0, common = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) {
      ++common;
      ++i;
      ++j;
    } else if (a[i] < b[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return 2.0 * static_cast<double>(common) / static_cast<double>(a.size() + b.size());
}

bool is_leaf_kind(NodeKind k) {
  switch (k) {
    case NodeKind::Statement:
    case NodeKind::Return:
    case NodeKind::Throw:
    case NodeKind::Break:
    case NodeKind::Continue:
    case NodeKind::Assert:
    case NodeKind::Yield:
    case NodeKind::LocalType:
      return true;
    default:
      return false;
  }
}

bool is_branch(NodeKind k) { return k == NodeKind::Then || k == NodeKind::Else; }

bool is_condition(NodeKind k) {
  return k == NodeKind::If || k == NodeKind::While || k == NodeKind::Do || k == NodeKind::For ||
         k == NodeKind::ForEach;
}

struct Flat {
  NodeKind kind;
  const std::string* value;
  int parent;
  std::vector<int> children;
  std::vector<int> leaves;
  std::vector<std::uint32_t> grams;
  int leaf_order = -1;
};

struct FlatTree {
  std::vector<Flat> nodes;
  int leaf_count = 0;

  explicit FlatTree(const Node& root) { add(root, -1); }

  int add(const Node& n, int parent) {
    const int id = static_cast<int>(nodes.size());
    nodes.push_back({n.kind, &n.value, parent, {}, {}, bigrams(n.value)});
    if (is_leaf_kind(n.kind)) {
      nodes[id].leaf_order = leaf_count++;
      for (int p = parent; p >= 0; p = nodes[p].parent) nodes[p].leaves.push_back(id);
    }
    for (const auto& c : n.children) {
      const int child = add(c, id);
      nodes[id].children.push_back(child);
    }
    return id;
  }
};

struct Matching {
  const FlatTree& a;
  const FlatTree& b;
  std::vector<int> ab, ba;

  Matching(const FlatTree& x, const FlatTree& y)
      : a(x), b(y), ab(x.nodes.size(), -1), ba(y.nodes.size(), -1) {
    ab[0] = 0;
    ba[0] = 0;
    match_leaves();
    match_inner();
    match_branches();
  }

  void link(int i, int j) {
    ab[i] = j;
    ba[j] = i;
  }

  bool same_context(int i, int j) const {
    const int pi = a.nodes[i].parent, pj = b.nodes[j].parent;
    return a.nodes[pi].kind == b.nodes[pj].kind && *a.nodes[pi].value == *b.nodes[pj].value;
  }

  void match_leaves() {
    struct Cand {
      double sim;
      bool context;
      int distance;
      int i, j;
    };
    std::vector<Cand> cands;
    for (int i = 0; i < static_cast<int>(a.nodes.size()); ++i) {
      const auto& x = a.nodes[i];
      if (x.leaf_order < 0) continue;
      for (int j = 0; j < static_cast<int>(b.nodes.size()); ++j) {
        const auto& y = b.nodes[j];
        if (y.leaf_order < 0 || y.kind != x.kind) continue;
        const double s = dice(x.grams, y.grams, *x.value, *y.value);
        if (s >= kLeafThreshold) cands.push_back({s, same_context(i, j), std::abs(x.leaf_order - y.leaf_order), i, j});
      }
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& p, const Cand& q) {
      return std::tie(q.sim, q.context, p.distance, p.i, p.j) < std::tie(p.sim, p.context, q.distance, q.i, q.j);
    });
    for (const auto& c : cands)
      if (ab[c.i] < 0 && ba[c.j] < 0) link(c.i, c.j);
  }

  void match_inner() {
    struct Cand {
      double score, value_sim;
      int i, j;
    };
    std::vector<Cand> cands;
    std::vector<char> in_j(b.nodes.size(), 0);
    for (int j = 1; j < static_cast<int>(b.nodes.size()); ++j) {
      const auto& y = b.nodes[j];
      if (y.leaf_order >= 0 || is_branch(y.kind)) continue;
      for (int l : y.leaves) in_j[l] = 1;
      for (int i = 1; i < static_cast<int>(a.nodes.size()); ++i) {
        const auto& x = a.nodes[i];
        if (x.kind != y.kind) continue;
        int common = 0;
        for (int l : x.leaves)
          if (ab[l] >= 0 && in_j[ab[l]]) ++common;
        const double vs = dice(x.grams, y.grams, *x.value, *y.value);
        const std::size_t most = std::max(x.leaves.size(), y.leaves.size());
        const double ns = most ? static_cast<double>(common) / static_cast<double>(most) : vs;
        const bool small_side = x.leaves.empty() || y.leaves.empty();
        if (ns >= kInnerThreshold || (vs >= 0.8 && (common > 0 || small_side))) cands.push_back({ns, vs, i, j});
      }
      for (int l : y.leaves) in_j[l] = 0;
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& p, const Cand& q) {
      return std::tie(q.score, q.value_sim, p.i, p.j) < std::tie(p.score, p.value_sim, q.i, q.j);
    });
    for (const auto& c : cands)
      if (ab[c.i] < 0 && ba[c.j] < 0) link(c.i, c.j);
  }

  void match_branches() {
    for (int i = 0; i < static_cast<int>(a.nodes.size()); ++i) {
      const auto& x = a.nodes[i];
      if (x.kind != NodeKind::If || ab[i] < 0) continue;
      const auto& y = b.nodes[ab[i]];
      for (int ci : x.children)
        for (int cj : y.children)
          if (a.nodes[ci].kind == b.nodes[cj].kind && ba[cj] < 0 && ab[ci] < 0) link(ci, cj);
    }
  }

  int common_leaves() const {
    int n = 0;
    for (const auto& x : a.nodes)
      if (x.leaf_order >= 0 && ab[&x - a.nodes.data()] >= 0) ++n;
    return n;
  }
};

}  // namespace

double bigram_similarity(std::string_view a, std::string_view b) { return dice(bigrams(a), bigrams(b), a, b); }

std::vector<char> increasing_core(const std::vector<int>& seq) {
  const std::size_t n = seq.size();
  std::vector<int> len(n, 1), prev(n, -1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t k = 0; k < i; ++k)
      if (seq[k] < seq[i] && len[k] + 1 > len[i]) {
        len[i] = len[k] + 1;
        prev[i] = static_cast<int>(k);
      }
  std::vector<char> keep(n, 0);
  if (n == 0) return keep;
  int best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (len[i] > len[best]) best = static_cast<int>(i);
  for (int i = best; i >= 0; i = prev[i]) keep[i] = 1;
  return keep;
}

double body_similarity(const Node& before, const Node& after) {
  const FlatTree a(before), b(after);
  const int most = std::max(a.leaf_count, b.leaf_count);
  if (most == 0) return 1.0;
  const Matching m(a, b);
  return static_cast<double>(m.common_leaves()) / most;
}

void diff_bodies(const Node& before, const Node& after, ChangeList& out) {
  const FlatTree a(before), b(after);
  const Matching m(a, b);
  for (int i = 1; i < static_cast<int>(a.nodes.size()); ++i) {
    const auto& x = a.nodes[i];
    if (m.ab[i] >= 0 || x.kind == NodeKind::Then) continue;
    out.push_back(x.kind == NodeKind::Else ? ChangeType::ALTERNATIVE_PART_DELETE : ChangeType::STATEMENT_DELETE);
  }
  for (int j = 1; j < static_cast<int>(b.nodes.size()); ++j) {
    const auto& y = b.nodes[j];
    if (m.ba[j] >= 0 || y.kind == NodeKind::Then) continue;
    out.push_back(y.kind == NodeKind::Else ? ChangeType::ALTERNATIVE_PART_INSERT : ChangeType::STATEMENT_INSERT);
  }
  for (int j = 1; j < static_cast<int>(b.nodes.size()); ++j) {
    const int i = m.ba[j];
    const auto& y = b.nodes[j];
    if (i < 0 || is_branch(y.kind)) continue;
    const auto& x = a.nodes[i];
    if (*x.value != *y.value)
      out.push_back(is_condition(y.kind) ? ChangeType::CONDITION_EXPRESSION_CHANGE : ChangeType::STATEMENT_UPDATE);
    if (m.ab[x.parent] != y.parent) out.push_back(ChangeType::STATEMENT_PARENT_CHANGE);
  }
  // Siblings that kept their parent but not their relative order.
  for (int j = 0; j < static_cast<int>(b.nodes.size()); ++j) {
    const int i = m.ba[j];
    if (i < 0) continue;
    std::unordered_map<int, int> position;
    const auto& yc = b.nodes[j].children;
    for (std::size_t k = 0; k < yc.size(); ++k) position[yc[k]] = static_cast<int>(k);
    std::vector<int> seq;
    for (int c : a.nodes[i].children) {
      if (is_branch(a.nodes[c].kind)) continue;
      const int partner = m.ab[c];
      if (partner < 0) continue;
      auto it = position.find(partner);
      if (it != position.end()) seq.push_back(it->second);
    }
    const auto keep = increasing_core(seq);
    for (char k : keep)
      if (!k) out.push_back(ChangeType::STATEMENT_ORDERING_CHANGE);
  }
}

void diff_comments(const std::vector<std::string>& before, const std::vector<std::string>& after,
                   ChangeList& out) {
  std::vector<int> ab(before.size(), -1), ba(after.size(), -1);
  for (std::size_t i = 0; i < before.size(); ++i)
    for (std::size_t j = 0; j < after.size(); ++j)
      if (ba[j] < 0 && before[i] == after[j]) {
        ab[i] = static_cast<int>(j);
        ba[j] = static_cast<int>(i);
        break;
      }
  struct Cand {
    double sim;
    int i, j;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < before.size(); ++i) {
    if (ab[i] >= 0) continue;
    for (std::size_t j = 0; j < after.size(); ++j) {
      if (ba[j] >= 0) continue;
      const double s = bigram_similarity(before[i], after[j]);
      if (s >= kLeafThreshold) cands.push_back({s, static_cast<int>(i), static_cast<int>(j)});
    }
  }
  std::sort(cands.begin(), cands.end(),
            [](const Cand& p, const Cand& q) { return std::tie(q.sim, p.i, p.j) < std::tie(p.sim, q.i, q.j); });
  for (const auto& c : cands)
    if (ab[c.i] < 0 && ba[c.j] < 0) {
      ab[c.i] = c.j;
      ba[c.j] = c.i;
      out.push_back(ChangeType::COMMENT_UPDATE);
    }
  for (int x : ab)
    if (x < 0) out.push_back(ChangeType::COMMENT_DELETE);
  for (int y : ba)
    if (y < 0) out.push_back(ChangeType::COMMENT_INSERT);
  std::vector<int> seq;
  for (int x : ab)
    if (x >= 0) seq.push_back(x);
  for (char k : increasing_core(seq))
    if (!k) out.push_back(ChangeType::COMMENT_MOVE);
}

}  // namespace maintminer::distiller::detail
