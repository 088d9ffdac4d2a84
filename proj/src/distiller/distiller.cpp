#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include "diff.hpp"
#include "maintminer/log.hpp"

namespace maintminer::distiller {

using namespace java;
using detail::bigram_similarity;

namespace {

int access_rank(const Modifiers& m) {
  if (m.keywords.count("public")) return 3;
  if (m.keywords.count("protected")) return 2;
  if (m.keywords.count("private")) return 0;
  return 1;
}

// Modifier keywords with no dedicated change type.
std::set<std::string> other_keywords(const Modifiers& m) {
  std::set<std::string> s;
  for (const auto& k : m.keywords)
    if (k != "public" && k != "protected" && k != "private" && k != "final") s.insert(k);
  return s;
}

void diff_access(const Modifiers& a, const Modifiers& b, ChangeList& out) {
  const int ra = access_rank(a), rb = access_rank(b);
  if (rb > ra) out.push_back(ChangeType::INCREASING_ACCESSIBILITY_CHANGE);
  if (rb < ra) out.push_back(ChangeType::DECREASING_ACCESSIBILITY_CHANGE);
}

// Remaining modifier and annotation edits count as one UNKNOWN each.
void diff_unclassified(const Modifiers& a, const Modifiers& b, ChangeList& out) {
  if (other_keywords(a) != other_keywords(b)) out.push_back(ChangeType::UNKNOWN);
  if (a.annotations != b.annotations) out.push_back(ChangeType::UNKNOWN);
}

void diff_doc(const std::optional<std::string>& a, const std::optional<std::string>& b, ChangeList& out) {
  if (!a && b) out.push_back(ChangeType::DOC_INSERT);
  if (a && !b) out.push_back(ChangeType::DOC_DELETE);
  if (a && b && *a != *b) out.push_back(ChangeType::DOC_UPDATE);
}

bool final_of(const Modifiers& m) { return m.keywords.count("final") > 0; }

std::string base_name(const std::string& type) { return type.substr(0, type.find('<')); }

void diff_field(const Field& a, const Field& b, ChangeList& out) {
  if (a.type != b.type) out.push_back(ChangeType::ATTRIBUTE_TYPE_CHANGE);
  if (!final_of(a.modifiers) && final_of(b.modifiers)) out.push_back(ChangeType::REMOVING_ATTRIBUTE_MODIFIABILITY);
  if (final_of(a.modifiers) && !final_of(b.modifiers)) out.push_back(ChangeType::ADDING_ATTRIBUTE_MODIFIABILITY);
  diff_access(a.modifiers, b.modifiers, out);
  diff_unclassified(a.modifiers, b.modifiers, out);
  if (a.initializer.empty() && !b.initializer.empty()) out.push_back(ChangeType::STATEMENT_INSERT);
  if (!a.initializer.empty() && b.initializer.empty()) out.push_back(ChangeType::STATEMENT_DELETE);
  if (!a.initializer.empty() && !b.initializer.empty() && a.initializer != b.initializer)
    out.push_back(ChangeType::STATEMENT_UPDATE);
  diff_doc(a.javadoc, b.javadoc, out);
}

void diff_parameters(const std::vector<Param>& a, const std::vector<Param>& b, ChangeList& out) {
  auto key = [](const Param& p) { return std::make_pair(p.type, p.name); };
  {
    std::vector<std::pair<std::string, std::string>> ka, kb;
    for (const auto& p : a) ka.push_back(key(p));
    for (const auto& p : b) kb.push_back(key(p));
    if (ka == kb) return;
    auto sa = ka, sb = kb;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    if (sa == sb) {
      out.push_back(ChangeType::PARAMETER_ORDERING_CHANGE);
      return;
    }
  }
  std::vector<int> ab(a.size(), -1), ba(b.size(), -1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (ba[j] < 0 && a[i].name == b[j].name) {
        ab[i] = static_cast<int>(j);
        ba[j] = static_cast<int>(i);
        if (a[i].type != b[j].type) out.push_back(ChangeType::PARAMETER_TYPE_CHANGE);
        break;
      }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ab[i] >= 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j)
      if (ba[j] < 0 && a[i].type == b[j].type) {
        ab[i] = static_cast<int>(j);
        ba[j] = static_cast<int>(i);
        out.push_back(ChangeType::PARAMETER_RENAMING);
        break;
      }
  }
  std::vector<int> seq;
  for (int j : ab)
    if (j >= 0) seq.push_back(j);
  const auto keep = detail::increasing_core(seq);
  if (std::count(keep.begin(), keep.end(), 0) > 0) out.push_back(ChangeType::PARAMETER_ORDERING_CHANGE);
  for (int j : ab)
    if (j < 0) out.push_back(ChangeType::PARAMETER_DELETE);
  for (int i : ba)
    if (i < 0) out.push_back(ChangeType::PARAMETER_INSERT);
}

void diff_method(const Method& a, const Method& b, ChangeList& out) {
  diff_parameters(a.params, b.params, out);
  if (a.kind == MethodKind::Method) {
    const bool va = a.return_type == "void", vb = b.return_type == "void";
    if (va && !vb) out.push_back(ChangeType::RETURN_TYPE_INSERT);
    if (!va && vb) out.push_back(ChangeType::RETURN_TYPE_DELETE);
    if (!va && !vb && a.return_type != b.return_type) out.push_back(ChangeType::RETURN_TYPE_CHANGE);
  }
  if (!final_of(a.modifiers) && final_of(b.modifiers)) out.push_back(ChangeType::REMOVING_METHOD_OVERRIDABILITY);
  if (final_of(a.modifiers) && !final_of(b.modifiers)) out.push_back(ChangeType::ADDING_METHOD_OVERRIDABILITY);
  diff_access(a.modifiers, b.modifiers, out);
  diff_unclassified(a.modifiers, b.modifiers, out);
  if (a.throws != b.throws) out.push_back(ChangeType::UNKNOWN);
  if (a.type_params != b.type_params) out.push_back(ChangeType::UNKNOWN);
  diff_doc(a.javadoc, b.javadoc, out);
  if (a.body && b.body)
    detail::diff_bodies(*a.body, *b.body, out);
  else if (a.body.has_value() != b.body.has_value())
    out.push_back(ChangeType::UNKNOWN);
  detail::diff_comments(a.comments, b.comments, out);
}

std::string parameter_types(const Method& m) {
  std::string s;
  for (const auto& p : m.params) s += p.type + ",";
  return s;
}

double method_body_similarity(const Method& a, const Method& b) {
  if (a.body && b.body) return detail::body_similarity(*a.body, *b.body);
  return !a.body && !b.body ? 1.0 : 0.0;
}

void diff_type(const TypeDecl& a, const TypeDecl& b, ChangeList& out);

void diff_types(const std::vector<TypeDecl>& a, const std::vector<TypeDecl>& b, ChangeList& out);

void diff_members(const TypeDecl& a, const TypeDecl& b, ChangeList& out) {
  // Fields by name, then renamings among the leftovers.
  std::vector<int> fab(a.fields.size(), -1), fba(b.fields.size(), -1);
  for (std::size_t i = 0; i < a.fields.size(); ++i)
    for (std::size_t j = 0; j < b.fields.size(); ++j)
      if (fba[j] < 0 && a.fields[i].name == b.fields[j].name) {
        fab[i] = static_cast<int>(j);
        fba[j] = static_cast<int>(i);
        diff_field(a.fields[i], b.fields[j], out);
        break;
      }
  for (std::size_t i = 0; i < a.fields.size(); ++i) {
    if (fab[i] >= 0) continue;
    const auto& x = a.fields[i];
    for (std::size_t j = 0; j < b.fields.size(); ++j) {
      const auto& y = b.fields[j];
      if (fba[j] < 0 && x.type == y.type && x.initializer == y.initializer && x.enum_constant == y.enum_constant) {
        fab[i] = static_cast<int>(j);
        fba[j] = static_cast<int>(i);
        out.push_back(ChangeType::ATTRIBUTE_RENAMING);
        diff_field(x, Field{x.name, y.type, y.modifiers, y.javadoc, y.initializer, y.enum_constant}, out);
        break;
      }
    }
  }
  for (int j : fab)
    if (j < 0) out.push_back(ChangeType::REMOVED_OBJECT_STATE);
  for (int i : fba)
    if (i < 0) out.push_back(ChangeType::ADDITIONAL_OBJECT_STATE);

  const auto& ma = a.methods;
  const auto& mb = b.methods;
  std::vector<int> ab(ma.size(), -1), ba(mb.size(), -1);
  auto link = [&](std::size_t i, std::size_t j) {
    ab[i] = static_cast<int>(j);
    ba[j] = static_cast<int>(i);
  };
  // Initializers pair up by position within their kind.
  for (auto kind : {MethodKind::Initializer, MethodKind::StaticInitializer}) {
    std::vector<std::size_t> xs, ys;
    for (std::size_t i = 0; i < ma.size(); ++i)
      if (ma[i].kind == kind) xs.push_back(i);
    for (std::size_t j = 0; j < mb.size(); ++j)
      if (mb[j].kind == kind) ys.push_back(j);
    for (std::size_t k = 0; k < std::min(xs.size(), ys.size()); ++k) link(xs[k], ys[k]);
  }
  auto initializer = [](const Method& m) {
    return m.kind == MethodKind::Initializer || m.kind == MethodKind::StaticInitializer;
  };
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if (ab[i] >= 0 || initializer(ma[i])) continue;
    for (std::size_t j = 0; j < mb.size(); ++j)
      if (ba[j] < 0 && mb[j].kind == ma[i].kind && mb[j].signature() == ma[i].signature()) {
        link(i, j);
        break;
      }
  }
  // Same name, different parameter lists: the closest overload wins.
  struct Cand {
    double score;
    std::size_t i, j;
  };
  std::vector<Cand> cands;
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if (ab[i] >= 0 || initializer(ma[i])) continue;
    for (std::size_t j = 0; j < mb.size(); ++j) {
      if (ba[j] >= 0 || mb[j].kind != ma[i].kind || mb[j].name != ma[i].name) continue;
      std::multiset<std::string> pa, pb;
      for (const auto& p : ma[i].params) pa.insert(p.type + " " + p.name);
      for (const auto& p : mb[j].params) pb.insert(p.type + " " + p.name);
      std::vector<std::string> common;
      std::set_intersection(pa.begin(), pa.end(), pb.begin(), pb.end(), std::back_inserter(common));
      const double most = static_cast<double>(std::max<std::size_t>({pa.size(), pb.size(), 1}));
      cands.push_back({static_cast<double>(common.size()) / most, i, j});
    }
  }
  std::sort(cands.begin(), cands.end(),
            [](const Cand& p, const Cand& q) { return std::tie(q.score, p.i, p.j) < std::tie(p.score, q.i, q.j); });
  for (const auto& c : cands)
    if (ab[c.i] < 0 && ba[c.j] < 0) link(c.i, c.j);
  for (std::size_t i = 0; i < ma.size(); ++i)
    if (ab[i] >= 0) diff_method(ma[i], mb[ab[i]], out);
  // Renamed methods keep their parameter types and most of their body.
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if (ab[i] >= 0 || ma[i].kind != MethodKind::Method) continue;
    for (std::size_t j = 0; j < mb.size(); ++j) {
      if (ba[j] >= 0 || mb[j].kind != MethodKind::Method) continue;
      if (parameter_types(ma[i]) != parameter_types(mb[j])) continue;
      if (method_body_similarity(ma[i], mb[j]) < detail::kInnerThreshold) continue;
      link(i, j);
      out.push_back(ChangeType::METHOD_RENAMING);
      Method renamed = mb[j];
      renamed.name = ma[i].name;
      diff_method(ma[i], renamed, out);
      break;
    }
  }
  for (int j : ab)
    if (j < 0) out.push_back(ChangeType::REMOVED_FUNCTIONALITY);
  for (int i : ba)
    if (i < 0) out.push_back(ChangeType::ADDITIONAL_FUNCTIONALITY);

  diff_types(a.types, b.types, out);
  detail::diff_comments(a.comments, b.comments, out);
}

void diff_type(const TypeDecl& a, const TypeDecl& b, ChangeList& out) {
  if (!final_of(a.modifiers) && final_of(b.modifiers)) out.push_back(ChangeType::REMOVING_CLASS_DERIVABILITY);
  if (final_of(a.modifiers) && !final_of(b.modifiers)) out.push_back(ChangeType::ADDING_CLASS_DERIVABILITY);
  diff_access(a.modifiers, b.modifiers, out);
  diff_unclassified(a.modifiers, b.modifiers, out);
  if (a.kind != b.kind || a.type_params != b.type_params) out.push_back(ChangeType::UNKNOWN);
  if (a.superclass.empty() && !b.superclass.empty()) out.push_back(ChangeType::PARENT_CLASS_INSERT);
  if (!a.superclass.empty() && b.superclass.empty()) out.push_back(ChangeType::PARENT_CLASS_DELETE);
  if (!a.superclass.empty() && !b.superclass.empty() && a.superclass != b.superclass)
    out.push_back(ChangeType::PARENT_CLASS_CHANGE);
  {
    std::vector<std::string> removed, added;
    for (const auto& x : a.interfaces)
      if (std::find(b.interfaces.begin(), b.interfaces.end(), x) == b.interfaces.end()) removed.push_back(x);
    for (const auto& y : b.interfaces)
      if (std::find(a.interfaces.begin(), a.interfaces.end(), y) == a.interfaces.end()) added.push_back(y);
    for (auto it = removed.begin(); it != removed.end();) {
      auto same = std::find_if(added.begin(), added.end(),
                               [&](const std::string& y) { return base_name(y) == base_name(*it); });
      if (same == added.end()) {
        ++it;
        continue;
      }
      out.push_back(ChangeType::PARENT_INTERFACE_CHANGE);
      added.erase(same);
      it = removed.erase(it);
    }
    for (std::size_t k = 0; k < removed.size(); ++k) out.push_back(ChangeType::PARENT_INTERFACE_DELETE);
    for (std::size_t k = 0; k < added.size(); ++k) out.push_back(ChangeType::PARENT_INTERFACE_INSERT);
  }
  diff_doc(a.javadoc, b.javadoc, out);
  diff_members(a, b, out);
}

std::set<std::string> member_keys(const TypeDecl& t) {
  std::set<std::string> s;
  for (const auto& f : t.fields) s.insert("f:" + f.name);
  for (const auto& m : t.methods)
    if (m.kind == MethodKind::Method) s.insert("m:" + m.signature());
  for (const auto& n : t.types) s.insert("t:" + n.name);
  return s;
}

double member_similarity(const TypeDecl& a, const TypeDecl& b) {
  const auto ka = member_keys(a), kb = member_keys(b);
  if (ka.empty() && kb.empty()) return 0.0;
  std::vector<std::string> common;
  std::set_intersection(ka.begin(), ka.end(), kb.begin(), kb.end(), std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(ka.size() + kb.size() - common.size());
}

void diff_types(const std::vector<TypeDecl>& a, const std::vector<TypeDecl>& b, ChangeList& out) {
  std::vector<int> ab(a.size(), -1), ba(b.size(), -1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (ba[j] < 0 && a[i].name == b[j].name) {
        ab[i] = static_cast<int>(j);
        ba[j] = static_cast<int>(i);
        diff_type(a[i], b[j], out);
        break;
      }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (ab[i] >= 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (ba[j] >= 0 || a[i].kind != b[j].kind) continue;
      if (member_similarity(a[i], b[j]) < detail::kInnerThreshold) continue;
      ab[i] = static_cast<int>(j);
      ba[j] = static_cast<int>(i);
      out.push_back(ChangeType::CLASS_RENAMING);
      diff_type(a[i], b[j], out);
      break;
    }
  }
  for (int j : ab)
    if (j < 0) out.push_back(ChangeType::REMOVED_CLASS);
  for (int i : ba)
    if (i < 0) out.push_back(ChangeType::ADDITIONAL_CLASS);
}

}  // namespace

ChangeList distill(const std::optional<std::string>& before, const std::optional<std::string>& after,
                   const std::string& path) {
  if (!before && !after) throw ArgError("distill: both sides are absent" + (path.empty() ? "" : " for " + path));
  std::optional<CompilationUnit> a, b;
  std::string failure;
  auto load = [&](const std::optional<std::string>& text, std::optional<CompilationUnit>& cu) {
    if (!text) {
      cu.emplace();
      return;
    }
    try {
      cu = parse(*text);
    } catch (const ParseError& e) {
      failure = e.what();
    }
  };
  load(before, a);
  load(after, b);
  if (!a && !b) throw DistillError(path, "neither revision parses: " + failure);
  if (!a || !b) {
    log::warn("distill: " + (path.empty() ? std::string("file") : path) + ": one revision does not parse (" +
              failure + ")");
    return {ChangeType::UNKNOWN};
  }
  ChangeList out;
  diff_types(a->types, b->types, out);
  if (before && after) detail::diff_comments(a->comments, b->comments, out);
  return out;
}

ChangeCounts tally(const ChangeList& changes) {
  ChangeCounts c{};
  for (auto t : changes) ++c[index_of(t)];
  return c;
}

}  // namespace maintminer::distiller
