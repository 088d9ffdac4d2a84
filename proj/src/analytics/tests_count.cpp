#include <functional>

#include "maintminer/analytics.hpp"
#include "maintminer/java.hpp"
#include "maintminer/log.hpp"

namespace maintminer::analytics {

namespace {

bool is_test_annotation(const std::string& a) {
  std::string name = a.substr(a.empty() || a[0] != '@' ? 0 : 1);
  name = name.substr(0, name.find('('));
  const auto dot = name.rfind('.');
  if (dot != std::string::npos) name = name.substr(dot + 1);
  return name == "Test";
}

bool test_named_class(const std::string& n) {
  return (n.size() >= 4 && n.compare(n.size() - 4, 4, "Test") == 0) || n.rfind("Test", 0) == 0;
}

bool under_test_dir(std::string path) {
  for (auto& ch : path)
    if (ch == '\\') ch = '/';
  return path.rfind("src/test/", 0) == 0 || path.find("/src/test/") != std::string::npos;
}

}  // namespace

TestCounts count_tests(const std::vector<std::pair<std::string, std::string>>& snapshot) {
  TestCounts out;
  for (const auto& [path, source] : snapshot) {
    java::CompilationUnit cu;
    try {
      cu = java::parse(source);
    } catch (const java::ParseError& e) {
      log::warn("count_tests: skipping " + path + ": " + e.what());
      continue;
    }
    const bool test_dir = under_test_dir(path);
    std::function<void(const java::TypeDecl&)> visit = [&](const java::TypeDecl& t) {
      const bool by_name = test_dir || test_named_class(t.name);
      std::int64_t methods = 0;
      for (const auto& m : t.methods) {
        if (m.kind != java::MethodKind::Method) continue;
        const bool annotated =
            std::any_of(m.modifiers.annotations.begin(), m.modifiers.annotations.end(), is_test_annotation);
        if (annotated || (by_name && m.name.rfind("test", 0) == 0)) ++methods;
      }
      out.test_methods += methods;
      if (methods > 0) ++out.test_classes;
      for (const auto& inner : t.types) visit(inner);
    };
    for (const auto& t : cu.types) visit(t);
  }
  return out;
}

}  // namespace maintminer::analytics
