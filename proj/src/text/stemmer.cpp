#include "maintminer/stemmer.hpp"

#include <array>
#include <string_view>
#include <utility>

namespace maintminer {

namespace {

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

bool in(char c, std::string_view set) { return set.find(c) != std::string_view::npos; }

class Stemmer {
 public:
  explicit Stemmer(std::string_view word) : w_(word) {}

  std::string run() {
    if (exception()) return w_;
    if (w_.size() < 3) return w_;
    prelude();
    mark_regions();
    step_1a();
    step_1b();
    step_1c();
    step_2();
    step_3();
    step_4();
    step_5();
    for (auto& c : w_)
      if (c == 'Y') c = 'y';
    return w_;
  }

 private:
  std::string w_;
  std::size_t p1_ = 0;
  std::size_t p2_ = 0;

  bool ends_with(std::string_view s) const {
    return w_.size() >= s.size() && std::string_view(w_).substr(w_.size() - s.size()) == s;
  }

  // Longest suffix of the word found in `list`, or empty view.
  template <std::size_t N>
  std::string_view longest_suffix(const std::array<std::string_view, N>& list) const {
    std::string_view best;
    bool found = false;
    for (auto s : list) {
      if (ends_with(s) && (!found || s.size() > best.size())) {
        best = s;
        found = true;
      }
    }
    return found ? best : std::string_view{};
  }

  void replace_suffix(std::size_t len, std::string_view with) {
    w_.resize(w_.size() - len);
    w_.append(with);
  }

  bool in_r1(std::size_t suffix_len) const { return w_.size() - suffix_len >= p1_; }
  bool in_r2(std::size_t suffix_len) const { return w_.size() - suffix_len >= p2_; }

  bool exception() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 15> kWords{{
        {"andes", "andes"},
        {"atlas", "atlas"},
        {"bias", "bias"},
        {"cosmos", "cosmos"},
        {"early", "earli"},
        {"gently", "gentl"},
        {"howe", "howe"},
        {"idly", "idl"},
        {"news", "news"},
        {"only", "onli"},
        {"singly", "singl"},
        {"skies", "sky"},
        {"skis", "ski"},
        {"sky", "sky"},
        {"ugly", "ugli"},
    }};
    for (const auto& [from, to] : kWords) {
      if (w_ == from) {
        w_ = std::string(to);
        return true;
      }
    }
    return false;
  }

  void prelude() {
    if (!w_.empty() && w_[0] == '\'') w_.erase(0, 1);
    if (!w_.empty() && w_[0] == 'y') w_[0] = 'Y';
    for (std::size_t i = 1; i < w_.size(); ++i)
      if (w_[i] == 'y' && is_vowel(w_[i - 1])) w_[i] = 'Y';
  }

  // Position just after the first non-vowel that follows a vowel, from `from`.
  std::size_t region_start(std::size_t from) const {
    std::size_t i = from;
    while (i < w_.size() && !is_vowel(w_[i])) ++i;
    if (i >= w_.size()) return w_.size();
    ++i;
    while (i < w_.size() && is_vowel(w_[i])) ++i;
    if (i >= w_.size()) return w_.size();
    return i + 1;
  }

  void mark_regions() {
    static constexpr std::array<std::string_view, 9> kPrefixes{
        "arsen", "commun", "emerg", "gener", "inter", "later", "organ", "past", "univers"};
    p1_ = w_.size();
    bool prefixed = false;
    for (auto p : kPrefixes) {
      if (w_.compare(0, p.size(), p) == 0) {
        p1_ = p.size();
        prefixed = true;
        break;
      }
    }
    if (!prefixed) p1_ = region_start(0);
    p2_ = p1_ >= w_.size() ? w_.size() : region_start(p1_);
  }

  // Ends in a short syllable, looking at the word up to `end`.
  bool short_syllable(std::size_t end) const {
    const std::string_view s(w_.data(), end);
    const std::size_t n = s.size();
    if (n >= 3 && !in(s[n - 1], "aeiouywxY") && is_vowel(s[n - 2]) && !is_vowel(s[n - 3])) return true;
    if (n == 2 && !is_vowel(s[1]) && is_vowel(s[0])) return true;
    return s.size() >= 4 && s.substr(n - 4) == "past";
  }

  bool has_vowel(std::size_t end) const {
    for (std::size_t i = 0; i < end; ++i)
      if (is_vowel(w_[i])) return true;
    return false;
  }

  void step_1a() {
    static constexpr std::array<std::string_view, 3> kApostrophe{"'", "'s'", "'s"};
    if (auto s = longest_suffix(kApostrophe); !s.empty()) w_.resize(w_.size() - s.size());

    static constexpr std::array<std::string_view, 6> kSuffixes{"ied", "s", "ies", "sses", "ss", "us"};
    const auto s = longest_suffix(kSuffixes);
    if (s == "sses") {
      replace_suffix(4, "ss");
    } else if (s == "ied" || s == "ies") {
      replace_suffix(3, w_.size() - 3 >= 2 ? "i" : "ie");
    } else if (s == "s") {
      const std::size_t stem_len = w_.size() - 1;
      if (stem_len >= 1 && has_vowel(stem_len - 1)) w_.pop_back();
    }
  }

  void step_1b() {
    static constexpr std::array<std::string_view, 6> kSuffixes{"ed", "eed", "ing", "edly", "eedly", "ingly"};
    const auto s = longest_suffix(kSuffixes);
    if (s.empty()) return;
    const std::size_t base = w_.size() - s.size();

    if (s == "eed" || s == "eedly") {
      if (base >= p1_) {
        const std::string_view stem(w_.data(), base);
        if (stem != "succ" && stem != "proc" && stem != "exc") replace_suffix(s.size(), "ee");
      }
      return;
    }
    if (s == "ing") {
      const std::string_view stem(w_.data(), base);
      if (stem.size() == 2 && stem[1] == 'y' && !is_vowel(stem[0])) {
        w_ = std::string(1, stem[0]) + "ie";
        return;
      }
      if (stem == "even" || stem == "cann" || stem == "inn" || stem == "earr" || stem == "herr" || stem == "out")
        return;
    }

    if (!has_vowel(base)) return;
    w_.resize(base);
    if (ends_with("at") || ends_with("bl") || ends_with("iz")) {
      w_.push_back('e');
      return;
    }
    static constexpr std::array<std::string_view, 9> kDoubles{"bb", "dd", "ff", "gg", "mm", "nn", "pp", "rr", "tt"};
    if (!longest_suffix(kDoubles).empty()) {
      if (w_.size() == 3 && in(w_[0], "aeo")) return;
      w_.pop_back();
      return;
    }
    if (w_.size() == p1_ && short_syllable(w_.size())) w_.push_back('e');
  }

  void step_1c() {
    const std::size_t n = w_.size();
    if (n < 3) return;
    if (w_[n - 1] != 'y' && w_[n - 1] != 'Y') return;
    if (is_vowel(w_[n - 2])) return;
    w_[n - 1] = 'i';
  }

  void step_2() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 25> kRules{{
        {"anci", "ance"},    {"enci", "ence"},  {"ogi", "og"},       {"li", ""},          {"bli", "ble"},
        {"abli", "able"},    {"alli", "al"},    {"fulli", "ful"},    {"lessli", "less"},  {"ousli", "ous"},
        {"entli", "ent"},    {"aliti", "al"},   {"biliti", "ble"},   {"iviti", "ive"},    {"tional", "tion"},
        {"ational", "ate"},  {"alism", "al"},   {"ation", "ate"},    {"ization", "ize"},  {"izer", "ize"},
        {"ator", "ate"},     {"iveness", "ive"}, {"fulness", "ful"}, {"ousness", "ous"},  {"ogist", "og"},
    }};
    const auto* rule = longest_rule(kRules);
    if (!rule || !in_r1(rule->first.size())) return;
    const auto suffix = rule->first;
    if (suffix == "ogi") {
      if (w_.size() < 4 || w_[w_.size() - 4] != 'l') return;
    } else if (suffix == "li") {
      if (w_.size() < 3 || !in(w_[w_.size() - 3], "cdeghkmnrt")) return;
    }
    replace_suffix(suffix.size(), rule->second);
  }

  void step_3() {
    static constexpr std::array<std::pair<std::string_view, std::string_view>, 9> kRules{{
        {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"}, {"ical", "ic"},
        {"tional", "tion"}, {"ational", "ate"}, {"ful", ""}, {"ness", ""},
    }};
    const auto* rule = longest_rule(kRules);
    if (!rule || !in_r1(rule->first.size())) return;
    if (rule->first == "ative" && !in_r2(rule->first.size())) return;
    replace_suffix(rule->first.size(), rule->second);
  }

  void step_4() {
    static constexpr std::array<std::string_view, 18> kSuffixes{
        "ic", "ance", "ence", "able", "ible", "ate", "ive", "ize", "iti",
        "al", "ism", "ion", "er", "ous", "ant", "ent", "ment", "ement"};
    const auto s = longest_suffix(kSuffixes);
    if (s.empty() || !in_r2(s.size())) return;
    if (s == "ion") {
      const std::size_t base = w_.size() - 3;
      if (base == 0 || (w_[base - 1] != 's' && w_[base - 1] != 't')) return;
    }
    w_.resize(w_.size() - s.size());
  }

  void step_5() {
    if (ends_with("e")) {
      if (in_r2(1) || (in_r1(1) && !short_syllable(w_.size() - 1))) w_.pop_back();
    } else if (ends_with("l")) {
      if (in_r2(1) && w_.size() >= 2 && w_[w_.size() - 2] == 'l') w_.pop_back();
    }
  }

  template <std::size_t N>
  const std::pair<std::string_view, std::string_view>* longest_rule(
      const std::array<std::pair<std::string_view, std::string_view>, N>& rules) const {
    const std::pair<std::string_view, std::string_view>* best = nullptr;
    for (const auto& r : rules)
      if (ends_with(r.first) && (!best || r.first.size() > best->first.size())) best = &r;
    return best;
  }
};

}  // namespace

std::string stem(std::string_view word) { return Stemmer(word).run(); }

}  // namespace maintminer
