#include "maintminer/change_type.hpp"

#include "maintminer/strings.hpp"

namespace maintminer {

namespace {

constexpr std::array<std::string_view, kChangeTypeCount> kNames{
    "ADDING_ATTRIBUTE_MODIFIABILITY",
    "ADDING_CLASS_DERIVABILITY",
    "ADDING_METHOD_OVERRIDABILITY",
    "ADDITIONAL_CLASS",
    "ADDITIONAL_FUNCTIONALITY",
    "ADDITIONAL_OBJECT_STATE",
    "ALTERNATIVE_PART_DELETE",
    "ALTERNATIVE_PART_INSERT",
    "ATTRIBUTE_RENAMING",
    "ATTRIBUTE_TYPE_CHANGE",
    "CLASS_RENAMING",
    "COMMENT_DELETE",
    "COMMENT_INSERT",
    "COMMENT_MOVE",
    "COMMENT_UPDATE",
    "CONDITION_EXPRESSION_CHANGE",
    "DECREASING_ACCESSIBILITY_CHANGE",
    "DOC_DELETE",
    "DOC_INSERT",
    "DOC_UPDATE",
    "INCREASING_ACCESSIBILITY_CHANGE",
    "METHOD_RENAMING",
    "PARAMETER_DELETE",
    "PARAMETER_INSERT",
    "PARAMETER_ORDERING_CHANGE",
    "PARAMETER_RENAMING",
    "PARAMETER_TYPE_CHANGE",
    "PARENT_CLASS_CHANGE",
    "PARENT_CLASS_DELETE",
    "PARENT_CLASS_INSERT",
    "PARENT_INTERFACE_CHANGE",
    "PARENT_INTERFACE_DELETE",
    "PARENT_INTERFACE_INSERT",
    "REMOVED_CLASS",
    "REMOVED_FUNCTIONALITY",
    "REMOVED_OBJECT_STATE",
    "REMOVING_ATTRIBUTE_MODIFIABILITY",
    "REMOVING_CLASS_DERIVABILITY",
    "REMOVING_METHOD_OVERRIDABILITY",
    "RETURN_TYPE_CHANGE",
    "RETURN_TYPE_DELETE",
    "RETURN_TYPE_INSERT",
    "STATEMENT_DELETE",
    "STATEMENT_INSERT",
    "STATEMENT_ORDERING_CHANGE",
    "STATEMENT_PARENT_CHANGE",
    "STATEMENT_UPDATE",
    "UNKNOWN",
};

constexpr std::array<ChangeType, kChangeTypeCount> make_all() {
  std::array<ChangeType, kChangeTypeCount> out{};
  for (std::size_t i = 0; i < kChangeTypeCount; ++i) out[i] = change_type_at(i);
  return out;
}

constexpr std::array<ChangeType, kChangeTypeCount> kAll = make_all();

}  // namespace

std::string_view to_string(ChangeType t) { return kNames[index_of(t)]; }

std::optional<ChangeType> parse_change_type(std::string_view name) {
  const std::string upper = to_upper(trim(name));
  if (upper == "STATEMENT_UPDATED") return ChangeType::STATEMENT_UPDATE;
  if (upper == "UNCLASSIFIED_CHANGE") return ChangeType::UNKNOWN;
  for (std::size_t i = 0; i < kChangeTypeCount; ++i) {
    if (kNames[i] == upper) return change_type_at(i);
  }
  return std::nullopt;
}

const std::array<ChangeType, kChangeTypeCount>& all_change_types() { return kAll; }

std::string change_type_manifest() {
  std::string out;
  for (auto n : kNames) {
    out.append(n);
    out.push_back('\n');
  }
  return out;
}

std::uint64_t change_type_manifest_hash() { return fnv1a64(change_type_manifest()); }

}  // namespace maintminer
