#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace maintminer {

// Fine-grained source change taxonomy. Enumerators are declared in canonical
// (alphabetical) order; the declaration order is the feature-vector layout
// and must match data/change_types.txt.
enum class ChangeType : std::uint8_t {
  ADDING_ATTRIBUTE_MODIFIABILITY,
  ADDING_CLASS_DERIVABILITY,
  ADDING_METHOD_OVERRIDABILITY,
  ADDITIONAL_CLASS,
  ADDITIONAL_FUNCTIONALITY,
  ADDITIONAL_OBJECT_STATE,
  ALTERNATIVE_PART_DELETE,
  ALTERNATIVE_PART_INSERT,
  ATTRIBUTE_RENAMING,
  ATTRIBUTE_TYPE_CHANGE,
  CLASS_RENAMING,
  COMMENT_DELETE,
  COMMENT_INSERT,
  COMMENT_MOVE,
  COMMENT_UPDATE,
  CONDITION_EXPRESSION_CHANGE,
  DECREASING_ACCESSIBILITY_CHANGE,
  DOC_DELETE,
  DOC_INSERT,
  DOC_UPDATE,
  INCREASING_ACCESSIBILITY_CHANGE,
  METHOD_RENAMING,
  PARAMETER_DELETE,
  PARAMETER_INSERT,
  PARAMETER_ORDERING_CHANGE,
  PARAMETER_RENAMING,
  PARAMETER_TYPE_CHANGE,
  PARENT_CLASS_CHANGE,
  PARENT_CLASS_DELETE,
  PARENT_CLASS_INSERT,
  PARENT_INTERFACE_CHANGE,
  PARENT_INTERFACE_DELETE,
  PARENT_INTERFACE_INSERT,
  REMOVED_CLASS,
  REMOVED_FUNCTIONALITY,
  REMOVED_OBJECT_STATE,
  REMOVING_ATTRIBUTE_MODIFIABILITY,
  REMOVING_CLASS_DERIVABILITY,
  REMOVING_METHOD_OVERRIDABILITY,
  RETURN_TYPE_CHANGE,
  RETURN_TYPE_DELETE,
  RETURN_TYPE_INSERT,
  STATEMENT_DELETE,
  STATEMENT_INSERT,
  STATEMENT_ORDERING_CHANGE,
  STATEMENT_PARENT_CHANGE,
  STATEMENT_UPDATE,
  UNKNOWN,
};

inline constexpr std::size_t kChangeTypeCount = 48;

constexpr std::size_t index_of(ChangeType t) { return static_cast<std::size_t>(t); }

constexpr ChangeType change_type_at(std::size_t i) { return static_cast<ChangeType>(i); }

/// Exact uppercase serialized name.
std::string_view to_string(ChangeType t);

/// Parses a serialized name. Case-insensitive; also accepts the read-side
/// aliases STATEMENT_UPDATED and UNCLASSIFIED_CHANGE.
std::optional<ChangeType> parse_change_type(std::string_view name);

const std::array<ChangeType, kChangeTypeCount>& all_change_types();

/// Newline-terminated canonical name list, identical to data/change_types.txt.
std::string change_type_manifest();

/// FNV-1a 64 of the manifest text; embedded in `--version`.
std::uint64_t change_type_manifest_hash();

}  // namespace maintminer

namespace maintminer {

/// Occurrence count per change type, indexed by index_of(ChangeType).
using ChangeCounts = std::array<std::int64_t, kChangeTypeCount>;

}  // namespace maintminer
