#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "maintminer/distiller.hpp"
#include "maintminer/java.hpp"

namespace maintminer::distiller::detail {

inline constexpr double kLeafThreshold = 0.6;
inline constexpr double kInnerThreshold = 0.6;

/// Dice coefficient over character bigrams. Two empty strings score 1.
double bigram_similarity(std::string_view a, std::string_view b);

/// Positions of `seq` that lie on its longest increasing subsequence.
std::vector<char> increasing_core(const std::vector<int>& seq);

/// Statement-level edits between two method bodies.
void diff_bodies(const java::Node& before, const java::Node& after, ChangeList& out);

/// Fraction of leaf statements the two bodies share after matching.
double body_similarity(const java::Node& before, const java::Node& after);

/// COMMENT_INSERT/DELETE/UPDATE/MOVE between two comment sequences.
void diff_comments(const std::vector<std::string>& before, const std::vector<std::string>& after,
                   ChangeList& out);

}  // namespace maintminer::distiller::detail
