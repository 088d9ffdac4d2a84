#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace maintminer {

/// Maintenance activity of a commit.
///
/// The enumerator order (adaptive, corrective, perfective) is the class order
/// of confusion matrices, probability vectors and learner label indices.
enum class Activity : int { Adaptive = 0, Corrective = 1, Perfective = 2 };

inline constexpr int kActivityCount = 3;

inline constexpr std::array<Activity, kActivityCount> kAllActivities{
    Activity::Adaptive, Activity::Corrective, Activity::Perfective};

constexpr int index_of(Activity a) { return static_cast<int>(a); }

constexpr Activity activity_at(int i) { return static_cast<Activity>(i); }

/// Lowercase full name: "adaptive", "corrective", "perfective".
std::string_view to_string(Activity a);

/// Accepts {a, adaptive}, {c, corrective}, {p, perfective}, case-insensitive.
std::optional<Activity> parse_activity(std::string_view token);

}  // namespace maintminer
