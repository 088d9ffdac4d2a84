#include "maintminer/activity.hpp"

#include "maintminer/strings.hpp"

namespace maintminer {

std::string_view to_string(Activity a) {
  switch (a) {
    case Activity::Adaptive:
      return "adaptive";
    case Activity::Corrective:
      return "corrective";
    case Activity::Perfective:
      return "perfective";
  }
  return "unknown";
}

std::optional<Activity> parse_activity(std::string_view token) {
  const std::string t = to_lower(trim(token));
  if (t == "a" || t == "adaptive") return Activity::Adaptive;
  if (t == "c" || t == "corrective") return Activity::Corrective;
  if (t == "p" || t == "perfective") return Activity::Perfective;
  return std::nullopt;
}

}  // namespace maintminer
