#pragma once

#include <string>
#include <string_view>

namespace maintminer {

/// Snowball English ("Porter2") stemmer, matching the rules of Snowball 3.x.
/// Input is a lowercase ASCII word.
std::string stem(std::string_view word);

}  // namespace maintminer
