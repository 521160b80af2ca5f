#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace tweetalpha {

/// Decodes UTF-8; malformed bytes become U+FFFD (never throws).
std::vector<char32_t> utf8_decode(std::string_view text);

std::string utf8_encode(const std::vector<char32_t>& codepoints);

/// Codepoint count (the "character count" used for length thresholds).
int utf8_length(std::string_view text);

}  // namespace tweetalpha
