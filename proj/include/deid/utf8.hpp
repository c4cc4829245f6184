#pragma once

#include <string>
#include <string_view>

namespace deid {

// All character offsets in this toolkit count Unicode scalar values, not
// bytes. These helpers convert between UTF-8 byte strings and scalar-value
// sequences. Invalid byte sequences decode to U+FFFD.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);
std::string utf8_encode(char32_t c);

}  // namespace deid
