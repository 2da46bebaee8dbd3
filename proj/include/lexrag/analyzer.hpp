#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lexrag {

/// Splits raw text into normalized tokens.
///
/// Rules: tokens are maximal runs of word characters; everything else is a
/// delimiter. ASCII letters are lowercased, as are Latin-1 supplement letters.
/// Codepoints >= U+0100 pass through unchanged and count as word characters
/// unless they fall in a general-punctuation block. Invalid UTF-8 bytes act
/// as delimiters. No stemming, no stopword removal. A token's position is its
/// 0-based index in the returned list.
std::vector<std::string> analyze(std::string_view text);

/// Token count of analyze(text) without materializing the tokens.
std::size_t token_count(std::string_view text);

} // namespace lexrag
