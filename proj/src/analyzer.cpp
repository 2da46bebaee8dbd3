#include "lexrag/analyzer.hpp"

#include <cstdint>

namespace lexrag {
namespace {

struct DecodedChar {
    uint32_t codepoint = 0;
    int length = 1; // bytes consumed
    bool valid = false;
};

DecodedChar decode_utf8(std::string_view text, std::size_t pos) {
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
    const unsigned char b0 = byte(pos);
    DecodedChar out;
    if (b0 < 0x80) {
        out = {b0, 1, true};
        return out;
    }
    auto cont = [&](std::size_t i) {
        return i < text.size() && (byte(i) & 0xC0) == 0x80;
    };
    if ((b0 & 0xE0) == 0xC0 && cont(pos + 1)) {
        uint32_t cp = (uint32_t(b0 & 0x1F) << 6) | (byte(pos + 1) & 0x3F);
        if (cp >= 0x80)
            out = {cp, 2, true};
        return out;
    }
    if ((b0 & 0xF0) == 0xE0 && cont(pos + 1) && cont(pos + 2)) {
        uint32_t cp = (uint32_t(b0 & 0x0F) << 12) | (uint32_t(byte(pos + 1) & 0x3F) << 6) |
                      (byte(pos + 2) & 0x3F);
        if (cp >= 0x800 && !(cp >= 0xD800 && cp <= 0xDFFF))
            out = {cp, 3, true};
        return out;
    }
    if ((b0 & 0xF8) == 0xF0 && cont(pos + 1) && cont(pos + 2) && cont(pos + 3)) {
        uint32_t cp = (uint32_t(b0 & 0x07) << 18) | (uint32_t(byte(pos + 1) & 0x3F) << 12) |
                      (uint32_t(byte(pos + 2) & 0x3F) << 6) | (byte(pos + 3) & 0x3F);
        if (cp >= 0x10000 && cp <= 0x10FFFF)
            out = {cp, 4, true};
        return out;
    }
    return out; // invalid lead or truncated sequence: one byte, invalid
}

bool is_latin1_letter(uint32_t cp) {
    if (cp == 0xAA || cp == 0xB5 || cp == 0xBA)
        return true;
    if (cp >= 0xC0 && cp <= 0xFF)
        return cp != 0xD7 && cp != 0xF7;
    return false;
}

bool is_word_codepoint(uint32_t cp) {
    if (cp < 0x80)
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    if (cp < 0x100)
        return is_latin1_letter(cp);
    // General punctuation and CJK symbol/punctuation blocks split tokens.
    if (cp >= 0x2000 && cp <= 0x206F)
        return false;
    if (cp >= 0x3000 && cp <= 0x303F)
        return false;
    return true;
}

uint32_t lower_codepoint(uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z')
        return cp + 0x20;
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7)
        return cp + 0x20;
    return cp;
}

void append_utf8(std::string& out, uint32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

template <typename OnToken>
void tokenize(std::string_view text, OnToken&& on_token) {
    std::string current;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const DecodedChar dc = decode_utf8(text, pos);
        if (dc.valid && is_word_codepoint(dc.codepoint)) {
            append_utf8(current, lower_codepoint(dc.codepoint));
        } else if (!current.empty()) {
            on_token(std::move(current));
            current.clear();
        }
        pos += dc.length;
    }
    if (!current.empty())
        on_token(std::move(current));
}

} // namespace

std::vector<std::string> analyze(std::string_view text) {
    std::vector<std::string> tokens;
    tokenize(text, [&](std::string tok) { tokens.push_back(std::move(tok)); });
    return tokens;
}

std::size_t token_count(std::string_view text) {
    std::size_t n = 0;
    tokenize(text, [&](std::string) { ++n; });
    return n;
}

} // namespace lexrag
