#include "values_miner/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "values_miner/error.hpp"

namespace values_miner {

namespace {

bool is_word_char(UChar32 c) {
    const auto mask = U_GET_GC_MASK(c);
    return (mask & (U_GC_L_MASK | U_GC_ND_MASK | U_GC_M_MASK)) != 0 || u_isdigit(c);
}

const icu::Normalizer2& nfkc() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* norm = icu::Normalizer2::getNFKCInstance(status);
    if (U_FAILURE(status) || norm == nullptr) throw Error("unicode", "NFKC normalizer unavailable");
    return *norm;
}

void append_utf8(std::string& out, UChar32 c) {
    char buf[U8_MAX_LENGTH];
    int32_t len = 0;
    UBool error = false;
    U8_APPEND(reinterpret_cast<uint8_t*>(buf), len, U8_MAX_LENGTH, c, error);
    if (!error) out.append(buf, static_cast<std::size_t>(len));
}

} // namespace

std::vector<std::string> tokenize_normalize(std::string_view text) {
    std::vector<std::string> tokens;
    if (text.empty()) return tokens;

    UErrorCode status = U_ZERO_ERROR;
    icu::UnicodeString source = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
    icu::UnicodeString normalized = nfkc().normalize(source, status);
    if (U_FAILURE(status)) throw Error("unicode", "normalization failed");
    normalized.toLower(icu::Locale::getRoot());

    // Collect code points first so joiners can look one step ahead.
    std::vector<UChar32> cps;
    cps.reserve(static_cast<std::size_t>(normalized.length()));
    for (int32_t i = 0; i < normalized.length();) {
        UChar32 c = normalized.char32At(i);
        if (c == 0x2019) c = '\'';
        if (c == 0x2010 || c == 0x2011) c = '-';
        cps.push_back(c);
        i += U16_LENGTH(c);
    }

    std::string current;
    for (std::size_t i = 0; i < cps.size(); ++i) {
        const UChar32 c = cps[i];
        if (is_word_char(c)) {
            append_utf8(current, c);
        } else if ((c == '-' || c == '\'') && !current.empty() && i + 1 < cps.size() &&
                   is_word_char(cps[i + 1])) {
            current.push_back(static_cast<char>(c));
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

namespace utf8 {

CodePoint decode(std::string_view text, std::size_t pos) noexcept {
    const auto* s = reinterpret_cast<const uint8_t*>(text.data());
    const auto length = static_cast<int32_t>(text.size());
    auto i = static_cast<int32_t>(pos);
    UChar32 c = 0;
    U8_NEXT(s, i, length, c);
    if (c < 0) c = 0xFFFD;
    return {static_cast<char32_t>(c), static_cast<std::size_t>(i) - pos};
}

bool is_space(char32_t c) noexcept { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

bool is_upper(char32_t c) noexcept {
    return u_isupper(static_cast<UChar32>(c)) || u_istitle(static_cast<UChar32>(c));
}

bool is_digit(char32_t c) noexcept { return u_isdigit(static_cast<UChar32>(c)); }

} // namespace utf8

} // namespace values_miner
