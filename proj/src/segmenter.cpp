#include "values_miner/segmenter.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "values_miner/error.hpp"
#include "values_miner/text.hpp"

namespace values_miner {

namespace {

bool is_terminator(char c) { return c == '.' || c == '?' || c == '!'; }

bool is_closing_quote(char32_t c) {
    return c == '"' || c == '\'' || c == 0x201D || c == 0x2019 || c == 0x00BB;
}

bool ascii_iequal_suffix(std::string_view text, std::string_view suffix) {
    if (suffix.size() > text.size()) return false;
    const auto tail = text.substr(text.size() - suffix.size());
    return std::equal(tail.begin(), tail.end(), suffix.begin(), [](char a, char b) {
        return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
    });
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n\f\v");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n\f\v");
    return s.substr(first, last - first + 1);
}

} // namespace

const std::vector<std::string>& Segmenter::default_abbreviations() {
    static const std::vector<std::string> list = {
        "et al.", "e.g.", "i.e.", "etc.", "vs.", "Fig.", "Figs.", "Eq.", "Eqs.", "cf.", "Dr.",
        "No.", "Sec.", "Tab.", "approx.", "resp.", "Prof.", "Mr.", "Ms.", "St.", "viz.",
    };
    return list;
}

Segmenter::Segmenter() : abbreviations_(default_abbreviations()) {}

Segmenter::Segmenter(std::vector<std::string> abbreviations) : abbreviations_(std::move(abbreviations)) {
    for (const auto& a : abbreviations_) {
        if (a.empty() || a.back() != '.') {
            throw Error("config", "abbreviation must end with '.': \"" + a + "\"");
        }
    }
}

Segmenter Segmenter::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("io", "cannot read abbreviation list " + path.string());
    std::vector<std::string> list;
    std::string line;
    while (std::getline(in, line)) {
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto entry = trim(line);
        if (!entry.empty()) list.emplace_back(entry);
    }
    return Segmenter(std::move(list));
}

bool Segmenter::ends_with_abbreviation(std::string_view prefix) const {
    for (const auto& abbr : abbreviations_) {
        if (!ascii_iequal_suffix(prefix, abbr)) continue;
        // The abbreviation has to start at a word boundary.
        const std::size_t before = prefix.size() - abbr.size();
        if (before == 0) return true;
        const char c = prefix[before - 1];
        if (std::isspace(static_cast<unsigned char>(c)) || c == '(' || c == '[' || c == '"') return true;
    }
    return false;
}

std::vector<SentenceSpan> Segmenter::segment(std::string_view text) const {
    std::vector<SentenceSpan> spans;
    const std::size_t n = text.size();

    auto skip_space = [&](std::size_t pos) {
        while (pos < n) {
            const auto cp = utf8::decode(text, pos);
            if (!utf8::is_space(cp.value)) break;
            pos += cp.length;
        }
        return pos;
    };

    auto emit = [&](std::size_t start, std::size_t end) {
        // Trim trailing whitespace (multi-byte aware).
        std::size_t last_non_space = start;
        for (std::size_t p = start; p < end;) {
            const auto cp = utf8::decode(text, p);
            p += cp.length;
            if (!utf8::is_space(cp.value)) last_non_space = p;
        }
        if (last_non_space > start) {
            spans.push_back({start, last_non_space, std::string(text.substr(start, last_non_space - start))});
        }
    };

    std::size_t start = skip_space(0);
    int depth = 0;
    std::size_t i = start;
    while (i < n) {
        const char c = text[i];
        if (c == '(' || c == '[') {
            ++depth;
        } else if (c == ')' || c == ']') {
            depth = std::max(0, depth - 1);
        } else if (is_terminator(c)) {
            std::size_t j = i;
            while (j < n && is_terminator(text[j])) ++j;
            std::size_t k = j;
            while (k < n) {
                const auto cp = utf8::decode(text, k);
                if (!is_closing_quote(cp.value)) break;
                k += cp.length;
            }
            if (depth == 0 && k < n && utf8::is_space(utf8::decode(text, k).value)) {
                const std::size_t next = skip_space(k);
                if (next < n) {
                    const auto cp = utf8::decode(text, next);
                    const bool opens_sentence = utf8::is_upper(cp.value) || utf8::is_digit(cp.value);
                    const bool abbreviation =
                        c == '.' && j == i + 1 && ends_with_abbreviation(text.substr(start, j - start));
                    if (opens_sentence && !abbreviation) {
                        emit(start, k);
                        start = next;
                        i = next;
                        depth = 0;
                        continue;
                    }
                }
            }
            i = j;
            continue;
        }
        ++i;
    }
    if (start < n) emit(start, n);
    return spans;
}

} // namespace values_miner
