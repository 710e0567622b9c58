#include "adr/types.hpp"

#include <algorithm>
#include <cctype>

namespace adr {

bool is_valid_code(const std::string& text) {
    return code_level(text) > 0;
}

int code_level(const std::string& text) {
    if (text.size() != kCodeLength) return 0;
    int level = 0;
    while (level < kCodeLength && text[level] != '.') ++level;
    if (level == 0) return 0;
    // everything after the first '.' must also be '.'
    for (int i = level; i < kCodeLength; ++i) {
        if (text[i] != '.') return 0;
    }
    return level;
}

std::string code_parent(const std::string& text) {
    const int level = code_level(text);
    if (level <= 1) return {};
    std::string parent = text.substr(0, level - 1);
    parent.resize(kCodeLength, '.');
    return parent;
}

std::string code_prefix(const std::string& text, int n) {
    return text.substr(0, static_cast<std::size_t>(n));
}

bool is_valid_drug(const std::string& text) {
    return text.size() == 9 &&
           std::all_of(text.begin(), text.end(),
                       [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace adr
