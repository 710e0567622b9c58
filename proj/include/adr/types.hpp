#ifndef ADR_TYPES_HPP
#define ADR_TYPES_HPP

#include <cstdint>
#include <string>

namespace adr {

/// Patient age in days since birth. All temporal arithmetic is integer-day
/// arithmetic; recorded ages are never negative.
using AgeDay = std::int32_t;

/// Clinical event code: exactly 5 characters, '.'-padded on the right.
/// A level-n code has non-'.' characters at positions 1..n and '.' at the
/// rest, e.g. "A1..." is level 2 with parent "A....".
using CodeId = std::string;

/// Drug code: exactly 9 decimal digits.
using DrugId = std::string;

constexpr int kCodeLength = 5;

bool is_valid_code(const std::string& text);
bool is_valid_drug(const std::string& text);

/// Level (1..5) of a valid code; 0 for malformed text.
int code_level(const std::string& text);

/// Code truncated one level, '.'-padded ("A1..." -> "A...."). Level-1 codes
/// have no parent and return an empty string.
std::string code_parent(const std::string& text);

/// First n characters of a code, the equivalence key for level-n grouping.
std::string code_prefix(const std::string& text, int n);

/// Closed integer-day interval [lo, hi], or the distinguished empty interval.
/// Lower bounds are clamped at age 0 when constructed from offsets.
struct AgeInterval {
    AgeDay lo = 0;
    AgeDay hi = 0;
    bool is_empty = true;

    static AgeInterval empty() { return AgeInterval{}; }

    static AgeInterval closed(std::int64_t lo, std::int64_t hi) {
        AgeInterval iv;
        if (hi < 0 || lo > hi) return iv;
        iv.lo = static_cast<AgeDay>(lo < 0 ? 0 : lo);
        iv.hi = static_cast<AgeDay>(hi);
        iv.is_empty = false;
        return iv;
    }

    bool contains(AgeDay t) const { return !is_empty && t >= lo && t <= hi; }

    bool operator==(const AgeInterval& o) const {
        if (is_empty || o.is_empty) return is_empty == o.is_empty;
        return lo == o.lo && hi == o.hi;
    }
};

}  // namespace adr

#endif
