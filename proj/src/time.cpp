#include "scl/time.hpp"

#include <cctype>
#include <cstdlib>

namespace scl {

std::string render_time(const Time& t) {
    if (t.denominator() == 1) return std::to_string(t.numerator());
    return std::to_string(t.numerator()) + "/" + std::to_string(t.denominator());
}

namespace {

bool parse_integer(std::string_view text, long long& out) {
    if (text.empty()) return false;
    std::size_t i = 0;
    bool neg = false;
    if (text[0] == '-' || text[0] == '+') {
        neg = text[0] == '-';
        i = 1;
    }
    if (i == text.size()) return false;
    long long value = 0;
    for (; i < text.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(text[i]))) return false;
        value = value * 10 + (text[i] - '0');
    }
    out = neg ? -value : value;
    return true;
}

}  // namespace

std::optional<Time> parse_time(std::string_view text) {
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        long long num = 0, den = 0;
        if (!parse_integer(text.substr(0, slash), num)) return std::nullopt;
        if (!parse_integer(text.substr(slash + 1), den)) return std::nullopt;
        if (den == 0) return std::nullopt;
        return Time(num, den);
    }
    if (auto dot = text.find('.'); dot != std::string_view::npos) {
        long long whole = 0;
        if (!parse_integer(text.substr(0, dot), whole)) return std::nullopt;
        std::string_view frac = text.substr(dot + 1);
        if (frac.empty() || frac.size() > 12) return std::nullopt;
        long long num = 0, den = 1;
        for (char c : frac) {
            if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
            num = num * 10 + (c - '0');
            den *= 10;
        }
        bool neg = !text.empty() && text[0] == '-';
        Time value(std::llabs(whole), 1);
        value += Time(num, den);
        if (neg) value = -value;
        return value;
    }
    long long whole = 0;
    if (!parse_integer(text, whole)) return std::nullopt;
    return Time(whole, 1);
}

}  // namespace scl
