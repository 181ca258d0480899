#pragma once

#include <boost/rational.hpp>

#include <optional>
#include <string>
#include <string_view>

namespace scl {

// Occurrence times and situation start times are exact rationals so that
// comparisons are decidable and renderings are bit-exact.
using Time = boost::rational<long long>;

// Canonical rendering: integral values as "n", others as "p/q" in lowest
// terms (boost keeps rationals normalized).
std::string render_time(const Time& t);

// Accepts "7", "-7", "3/2", "-3/2" and decimals like "2.5" (converted
// exactly). Returns nullopt on malformed input.
std::optional<Time> parse_time(std::string_view text);

}  // namespace scl
