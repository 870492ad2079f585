#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

// C++20 rewritten candidates make boost's mixed rational/int equality recurse forever.
namespace boost {
inline bool operator==(const rational<std::int64_t>& a, std::int64_t b) { return a.denominator() == 1 && a.numerator() == b; }
inline bool operator==(const rational<std::int64_t>& a, int b) { return a == static_cast<std::int64_t>(b); }
}  // namespace boost

namespace rsc {

using Rational = boost::rational<std::int64_t>;

// Raised when a caller breaks an operation's precondition.
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Accepts "7", "-2.25", "19/2" and "1e-3" style text; throws std::invalid_argument.
Rational parse_rational(std::string_view text);

// Exact decimal when the denominator allows it, otherwise "p/q".
std::string to_string(const Rational& r);

std::int64_t floor_int(const Rational& r);
std::int64_t ceil_int(const Rational& r);

inline Rational rmin(const Rational& a, const Rational& b) { return b < a ? b : a; }
inline Rational rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }
inline Rational rabs(const Rational& a) { return a < 0 ? -a : a; }

// True when r is an integer multiple of step (step > 0).
bool is_multiple_of(const Rational& r, const Rational& step);

double to_double(const Rational& r);

}  // namespace rsc
