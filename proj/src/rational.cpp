#include "rsc/rational.hpp"

#include <cctype>
#include <charconv>
#include <limits>

namespace rsc {

namespace {

std::int64_t parse_int(std::string_view s) {
    std::int64_t v = 0;
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size() || s.empty())
        throw std::invalid_argument("not an integer: '" + std::string(s) + "'");
    return v;
}

std::int64_t pow10(int e) {
    std::int64_t r = 1;
    for (int i = 0; i < e; ++i) {
        if (r > std::numeric_limits<std::int64_t>::max() / 10)
            throw std::invalid_argument("decimal exponent too large");
        r *= 10;
    }
    return r;
}

Rational parse_decimal(std::string_view s) {
    int exp10 = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        exp10 = static_cast<int>(parse_int(s.substr(e + 1)));
        s = s.substr(0, e);
    }
    bool neg = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        neg = s.front() == '-';
        s.remove_prefix(1);
    }
    std::string digits;
    int frac = 0;
    bool dot = false;
    for (char c : s) {
        if (c == '.' && !dot) {
            dot = true;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            if (dot) ++frac;
        } else {
            throw std::invalid_argument("not a number: '" + std::string(s) + "'");
        }
    }
    if (digits.empty()) throw std::invalid_argument("not a number: '" + std::string(s) + "'");
    Rational r(parse_int(digits), pow10(frac));
    if (exp10 > 0) r *= pow10(exp10);
    if (exp10 < 0) r /= pow10(-exp10);
    return neg ? -r : r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_decimal(text.substr(0, slash));
        Rational den = parse_decimal(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator in '" + std::string(text) + "'");
        return num / den;
    }
    return parse_decimal(text);
}

std::string to_string(const Rational& r) {
    std::int64_t den = r.denominator();
    int twos = 0, fives = 0;
    while (den % 2 == 0) { den /= 2; ++twos; }
    while (den % 5 == 0) { den /= 5; ++fives; }
    if (den != 1) return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
    int places = std::max(twos, fives);
    if (places == 0) return std::to_string(r.numerator());
    Rational scaled = rabs(r) * pow10(places);
    std::string digits = std::to_string(scaled.numerator());
    if (static_cast<int>(digits.size()) <= places)
        digits.insert(0, static_cast<std::size_t>(places) + 1 - digits.size(), '0');
    digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
    return (r < 0 ? "-" : "") + digits;
}

std::int64_t floor_int(const Rational& r) {
    std::int64_t q = r.numerator() / r.denominator();
    if (r.numerator() % r.denominator() != 0 && r.numerator() < 0) --q;
    return q;
}

std::int64_t ceil_int(const Rational& r) { return -floor_int(-r); }

bool is_multiple_of(const Rational& r, const Rational& step) {
    Rational q = r / step;
    return q.denominator() == 1;
}

double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

}  // namespace rsc
