#pragma once

#include "rsc/config.hpp"
#include "rsc/verification/oracles.hpp"
#include "rsc/verification/scenarios.hpp"

#include <doctest.h>

#include <concepts>
#include <random>
#include <string>

namespace rsc::test {

inline Rational R(const char* s) { return parse_rational(s); }
template <std::integral I>
Rational R(I v) {
    return Rational(static_cast<std::int64_t>(v));
}

inline StateVec sv(std::initializer_list<Rational> v) { return StateVec(std::vector<Rational>(v)); }

inline Box box(std::initializer_list<Interval> dims) { return Box(std::vector<Interval>(dims)); }

inline BoxUnion bu(const Box& b) { return BoxUnion::of(b); }

// Random multiple of `step` in [lo, hi].
inline Rational grid(std::mt19937_64& rng, const Rational& lo, const Rational& hi, const Rational& step) {
    std::int64_t a = ceil_int(lo / step), b = floor_int(hi / step);
    return step * std::uniform_int_distribution<std::int64_t>(a, b)(rng);
}

inline std::int64_t pick(std::mt19937_64& rng, std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
}

// The two-vehicle example with bias and threshold replaced.
inline IntersectionConfig plant_with_detector(int t_max, const Rational& bias, const Rational& eta) {
    IntersectionConfig c = verification::two_vehicle_plant(t_max);
    c.detector.bias = {bias, bias};
    c.detector.threshold = {eta, eta};
    return c;
}

inline std::string source_path(const std::string& rel) { return std::string(RSC_SOURCE_DIR) + "/" + rel; }

}  // namespace rsc::test
