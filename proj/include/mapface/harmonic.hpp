#pragma once

#include "errors.hpp"
#include "rational.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <utility>
#include <vector>

namespace mapface {

// H_n = 1 + 1/2 + ... + 1/n exactly (H_0 = 0).
inline Rational harmonic(std::uint64_t n) {
  Rational h = 0;
  for (std::uint64_t j = 1; j <= n; ++j) h += Rational(BigInt(1), BigInt(j));
  return h;
}

// DeTemple window: ln(n + 1/2) + gamma + [1/(24(n+1)^2), 1/(24 n^2)].
// At n = 0 the lower end still holds and the upper end is +infinity.
template <class Real = double>
std::pair<Real, Real> harmonic_window(std::uint64_t n) {
  using std::log;
  const Real gamma = boost::math::constants::euler<Real>();
  const Real nn = Real(n);
  const Real base = log(nn + Real(0.5)) + gamma;
  const Real lo = base + Real(1) / (Real(24) * (nn + 1) * (nn + 1));
  const Real hi = n == 0 ? std::numeric_limits<Real>::infinity() : base + Real(1) / (Real(24) * nn * nn);
  return {lo, hi};
}

inline constexpr std::uint64_t kHarmonicTableSize = 10000;

namespace detail {

// H_0..H_N summed in 50-digit arithmetic, then rounded once to double. The
// rounding error is below half an ulp of the exact rational value.
inline const std::vector<double>& harmonic_table() {
  static const std::vector<double> table = [] {
    using Big = boost::multiprecision::cpp_bin_float_50;
    std::vector<double> t(kHarmonicTableSize + 1);
    Big s = 0;
    t[0] = 0;
    for (std::uint64_t j = 1; j <= kHarmonicTableSize; ++j) {
      s += Big(1) / Big(j);
      t[j] = s.convert_to<double>();
    }
    return t;
  }();
  return table;
}

}  // namespace detail

// Nearest-double H_n for n in the table; beyond it the window midpoint.
inline double harmonic_value(std::uint64_t n) {
  if (n <= kHarmonicTableSize) return detail::harmonic_table()[n];
  const auto [lo, hi] = harmonic_window<long double>(n);
  return static_cast<double>((lo + hi) / 2);
}

// A number >= H_n. Tabulated values are within half an ulp; beyond the table
// the upper end of the window is used.
inline double harmonic_upper(std::uint64_t n) {
  if (n <= kHarmonicTableSize) return std::nextafter(detail::harmonic_table()[n], std::numeric_limits<double>::infinity());
  return static_cast<double>(harmonic_window<long double>(n).second);
}

// A number <= H_n.
inline double harmonic_lower(std::uint64_t n) {
  if (n == 0) return 0.0;
  if (n <= kHarmonicTableSize) return std::nextafter(detail::harmonic_table()[n], -std::numeric_limits<double>::infinity());
  return static_cast<double>(harmonic_window<long double>(n).first);
}

}  // namespace mapface
