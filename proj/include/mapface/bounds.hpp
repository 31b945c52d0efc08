#pragma once

#include "errors.hpp"
#include "harmonic.hpp"
#include "parallel.hpp"
#include "rational.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace mapface {

// Upper-bound evaluations are multiplied by this factor at the end, so that
// accumulated rounding can only loosen the bound.
inline constexpr double kUpperGuard = 1.0 + 1e-12;

inline double guard_up(double x) { return x >= 0 ? x * kUpperGuard : x / kUpperGuard; }

// Reference lines: (n + ln n, n ln n).
inline std::pair<double, double> stahl_bounds(double n) {
  if (!(n >= 1.0)) throw Refusal("stahl_bounds needs n >= 1");
  return {n + std::log(n), n * std::log(n)};
}

namespace detail {

inline void check_q_domain(long long xi, long long t, long long n) {
  if (t < 1 || t >= n || xi < 0 || xi + t > n - 1)
    throw Refusal("q(xi=" + std::to_string(xi) + ", t=" + std::to_string(t) + ", n=" + std::to_string(n) +
                  ") is outside 1 <= t < n, 0 <= xi, xi + t <= n - 1");
}

}  // namespace detail

// q(xi, t) exactly: H_{n-xi-2} - H_{n-xi-t-2}, or H_{n-xi-2} + 1 when xi + t = n - 1.
inline Rational q_exact(long long xi, long long t, long long n) {
  detail::check_q_domain(xi, t, n);
  const auto a = static_cast<std::uint64_t>(n - xi - 2);
  if (xi + t == n - 1) return harmonic(a) + 1;
  return harmonic(a) - harmonic(static_cast<std::uint64_t>(n - xi - t - 2));
}

// Floating q, rounded upward.
inline double q(long long xi, long long t, long long n) {
  detail::check_q_domain(xi, t, n);
  const auto a = static_cast<std::uint64_t>(n - xi - 2);
  if (xi + t == n - 1) return guard_up(harmonic_upper(a) + 1.0);
  return guard_up(harmonic_upper(a) - harmonic_lower(static_cast<std::uint64_t>(n - xi - t - 2)));
}

// 1 + H_{n-2} + (n/(n-2)) H_{n-3} (H_{n-2} - 1) - ((n-3)/(n-2)) H_{n-3}
inline Rational logsq_exact(long long n) {
  if (n < 4) throw Refusal("logsq bound needs n >= 4");
  const Rational h2 = harmonic(static_cast<std::uint64_t>(n - 2));
  const Rational h3 = harmonic(static_cast<std::uint64_t>(n - 3));
  const Rational nn(n), n2(n - 2), n3(n - 3);
  return 1 + h2 + nn / n2 * h3 * (h2 - 1) - n3 / n2 * h3;
}

// The same expression in floating point, regrouped so every term is
// monotone in the harmonic numbers, and rounded upward.
inline double logsq_upper(long long n) {
  if (n < 4) throw Refusal("logsq bound needs n >= 4");
  const double h2 = harmonic_upper(static_cast<std::uint64_t>(n - 2));
  const double h3 = harmonic_upper(static_cast<std::uint64_t>(n - 3));
  const double nn = static_cast<double>(n);
  // n(H_{n-2} - 1) - (n-3) >= 0 for n >= 4, so the product is increasing in H_{n-3}.
  const double inner = nn * (h2 - 1.0) - (nn - 3.0);
  return guard_up(1.0 + h2 + h3 / (nn - 2.0) * inner);
}

// The one-parameter envelope of q used for the second-moment sum.
inline double q_hat(double t, double n, double nu) {
  const double a = nu * n - 1.5;
  if (t <= nu * n - 2.0) return std::log1p(t / (a - t));
  return std::log(2.0 * t + 1.0);
}

inline double f_of(double t, double n, double nu) { return q_hat(t, n, nu) / (t * t); }

// E[PF_k] <= (n-k)/k.
inline double e_pf_upper(long long n, long long k) {
  if (k < 1 || k > n - 2) throw Refusal("need 1 <= k <= n-2");
  return static_cast<double>(n - k) / static_cast<double>(k);
}

// E[PF_k^2] <= ((n-k)(n+2-3/k) + 2 E[T_{n-k}]) / k^2, with beta_smaller >= E[T_{n-k}].
inline double ek2_upper(long long n, long long k, double beta_smaller) {
  if (n < 3 || k < 1 || k > n - 2) throw Refusal("ek2_upper needs n >= 3 and 1 <= k <= n-2");
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  return guard_up(((nn - kk) * (nn + 2.0 - 3.0 / kk) + 2.0 * beta_smaller) / (kk * kk));
}

// max over integer i in [ceil((n-k)/k), n-k] of f(i), by direct search.
inline double mk_direct(long long n, long long k, double nu) {
  const long long lo = (n - k + k - 1) / k;
  double best = 0;
  for (long long i = std::max(1LL, lo); i <= n - k; ++i) best = std::max(best, f_of(static_cast<double>(i), static_cast<double>(n), nu));
  return best;
}

// max(f(ceil((n-k)/k)), f(nu n - 2)), the convexity bound on M_k.
inline double mk_sharp(long long n, long long k, double nu) {
  const long long lo = std::max(1LL, (n - k + k - 1) / k);
  const double nn = static_cast<double>(n);
  return guard_up(std::max(f_of(static_cast<double>(lo), nn, nu), f_of(nu * nn - 2.0, nn, nu)));
}

// Closed-form M_k bound in three regimes of k, plus f(1) once k >= ceil(n/2).
inline double mk_upper(long long n, long long k, double nu) {
  if (n < 22 || k < 2 || !(nu >= 6.0 / 11.0) || !(nu < 1.0))
    throw Refusal("mk_upper needs n >= 22, k >= 2 and 6/11 <= nu < 1");
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  if (k >= (n + 1) / 2) return guard_up(f_of(1.0, nn, nu));
  const double small_form = std::log(2 * nu * nn) / (nu * nu * nn * nn) * (1.0 + 4.0 / (nu * nn - 4.0));
  const double large_form = kk / (nn * (nn - kk)) / (nu - 1.0 / kk - 1.0 / (2.0 * nn));
  const double small_edge = std::log(2 * nu * nn - 3.0) / (88.0 * nu * nu);
  const double large_edge = std::log(2 * nu * nn) / nu * (1.0 + 4.0 / (nu * nn - 4.0));
  if (kk <= small_edge) return guard_up(small_form);
  if (kk >= large_edge) return guard_up(large_form);
  return guard_up(small_form + large_form);
}

struct OkTailOptions {
  bool optimize = true;
  int grid_points = 1000;
  double grid_span = 1e-4;  // the grid covers [span * X, X), X = n nubar k
};

namespace detail {

inline double hoeffding_markov(double x, double X, double c, double beta) {
  const double gap = X - x;
  return std::exp(-c * gap * gap) + beta / x;
}

}  // namespace detail

// Bound on Pr[O_k >= nubar n].
//  - not optimized: Markov beta/(nubar n) for k < (2/nubar) ln^mu n, otherwise
//    e^{-n nubar^2 / 2} + beta/(n ln^mu n);
//  - optimized: min of the Markov bound and h(x) = exp(-2(n nubar k - x)^2 /
//    ((n-k)k^2)) + beta/x over a geometric grid in (0, n nubar k) plus the
//    point x = n ln^mu n. Every admissible x gives a valid bound.
inline double ok_tail(long long n, long long k, double nu, double mu, double beta_smaller, const OkTailOptions& opt = {}) {
  if (n < 4 || k < 2 || k >= n) throw Refusal("ok_tail needs n >= 4 and 2 <= k < n");
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  const double nubar = 1.0 - nu;
  const double lnn = std::log(nn);
  const double markov = beta_smaller / (nubar * nn);
  double best;
  if (!opt.optimize) {
    if (kk < 2.0 / nubar * std::pow(lnn, mu)) {
      best = markov;
    } else {
      best = std::exp(-nn * nubar * nubar / 2.0) + beta_smaller / (nn * std::pow(lnn, mu));
    }
    return std::min(1.0, guard_up(best));
  }
  best = markov;
  const double X = nn * nubar * kk;
  const double c = 2.0 / ((nn - kk) * kk * kk);
  const double canonical = nn * std::pow(lnn, mu);
  if (canonical > 0 && canonical < X) best = std::min(best, detail::hoeffding_markov(canonical, X, c, beta_smaller));
  if (beta_smaller <= 0) {
    // No Markov term: h decreases toward x -> 0; the smallest grid point is best.
    best = std::min(best, std::exp(-c * X * X * (1 - opt.grid_span) * (1 - opt.grid_span)));
    return std::min(1.0, guard_up(best));
  }
  // Branch and bound over grid indices: on [x_a, x_b] the exponential term is
  // at least its value at x_a and the Markov term at least beta/x_b.
  const int N = opt.grid_points;
  const double log_span = std::log(opt.grid_span);
  auto grid = [&](int j) { return X * std::exp(log_span * (1.0 - static_cast<double>(j) / N)); };
  struct Range {
    int a, b;
  };
  std::vector<Range> stack{{0, N - 1}};
  while (!stack.empty()) {
    const Range r = stack.back();
    stack.pop_back();
    const double xa = grid(r.a), xb = grid(r.b);
    const double lower = std::exp(-c * (X - xa) * (X - xa)) + beta_smaller / xb;
    if (lower >= best) continue;
    if (r.b - r.a <= 2) {
      for (int j = r.a; j <= r.b; ++j) best = std::min(best, detail::hoeffding_markov(grid(j), X, c, beta_smaller));
      continue;
    }
    const int mid = (r.a + r.b) / 2;
    best = std::min(best, detail::hoeffding_markov(grid(mid), X, c, beta_smaller));
    stack.push_back({r.a, mid});
    stack.push_back({mid, r.b});
  }
  return std::min(1.0, guard_up(best));
}

// The same grid minimum by evaluating every point (reference for tests).
inline double ok_tail_grid_scan(long long n, long long k, double nu, double beta_smaller, int grid_points = 1000,
                                double span = 1e-4) {
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  const double X = nn * (1.0 - nu) * kk;
  const double c = 2.0 / ((nn - kk) * kk * kk);
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid_points; ++j) {
    const double x = X * std::exp(std::log(span) * (1.0 - static_cast<double>(j) / grid_points));
    best = std::min(best, detail::hoeffding_markov(x, X, c, beta_smaller));
  }
  return best;
}

// h at the canonical point x = n ln^mu n (infinity if not admissible).
inline double ok_tail_canonical(long long n, long long k, double nu, double mu, double beta_smaller) {
  const double nn = static_cast<double>(n), kk = static_cast<double>(k);
  const double X = nn * (1.0 - nu) * kk;
  const double x = nn * std::pow(std::log(nn), mu);
  if (!(x > 0 && x < X)) return std::numeric_limits<double>::infinity();
  return detail::hoeffding_markov(x, X, 2.0 / ((nn - kk) * kk * kk), beta_smaller);
}

struct BoundParams {
  double nu = 6.0 / 11.0;
  double mu = 1.25;
  double aleph = 0.0;
  double nubar() const { return 1.0 - nu; }
};

struct STerms {
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  double total() const { return s1 + s2 + s3 + s4; }
};

// The per-k sums for S1..S4. `beta` must hold upper bounds on E[F(K_j)] for
// every 2 <= j < n (index j; entries below 2 are ignored).
inline STerms s_terms(long long n, const BoundParams& p, const std::vector<double>& beta,
                      const OkTailOptions& tail = {}) {
  if (n < 22) throw Refusal("s_terms needs n >= 22");
  if (!(p.nu > 0.5 && p.nu < 1.0)) throw Refusal("nu must lie in (1/2, 1)");
  if (beta.size() < static_cast<std::size_t>(n)) throw Refusal("beta table does not cover 2..n-1");
  const double nn = static_cast<double>(n);
  const double nu = p.nu, nubar = p.nubar();
  const long long ceil_nubar_n = static_cast<long long>(std::ceil(nubar * nn));
  const long long floor_nu_n = static_cast<long long>(std::floor(nu * nn));
  STerms s;
  s.s1 = q(0, n - 1, n);
  for (long long k = 2; k <= n / 2; ++k) {
    const long long t = (n - k) / k;
    const long long xi = std::min(n - k - t, ceil_nubar_n - 1);
    s.s2 += q(xi, t, n);
  }
  for (long long k = 2; k <= n - 2; ++k) s.s3 += mk_sharp(n, k, nu) * ek2_upper(n, k, beta[static_cast<std::size_t>(n - k)]);
  for (long long k = 2; k <= floor_nu_n - 1; ++k) {
    const double pr = ok_tail(n, k, nu, p.mu, beta[static_cast<std::size_t>(n - k)], tail);
    s.s4 += q(ceil_nubar_n, floor_nu_n - k, n) * pr;
  }
  s.s2 = guard_up(s.s2);
  s.s3 = guard_up(s.s3);
  s.s4 = guard_up(s.s4);
  return s;
}

// The closed-form displays for S1..S4. In the S3 display the constant is
// pi^2/6 - 1 (the sum of 1/k^2 over k >= 2).
inline STerms s_terms_closed(long long n, const BoundParams& p) {
  if (n < 22) throw Refusal("closed-form S terms need n >= 22");
  const double nn = static_cast<double>(n), nu = p.nu, nubar = p.nubar(), mu = p.mu;
  const double lnn = std::log(nn);
  const double gamma = boost::math::constants::euler<double>();
  const double zeta2m1 = boost::math::constants::pi_sqr<double>() / 6.0 - 1.0;
  STerms s;
  s.s1 = lnn + gamma + 1.0;
  s.s2 = lnn / nu + std::log((nu * nn - 1.5) / (nu * nn - 0.5 - nn / 2.0)) +
         (std::log(nu / 2.0) - std::log(2.5 * nu - 1.0)) / nu;
  s.s3 = (nn + 2.0) / nn * zeta2m1 / (nu * nu) * std::log(2.0 * nu * nn) * (1.0 + 4.0 / (nu * nn - 2.0)) +
         (1.0 + 4.0 / nn) * (lnn - 2.0 * std::log(lnn) + 11.5) + 1.0 / (nu * nn - 2.5);
  const double five = 5.0 + p.aleph / lnn;
  s.s4 = 2.0 * five * std::pow(lnn, 1.0 + mu) * std::log(nu * nn) / (nubar * nubar * nn) +
         nu * nn * lnn * std::exp(-nn * nubar * nubar / 2.0) +
         (nu - 2.0 * std::pow(lnn, mu) / (nubar * nn)) * five / std::pow(lnn, mu - 2.0) * std::log(nu * nn) / lnn;
  return s;
}

// Lower bound 1/2 ln n - 2.
inline double lower_bound(double n) {
  if (!(n >= 1.0)) throw Refusal("lower_bound needs n >= 1");
  return 0.5 * std::log(n) - 2.0;
}

// (1/k) n(n-1)...(n-k+1) / (n-2)^k: expected number of faces of a uniform
// embedding of K_n that run through k distinct vertices.
inline Rational short_face_expectation(long long n, long long k) {
  if (n < 3 || k < 3 || k > n) throw Refusal("short_face_expectation needs 3 <= k <= n");
  BigInt num = 1, den = 1;
  for (long long i = 0; i < k; ++i) {
    num *= (n - i);
    den *= (n - 2);
  }
  return Rational(num, den * k);
}

// Piecewise envelope for n >= 4158: 23 ln n below e^30, 5 ln n below
// e^{e^16}, 3.65 ln n beyond. `ln_n` is the natural log of n so that huge n
// can be passed.
inline double asymptotic_upper_ln(double ln_n) {
  if (!(ln_n >= std::log(4158.0))) throw Refusal("asymptotic_upper needs n >= 4158");
  if (ln_n < 30.0) return 23.0 * ln_n;
  if (ln_n < std::exp(16.0)) return 5.0 * ln_n;
  return 3.65 * ln_n;
}

inline double asymptotic_upper(double n) { return asymptotic_upper_ln(std::log(n)); }

// ---------------------------------------------------------------------------
// The inductive table of upper bounds beta(n) >= E[F(K_n)].

enum class BetaSource { exact, logsq, s_terms };

inline const char* to_string(BetaSource s) {
  switch (s) {
    case BetaSource::exact: return "exact";
    case BetaSource::logsq: return "logsq";
    case BetaSource::s_terms: return "s_terms";
  }
  return "?";
}

struct BetaEntry {
  long long n = 0;
  double beta = 0;
  BetaSource source = BetaSource::exact;
  double logsq = std::numeric_limits<double>::quiet_NaN();
  double nu = std::numeric_limits<double>::quiet_NaN();
  double mu = std::numeric_limits<double>::quiet_NaN();
  double aleph = 0;  // max(0, beta - 5 ln n)
  STerms s;          // winning decomposition when source == s_terms
  std::vector<double> nu_grid;
};

struct BetaTable {
  std::vector<BetaEntry> entries;  // entries[i].n == i + 2

  const BetaEntry& at(long long n) const {
    if (n < 2 || static_cast<std::size_t>(n - 2) >= entries.size())
      throw Refusal("beta table does not cover n = " + std::to_string(n));
    return entries[static_cast<std::size_t>(n - 2)];
  }
  double beta(long long n) const { return at(n).beta; }
  long long n_max() const { return static_cast<long long>(entries.size()) + 1; }
};

struct BetaOptions {
  double mu = 1.25;
  double nu_seed = 6.0 / 11.0;
  double nu_step = 0.005;
  int nu_radius = 5;
  long long s_terms_from = 243;
  unsigned threads = 0;
  OkTailOptions tail{};
};

// Exact expected face counts of K_2..K_6 and the published value for K_7.
inline std::vector<std::pair<long long, Rational>> exact_small_values() {
  return {
      {2, Rational(1)},
      {3, Rational(2)},
      {4, Rational(9, 4)},
      {5, Rational(19572, 7776)},
      {6, Rational(BigInt("542000448"), BigInt("191102976"))},
      {7, Rational(31265, 10000)},
  };
}

// beta(n) for 2 <= n <= n_max. Each value is computed from smaller n only.
inline BetaTable beta_table(long long n_max, const BetaOptions& opt = {}) {
  if (n_max < 2) throw Refusal("beta_table needs n_max >= 2");
  if (n_max > 4157) throw Refusal("beta_table is limited to n <= 4157");
  BetaTable t;
  std::vector<double> beta(2, 0.0);
  double prev_nu = opt.nu_seed;
  for (const auto& [n, v] : exact_small_values()) {
    if (n > n_max) break;
    BetaEntry e;
    e.n = n;
    e.beta = guard_up(to_double(v));
    e.source = BetaSource::exact;
    if (n >= 4) e.logsq = logsq_upper(n);
    e.aleph = std::max(0.0, e.beta - 5.0 * std::log(static_cast<double>(n)));
    t.entries.push_back(e);
    beta.push_back(e.beta);
  }
  for (long long n = 8; n <= n_max; ++n) {
    BetaEntry e;
    e.n = n;
    e.logsq = logsq_upper(n);
    e.beta = e.logsq;
    e.source = BetaSource::logsq;
    if (n >= opt.s_terms_from) {
      for (int j = -opt.nu_radius; j <= opt.nu_radius; ++j) {
        const double nu = prev_nu + j * opt.nu_step;
        if (nu > 0.5 && nu < 1.0) e.nu_grid.push_back(nu);
      }
      std::vector<STerms> results(e.nu_grid.size());
      parallel_blocks(e.nu_grid.size(), opt.threads, [&](unsigned, std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
          results[i] = s_terms(n, BoundParams{e.nu_grid[i], opt.mu, 0.0}, beta, opt.tail);
      });
      std::size_t best = 0;
      for (std::size_t i = 1; i < results.size(); ++i)
        if (results[i].total() < results[best].total()) best = i;
      const double total = guard_up(results[best].total());
      prev_nu = e.nu_grid[best];
      e.nu = prev_nu;
      e.mu = opt.mu;
      e.s = results[best];
      if (total < e.beta) {
        e.beta = total;
        e.source = BetaSource::s_terms;
      }
    }
    e.aleph = std::max(0.0, e.beta - 5.0 * std::log(static_cast<double>(n)));
    t.entries.push_back(e);
    beta.push_back(e.beta);
  }
  return t;
}

inline nlohmann::json beta_table_to_json(const BetaTable& t, const BetaOptions& opt) {
  nlohmann::json j;
  j["options"] = {{"mu", opt.mu},
                  {"nu_seed", opt.nu_seed},
                  {"nu_step", opt.nu_step},
                  {"nu_radius", opt.nu_radius},
                  {"s_terms_from", opt.s_terms_from},
                  {"tail_grid_points", opt.tail.grid_points},
                  {"tail_grid_span", opt.tail.grid_span},
                  {"guard", kUpperGuard}};
  auto rows = nlohmann::json::array();
  for (const auto& e : t.entries) {
    nlohmann::json r{{"n", e.n}, {"beta", e.beta}, {"source", to_string(e.source)}, {"aleph", e.aleph}};
    if (!std::isnan(e.logsq)) r["logsq"] = e.logsq;
    if (!std::isnan(e.nu)) {
      r["nu"] = e.nu;
      r["mu"] = e.mu;
      r["nu_grid"] = e.nu_grid;
      r["S"] = {e.s.s1, e.s.s2, e.s.s3, e.s.s4};
    }
    rows.push_back(std::move(r));
  }
  j["table"] = std::move(rows);
  return j;
}

}  // namespace mapface
