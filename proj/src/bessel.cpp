#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "wgf/analysis.hpp"
#include "wgf/error.hpp"

namespace wgf {
namespace {

constexpr int kMaxOrder = 20;
constexpr double kMaxArgument = 1e4;
constexpr double kSeriesLimit = 2.0;

double series(int n, double x) {
  // sum_k (-1)^k (x/2)^(2k+n) / (k! (k+n)!)
  const double half = 0.5 * x;
  double term = 1.0;
  for (int i = 1; i <= n; ++i) term *= half / i;
  double sum = term;
  const double q = -half * half;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<double>(k) * (k + n));
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

double miller(int n, double x) {
  const double top = std::max(static_cast<double>(n), x);
  int m = static_cast<int>(std::ceil(top + 20.0 + 10.0 * std::cbrt(top)));
  if (m % 2) ++m;

  const double two_over_x = 2.0 / x;
  double next = 0.0;  // J_{k+1}
  double cur = 1e-30; // J_k, k = m
  double norm = 0.0;  // J_0 + 2 sum J_2k, unnormalised
  double wanted = 0.0;
  for (int k = m; k >= 1; --k) {
    const double prev = k * two_over_x * cur - next;
    next = cur;
    cur = prev;  // now J_{k-1}
    const int idx = k - 1;
    if (idx == n) wanted = cur;
    if (idx > 0 && idx % 2 == 0) norm += 2.0 * cur;
    if (std::abs(cur) > 1e250) {
      cur *= 1e-250;
      next *= 1e-250;
      norm *= 1e-250;
      wanted *= 1e-250;
    }
  }
  norm += cur;
  return wanted / norm;
}

}  // namespace

double bessel_j(int n, double x) {
  if (n < 0 || n > kMaxOrder) {
    throw ConfigError(fmt::format("Bessel order must be in [0, {}] (got {})", kMaxOrder, n));
  }
  if (!(std::abs(x) <= kMaxArgument)) {
    throw ConfigError(fmt::format("Bessel argument |x| must be <= {:g} (got {})", kMaxArgument, x));
  }
  const double sign = (x < 0.0 && n % 2 == 1) ? -1.0 : 1.0;
  const double ax = std::abs(x);
  if (ax == 0.0) return n == 0 ? 1.0 : 0.0;
  return sign * (ax < kSeriesLimit ? series(n, ax) : miller(n, ax));
}

std::vector<double> bessel_zeros(int n, int count) {
  if (count < 0 || count > 20) {
    throw ConfigError(fmt::format("zero count must be in [0, 20] (got {})", count));
  }
  const auto f = [n](double x) { return bessel_j(n, x); };
  // J_n' = J_{n-1} - (n / x) J_n keeps n = 20 inside the supported orders.
  const auto df = [n](double x) {
    if (n == 0) return -bessel_j(1, x);
    return bessel_j(n - 1, x) - n / x * bessel_j(n, x);
  };

  std::vector<double> zeros;
  constexpr double step = 0.1;
  double a = n + 0.5;
  double fa = f(a);
  while (static_cast<int>(zeros.size()) < count) {
    const double b = a + step;
    const double fb = f(b);
    if (fa == 0.0 || fa * fb < 0.0) {
      double lo = a, hi = b, flo = fa;
      for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm < 0.0) == (flo < 0.0)) {
          lo = mid;
          flo = fm;
        } else {
          hi = mid;
        }
      }
      double root = 0.5 * (lo + hi);
      for (int it = 0; it < 3; ++it) {
        const double d = df(root);
        if (d == 0.0) break;
        const double next = root - f(root) / d;
        if (next < a || next > b) break;
        root = next;
      }
      zeros.push_back(root);
    }
    a = b;
    fa = fb;
  }
  return zeros;
}

void write_zeros_csv(std::ostream& out, int n, const std::vector<double>& zeros) {
  out << "n,k,zero\n";
  for (std::size_t k = 0; k < zeros.size(); ++k) {
    out << fmt::format("{},{},{:.12f}\n", n, k + 1, zeros[k]);
  }
}

}  // namespace wgf
