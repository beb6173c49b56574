#include "rcrt/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace rcrt {

namespace {

double normal_pdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

// Probability mass of N(0,1) on [a, b), accurate in both tails.
double normal_mass(double a, double b) {
  if (b <= a) return 0.0;
  if (a >= 0) return 0.5 * (std::erfc(a / std::numbers::sqrt2) - std::erfc(b / std::numbers::sqrt2));
  if (b <= 0) return 0.5 * (std::erfc(-b / std::numbers::sqrt2) - std::erfc(-a / std::numbers::sqrt2));
  return 1.0 - normal_cdf(a) - (1.0 - normal_cdf(b));
}

struct SimpsonPanel {
  double a, b, fa, fm, fb, whole;
};

double adaptive_simpson(const std::function<double(double)>& f, const SimpsonPanel& p,
                        double tol, int depth) {
  const double m = 0.5 * (p.a + p.b);
  const double lm = 0.5 * (p.a + m), rm = 0.5 * (m + p.b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - p.a) / 6.0 * (p.fa + 4.0 * flm + p.fm);
  const double right = (p.b - m) / 6.0 * (p.fm + 4.0 * frm + p.fb);
  const double delta = left + right - p.whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, {p.a, m, p.fa, flm, p.fm, left}, tol / 2, depth - 1) +
         adaptive_simpson(f, {m, p.b, p.fm, frm, p.fb, right}, tol / 2, depth - 1);
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  // a handful of fixed panels first so narrow peaks are not skipped
  constexpr int panels = 64;
  const double h = (b - a) / panels;
  double total = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double lo = a + k * h, hi = lo + h;
    const double flo = f(lo), fmid = f(0.5 * (lo + hi)), fhi = f(hi);
    const double whole = h / 6.0 * (flo + 4.0 * fmid + fhi);
    total += adaptive_simpson(f, {lo, hi, flo, fmid, fhi, whole}, tol / panels, 40);
  }
  return total;
}

void check_counts(int N, int L) {
  if (N < 1 || L < 1) throw std::invalid_argument("span probability: need N, L >= 1");
}

}  // namespace

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double bound_span_prob(double sigma, double delta, int N, int L) {
  if (!(sigma > 0)) throw std::invalid_argument("bound_span_prob: sigma must be positive");
  if (!(delta >= 0)) throw std::invalid_argument("bound_span_prob: delta must be >= 0");
  check_counts(N, L);
  const int exponent = N * (L - 1);
  if (exponent == 0) return 1.0;
  const double t = delta / sigma;
  return std::pow(normal_mass(-t, t), exponent);
}

double exact_span_prob(double sigma, double delta, int N, int L) {
  if (!(sigma > 0)) throw std::invalid_argument("exact_span_prob: sigma must be positive");
  if (!(delta >= 0)) throw std::invalid_argument("exact_span_prob: delta must be >= 0");
  check_counts(N, L);
  if (L == 1) return 1.0;
  if (delta == 0) return 0.0;
  const double width = 2.0 * delta / sigma;
  if (std::isinf(width)) return 1.0;

  auto integrand = [&](double z) {
    return L * normal_pdf(z) * std::pow(normal_mass(z, z + width), L - 1);
  };
  // the minimum of L standard normals sits in [-12, 9] up to ~1e-19 mass
  const double per_number = std::clamp(integrate(integrand, -12.0, 9.0, 1e-11), 0.0, 1.0);
  return std::pow(per_number, N);
}

double chernoff_success(double p, int kappa) {
  if (!(p > 0.5) || p > 1.0)
    throw std::invalid_argument("chernoff_success: p must be in (1/2, 1]");
  if (kappa < 0) throw std::invalid_argument("chernoff_success: kappa must be >= 0");
  const double gap = p - 0.5;
  return 1.0 - std::exp(-kappa * gap * gap / (2.0 * p));
}

}  // namespace rcrt
