#include "panelegls/numerics.hpp"

#include "panelegls/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace panelegls {

namespace {

constexpr int kMaxIterations = 10000;
constexpr double kEpsilon = 1e-16;
constexpr double kTiny = 1e-300;

// Series for the regularised lower incomplete gamma P(a, x); converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kMaxIterations; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEpsilon) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz continued fraction for Q(a, x); used for x >= a + 1.
double gamma_q_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

// Continued fraction for I_x(a, b), evaluated by modified Lentz.
double beta_fraction(double a, double b, double x) {
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m < kMaxIterations; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEpsilon) break;
    }
    return h;
}

void require_positive(double v, const char* what) {
    if (!(v > 0) || !std::isfinite(v)) throw InputError(std::string(what) + " must be positive and finite");
}

}  // namespace

double gamma_q(double a, double x) {
    require_positive(a, "gamma_q shape");
    if (std::isnan(x)) throw InputError("gamma_q argument is NaN");
    if (x <= 0) return 1.0;
    if (x == std::numeric_limits<double>::infinity()) return 0.0;
    if (x < a + 1.0) return std::clamp(1.0 - gamma_p_series(a, x), 0.0, 1.0);
    return std::clamp(gamma_q_fraction(a, x), 0.0, 1.0);
}

double beta_inc(double a, double b, double x) {
    require_positive(a, "beta_inc a");
    require_positive(b, "beta_inc b");
    if (std::isnan(x)) throw InputError("beta_inc argument is NaN");
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    const double front =
        std::exp(std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x));
    double r;
    if (x < (a + 1.0) / (a + b + 2.0)) r = front * beta_fraction(a, b, x) / a;
    else r = 1.0 - front * beta_fraction(b, a, 1.0 - x) / b;
    return std::clamp(r, 0.0, 1.0);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double chi2_sf(double x, double df) {
    require_positive(df, "chi-square degrees of freedom");
    if (x <= 0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * x);
}

double t_sf(double x, double df) {
    require_positive(df, "t degrees of freedom");
    if (std::isnan(x)) throw InputError("t_sf argument is NaN");
    if (std::isinf(x)) return x > 0 ? 0.0 : 1.0;
    const double tail = 0.5 * beta_inc(0.5 * df, 0.5, df / (df + x * x));
    return x >= 0 ? tail : 1.0 - tail;
}

double f_sf(double x, double df1, double df2) {
    require_positive(df1, "F numerator degrees of freedom");
    require_positive(df2, "F denominator degrees of freedom");
    if (std::isnan(x)) throw InputError("f_sf argument is NaN");
    if (x <= 0) return 1.0;
    if (std::isinf(x)) return 0.0;
    return beta_inc(0.5 * df2, 0.5 * df1, df2 / (df2 + df1 * x));
}

}  // namespace panelegls
