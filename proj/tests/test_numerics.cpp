#include "panelegls/error.hpp"
#include "panelegls/numerics.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace panelegls;
using testing::integrate;
using testing::max_abs;

namespace {

Eigen::MatrixXd random_spd(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> z;
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = z(rng);
    return a * a.transpose() + n * Eigen::MatrixXd::Identity(n, n);
}

// Upper tail of a density on [x, inf) through u -> x + u / (1 - u).
double upper_tail(const std::function<double(double)>& pdf, double x) {
    return integrate([&](double u) { return pdf(x + u / (1 - u)) / ((1 - u) * (1 - u)); }, 0.0, 1.0);
}

double chi2_pdf(double x, double k) {
    return std::exp((k / 2 - 1) * std::log(x) - x / 2 - (k / 2) * std::log(2.0) - std::lgamma(k / 2));
}

double t_pdf(double x, double v) {
    return std::exp(std::lgamma((v + 1) / 2) - std::lgamma(v / 2) - 0.5 * std::log(v * std::numbers::pi) -
                    (v + 1) / 2 * std::log1p(x * x / v));
}

double f_pdf(double x, double d1, double d2) {
    if (x <= 0) return 0;
    return std::exp(0.5 * d1 * std::log(d1) + 0.5 * d2 * std::log(d2) + (0.5 * d1 - 1) * std::log(x) -
                    0.5 * (d1 + d2) * std::log(d1 * x + d2) - (std::lgamma(d1 / 2) + std::lgamma(d2 / 2) -
                                                                std::lgamma((d1 + d2) / 2)));
}

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2 * std::numbers::pi); }

}  // namespace

TEST_CASE("SymMatrix symmetrises and rejects bad input") {
    Eigen::MatrixXd m(2, 2);
    m << 1, 2, 4, 3;
    const SymMatrix s(m);
    CHECK(s(0, 1) == 3.0);
    CHECK(s(1, 0) == 3.0);
    CHECK_THROWS_AS(SymMatrix(Eigen::MatrixXd(2, 3)), InputError);
    m(0, 0) = std::nan("");
    CHECK_THROWS_AS(SymMatrix{m}, InputError);
    CHECK(SymMatrix::identity(3).matrix() == Eigen::MatrixXd::Identity(3, 3));
}

TEST_CASE("spd_solve: identity and diagonal") {
    Eigen::MatrixXd b(3, 2);
    b << 1, 2, 3, 4, 5, 6;
    CHECK(spd_solve(SymMatrix::identity(3), b) == b);

    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2, 2);
    d(0, 0) = 4;
    d(1, 1) = 9;
    const auto x = spd_solve(SymMatrix(d), Eigen::MatrixXd::Identity(2, 2));
    CHECK(x(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(x(1, 1) == doctest::Approx(1.0 / 9).epsilon(1e-15));
    CHECK(x(0, 1) == 0.0);
}

TEST_CASE("spd_solve: random 5x5 residual") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const auto a = random_spd(rng, 5);
        const Eigen::MatrixXd b = Eigen::MatrixXd::Random(5, 3);
        const auto x = spd_solve(SymMatrix(a), b);
        CHECK(max_abs(a * x - b) <= 1e-10);
    }
}

TEST_CASE("spd_solve: names the failing pivot") {
    Eigen::MatrixXd a(3, 3);
    a << 1, 0, 0, 0, 1, 1, 0, 1, 1;
    try {
        spd_solve(SymMatrix(a), Eigen::MatrixXd::Identity(3, 3));
        FAIL("expected rejection");
    } catch (const EstimationError& e) {
        CHECK(std::string(e.what()).find("pivot 2") != std::string::npos);
    }
    Eigen::MatrixXd neg = -Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(spd_solve(SymMatrix(neg), Eigen::MatrixXd::Identity(2, 2)), EstimationError);
}

TEST_CASE("inverse_sqrt: examples and defining identity") {
    CHECK(max_abs(inverse_sqrt(SymMatrix::identity(4)).matrix() - Eigen::MatrixXd::Identity(4, 4)) <= 1e-15);
    const Eigen::MatrixXd four = 4 * Eigen::MatrixXd::Identity(3, 3);
    CHECK(max_abs(inverse_sqrt(SymMatrix(four)).matrix() - 0.5 * Eigen::MatrixXd::Identity(3, 3)) <= 1e-15);

    std::mt19937_64 rng(12);
    for (int rep = 0; rep < 20; ++rep) {
        const auto a = random_spd(rng, 4);
        const auto s = inverse_sqrt(SymMatrix(a)).matrix();
        CHECK(max_abs(s * a * s - Eigen::MatrixXd::Identity(4, 4)) <= 1e-10);
        CHECK(max_abs(s * a - a * s) <= 1e-9);
        CHECK(max_abs(s - s.transpose()) == 0.0);
    }
}

TEST_CASE("inverse_sqrt: eigenvalue floor") {
    Eigen::VectorXd e(3);
    e << 1, 2, 3;
    const Eigen::MatrixXd rank_one = e * e.transpose();
    CHECK_THROWS_AS(inverse_sqrt(SymMatrix(rank_one)), EstimationError);
    Eigen::MatrixXd tiny = Eigen::MatrixXd::Identity(2, 2);
    tiny(1, 1) = 1e-13;
    CHECK_THROWS_AS(inverse_sqrt(SymMatrix(tiny)), EstimationError);
    tiny(1, 1) = 1e-11;
    CHECK_NOTHROW(inverse_sqrt(SymMatrix(tiny)));
}

TEST_CASE("pearson") {
    const std::vector<double> x{1, 2, 3, 5, 8};
    std::vector<double> neg;
    for (double v : x) neg.push_back(-v);
    CHECK(pearson(x, x) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(pearson(x, neg) == doctest::Approx(-1.0).epsilon(1e-15));

    // (1,2,3) vs (1,2,4): deviations (-1,0,1) and (-4/3,-1/3,5/3); sxy = 3, sxx = 2, syy = 42/9.
    const std::vector<double> a{1, 2, 3}, b{1, 2, 4};
    CHECK(pearson(a, b) == doctest::Approx(3.0 / std::sqrt(2.0 * 42.0 / 9.0)).epsilon(1e-14));

    std::vector<double> affine;
    for (double v : b) affine.push_back(3.5 * v - 2);
    CHECK(pearson(a, affine) == doctest::Approx(pearson(a, b)).epsilon(1e-14));

    const std::vector<double> flat{2, 2, 2};
    CHECK_THROWS_AS(pearson(a, flat), InputError);
    CHECK_THROWS_AS(pearson(std::vector<double>{1}, std::vector<double>{1}), InputError);
    CHECK_THROWS_AS(pearson(a, x), InputError);
}

TEST_CASE("distributions: closed forms") {
    CHECK(chi2_sf(2, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    for (int k = 1; k <= 10; ++k) CHECK(chi2_sf(0, k) == 1.0);
    CHECK(normal_cdf(0) == 0.5);
    for (double df : {1.0, 2.0, 7.5, 191.0}) CHECK(t_sf(0, df) == 0.5);
    for (double d : {1.0, 3.0, 10.0, 57.0}) CHECK(f_sf(1, d, d) == doctest::Approx(0.5).epsilon(1e-13));
    // df = 1 t is Cauchy
    CHECK(t_sf(1, 1) == doctest::Approx(0.25).epsilon(1e-14));
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
    // chi-square with even df: Poisson tail
    CHECK(chi2_sf(6, 4) == doctest::Approx(std::exp(-3.0) * 4).epsilon(1e-14));
    CHECK(gamma_q(1, 2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
    CHECK(beta_inc(1, 1, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(beta_inc(2, 3, 0) == 0.0);
    CHECK(beta_inc(2, 3, 1) == 1.0);
}

TEST_CASE("distributions: quadrature oracle") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> ux(0.05, 40.0);
    std::uniform_int_distribution<int> udf(1, 60);
    double worst = 0;
    for (int rep = 0; rep < 40; ++rep) {
        const double x = ux(rng);
        const double k = udf(rng);
        worst = std::max(worst, std::fabs(chi2_sf(x, k) - upper_tail([k](double v) { return chi2_pdf(v, k); }, x)));
        const double tx = x / 5;
        worst = std::max(worst, std::fabs(t_sf(tx, k) - upper_tail([k](double v) { return t_pdf(v, k); }, tx)));
        const double d2 = udf(rng);
        const double fx = x / 8;
        worst = std::max(worst, std::fabs(f_sf(fx, k, d2) - upper_tail([k, d2](double v) { return f_pdf(v, k, d2); }, fx)));
        const double zx = x / 8 - 2.5;
        worst = std::max(worst, std::fabs(1 - normal_cdf(zx) - upper_tail(normal_pdf, zx)));
    }
    CHECK(worst <= 1e-9);
}

TEST_CASE("distributions: monotone and bounded") {
    for (double df : {1.0, 2.0, 5.0, 30.0}) {
        double prev_c = 1.0, prev_t = 1.0, prev_f = 1.0;
        for (double x = 0; x <= 60; x += 0.25) {
            const double c = chi2_sf(x, df), t = t_sf(x, df), f = f_sf(x, df, 2 * df);
            CHECK(c <= prev_c);
            CHECK(t <= prev_t);
            CHECK(f <= prev_f);
            CHECK(c >= 0.0);
            CHECK(t >= 0.0);
            CHECK(f >= 0.0);
            prev_c = c;
            prev_t = t;
            prev_f = f;
        }
    }
    double prev = 0;
    for (double x = -10; x <= 10; x += 0.1) {
        const double p = normal_cdf(x);
        CHECK(p >= prev);
        CHECK(p <= 1.0);
        prev = p;
    }
    CHECK(t_sf(-2, 5) == doctest::Approx(1 - t_sf(2, 5)).epsilon(1e-14));
}
