#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "voltide/quadrature.hpp"
#include "voltide/rng.hpp"
#include "voltide/skew_t.hpp"
#include "voltide/stats.hpp"
#include "voltide/student_t.hpp"

using namespace voltide;

TEST_CASE("quantile uses linear interpolation between order statistics") {
    std::vector<double> x;
    for (int i = 1; i <= 100; ++i) x.push_back(i);
    CHECK(stats::quantile(x, 0.0) == doctest::Approx(1.0));
    CHECK(stats::quantile(x, 1.0) == doctest::Approx(100.0));
    CHECK(stats::quantile(x, 0.5) == doctest::Approx(50.5));
    CHECK(stats::quantile(x, 0.01) == doctest::Approx(1.99));
    CHECK(stats::quantile(x, 0.99) == doctest::Approx(99.01));
}

TEST_CASE("normal quantile inverts normal cdf") {
    for (double p : {1e-8, 1e-4, 0.025, 0.3, 0.5, 0.8, 0.975, 1.0 - 1e-6}) {
        const double x = stats::normal_quantile(p);
        CHECK(stats::normal_cdf(x) == doctest::Approx(p).epsilon(1e-12));
    }
    CHECK(stats::normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-12));
}

TEST_CASE("KS uniformity test separates uniform from shifted samples") {
    rng::Rng gen(rng::derive_seed(7, "test:ks"));
    std::vector<double> u(2000);
    for (double& v : u) v = gen.uniform();
    CHECK(stats::ks_test_uniform(u).p_value > 0.01);

    for (double& v : u) v = 0.5 + 0.5 * v;  // clearly non-uniform on (0,1)
    CHECK(stats::ks_test_uniform(u).p_value < 1e-6);
}

TEST_CASE("student t cdf approaches the normal limit and inverts cleanly") {
    CHECK(dist::student_t_cdf(0.0, 7.0) == doctest::Approx(0.5));
    CHECK(dist::student_t_cdf(1.96, 1000.0) ==
          doctest::Approx(stats::normal_cdf(1.96)).epsilon(5e-4));
    for (double nu : {2.3, 4.0, 12.0, 80.0}) {
        for (double p : {0.001, 0.1, 0.5, 0.77, 0.999}) {
            const double x = dist::student_t_quantile(p, nu);
            CHECK(dist::student_t_cdf(x, nu) == doctest::Approx(p).epsilon(1e-11));
        }
    }
}

TEST_CASE("student t mean absolute value matches quadrature") {
    // Closed form vs. direct integration of |x| f(x).
    for (double nu : {3.0, 6.0, 25.0}) {
        const double direct = 2.0 * quad::adaptive_simpson(
                                        [&](double theta) {
                                            if (theta >= 1.5707963) return 0.0;
                                            const double t = std::tan(theta);
                                            return t * dist::student_t_pdf(t, nu) *
                                                   (1.0 + t * t);
                                        },
                                        0.0, 0.5 * std::numbers::pi - 1e-9, 1e-12);
        CHECK(dist::student_t_mean_abs(nu) == doctest::Approx(direct).epsilon(1e-9));
    }
}

TEST_CASE("symmetric skew-t has median zero") {
    const auto p = dist::make_skew_t(6.0, 1.0);
    CHECK(dist::skewt_cdf(0.0, p) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(p.mu_dist == doctest::Approx(0.0));
}

TEST_CASE("skew-t with huge nu approaches the normal law") {
    const auto p = dist::make_skew_t(200.0, 1.0);
    CHECK(std::abs(dist::skewt_cdf(1.96, p) - 0.975) < 0.002);
}

TEST_CASE("skew-t quantile inverts cdf") {
    for (double xi : {0.7, 1.0, 1.4}) {
        const auto p = dist::make_skew_t(5.0, xi);
        for (double x : {-3.0, -1.0, 0.0, 1.0, 3.0}) {
            CHECK(dist::skewt_quantile(dist::skewt_cdf(x, p), p) ==
                  doctest::Approx(x).epsilon(1e-9));
        }
    }
    CHECK_THROWS(dist::skewt_quantile(0.0, dist::make_skew_t(5.0, 1.0)));
    CHECK_THROWS(dist::skewt_quantile(1.0, dist::make_skew_t(5.0, 1.0)));
}

TEST_CASE("skew-t density normalizes and standardizes on the documented grid") {
    for (double nu : {4.0, 8.0, 30.0}) {
        for (double xi : {0.7, 1.0, 1.4}) {
            const auto p = dist::make_skew_t(nu, xi);
            const double mass = quad::adaptive_simpson(
                [&](double x) { return dist::skewt_pdf(x, p); }, -40.0, 40.0, 1e-9);
            CHECK(mass == doctest::Approx(1.0).epsilon(1e-4));

            // Whole-line moments on a tangent-compressed axis.
            const auto moment = [&](int k) {
                return quad::adaptive_simpson(
                    [&](double theta) {
                        const double t = std::tan(theta);
                        const double sec2 = 1.0 + t * t;
                        return std::pow(t, k) * dist::skewt_pdf(t, p) * sec2;
                    },
                    -0.5 * std::numbers::pi + 1e-7, 0.5 * std::numbers::pi - 1e-7, 1e-9);
            };
            CHECK(moment(1) == doctest::Approx(0.0).epsilon(1e-4));
            CHECK(moment(2) == doctest::Approx(1.0).epsilon(1e-4));
        }
    }
}

TEST_CASE("skew-t mean absolute value agrees with the symmetric closed form") {
    for (double nu : {4.0, 9.0, 40.0}) {
        const auto p = dist::make_skew_t(nu, 1.0);
        const double expect = dist::student_t_mean_abs(nu) * std::sqrt((nu - 2.0) / nu);
        CHECK(dist::skewt_mean_abs(p) == doctest::Approx(expect).epsilon(1e-7));
    }
}

TEST_CASE("derived seeds differ across labels and indices") {
    const auto a = rng::derive_seed(42, "stage:one", 0);
    const auto b = rng::derive_seed(42, "stage:one", 1);
    const auto c = rng::derive_seed(42, "stage:two", 0);
    const auto d = rng::derive_seed(43, "stage:one", 0);
    CHECK(a != b);
    CHECK(a != c);
    CHECK(a != d);
    CHECK(a == rng::derive_seed(42, "stage:one", 0));
}
