#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "wvd/errors.hpp"
#include "wvd/model.hpp"

using namespace wvd;

namespace {

MultiresSequence random_sequence(std::mt19937_64& rng, int j0, int jmax) {
    std::normal_distribution<double> normal;
    auto theta = MultiresSequence::zeros(j0, jmax);
    for (int j = j0; j <= jmax; ++j) {
        for (double& v : theta.level(j)) v = normal(rng);
    }
    return theta;
}

}  // namespace

TEST_SUITE("model") {
    TEST_CASE("hyper-parameter validation") {
        CHECK_NOTHROW((HyperParams{1.0, 2.0, 2.0, 0.0}.validate()));
        CHECK_THROWS_AS((HyperParams{0.4, 1.0, 1.0, 1.0}.validate()), ValidationError);
        CHECK_THROWS_AS((HyperParams{0.6, 1.0, 1.0, 0.3}.validate()), ValidationError);
        CHECK_THROWS_AS((HyperParams{1.0, 0.0, 1.0, 0.0}.validate()), ValidationError);
        CHECK_THROWS_AS((HyperParams{1.0, 2.0, 2.0, -0.1}.validate()), ValidationError);
        CHECK((HyperParams{0.6, 1.0, 1.0, 1.0}.is_valid()));
        CHECK_FALSE((HyperParams{0.6, 1.0, 1.0, 0.3}.is_valid()));
    }

    TEST_CASE("sequence shape checks") {
        CHECK_NOTHROW(MultiresSequence(1, {{0.0, 0.0}, {1.0, 2.0, 3.0, 4.0}}));
        try {
            (void)MultiresSequence(1, {{0.0, 0.0}, {1.0, 2.0, 3.0}});
            FAIL("expected a length error");
        } catch (const ValidationError& e) {
            CHECK(std::string(e.what()).find("level length") != std::string::npos);
        }
        CHECK_THROWS_AS(MultiresSequence(1, {}), ValidationError);
        CHECK_THROWS_AS(MultiresSequence(0, {{NAN}}), ValidationError);
        const auto z = MultiresSequence::zeros(1, 4);
        CHECK(z.jmax() == 4);
        CHECK(z.level(3).size() == 8);
        CHECK(z.total_size() == 2 + 4 + 8 + 16);
        CHECK_THROWS_AS((void)z.level(5), ValidationError);
    }

    TEST_CASE("besov norm examples") {
        const HyperParams g{1.0, 2.0, 2.0, 0.0};
        CHECK(besov_norm(MultiresSequence::zeros(1, 5), g) == 0.0);
        const MultiresSequence single(1, {{1.0, 0.0}});
        CHECK(besov_norm(single, g) == doctest::Approx(2.0).epsilon(1e-15));

        std::mt19937_64 rng(7);
        const auto theta = random_sequence(rng, 1, 6);
        CHECK(besov_norm(theta, HyperParams{1.0, 1.5, 3.0, 0.0}) ==
              besov_norm(theta, HyperParams{1.0, 1.5, 3.0, 2.0}));
    }

    TEST_CASE("besov norm is absolutely homogeneous") {
        std::mt19937_64 rng(11);
        const HyperParams g{0.8, 1.0, 1.5, 0.5};
        for (int trial = 0; trial < 20; ++trial) {
            auto theta = random_sequence(rng, 1, 5);
            const double base = besov_norm(theta, g);
            const double c = 0.1 + trial * 0.7;
            for (int j = theta.j0(); j <= theta.jmax(); ++j) {
                for (double& v : theta.level(j)) v *= -c;
            }
            CHECK(besov_norm(theta, g) == doctest::Approx(c * base).epsilon(1e-13));
        }
    }

    TEST_CASE("shell radius") {
        const double p = 1.5;
        const BesovBall boundary{{1.0 / p - 0.5, p, 2.0, 1.0}, 1.0};
        CHECK(shell_radius(boundary, 7) == doctest::Approx(1.0));
        const BesovBall ball{{1.0, 2.0, 2.0, 0.0}, 4.0};
        CHECK(shell_radius(ball, 2) == doctest::Approx(1.0).epsilon(1e-15));
        for (int j = 0; j < 10; ++j) {
            CHECK(shell_radius(ball, j + 1) / shell_radius(ball, j) == doctest::Approx(0.5));
        }
    }

    TEST_CASE("level norms stay inside their shells") {
        std::mt19937_64 rng(3);
        const BesovBall ball{{0.9, 1.0, 2.0, 0.0}, 2.5};
        for (int trial = 0; trial < 50; ++trial) {
            auto theta = random_sequence(rng, 1, 6);
            const double scale = ball.radius / besov_norm(theta, ball.gamma);
            for (int j = theta.j0(); j <= theta.jmax(); ++j) {
                for (double& v : theta.level(j)) v *= scale;
            }
            REQUIRE(membership(theta, ball));
            for (int j = theta.j0(); j <= theta.jmax(); ++j) {
                CHECK(lp_norm(theta.level(j), ball.gamma.p) <= shell_radius(ball, j) * (1.0 + 1e-12));
            }
        }
    }

    TEST_CASE("zone examples") {
        CHECK(classify_zone({2.0, 2.0, 2.0, 1.0}) == Zone::Dense);
        CHECK(classify_zone({0.6, 1.0, 1.0, 1.0}) == Zone::Sparse);
        CHECK(classify_zone({1.0, 1.0, 2.0, 0.5}) == Zone::Critical);
        CHECK(classify_zone({0.4, 1.0, 1.0, 1.0}) == Zone::Invalid);
        CHECK(classify_zone({1.0, 1.0, 2.0, 0.5 + 1e-7}, Zone::Critical) == Zone::Critical);
        CHECK(zone_from_string("sparse") == Zone::Sparse);
        CHECK_THROWS_AS((void)zone_from_string("dens"), ValidationError);
    }

    TEST_CASE("zones partition the valid parameters") {
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int valid = 0;
        for (int trial = 0; trial < 5000; ++trial) {
            const HyperParams g{0.01 + 3.0 * u(rng), 0.3 + 3.5 * u(rng), 0.5 + 3.0 * u(rng), 2.0 * u(rng)};
            const Zone z = classify_zone(g);
            if (!g.is_valid()) {
                CHECK(z == Zone::Invalid);
                continue;
            }
            ++valid;
            CHECK(z != Zone::Invalid);
            if (g.p >= 2.0) CHECK(z == Zone::Dense);
            const bool dense = g.alpha > g.critical_alpha();
            CHECK((z == Zone::Dense) == (dense || g.p >= 2.0));
        }
        CHECK(valid > 1000);
    }

    TEST_CASE("membership") {
        const BesovBall ball{{1.0, 2.0, 2.0, 0.0}, 3.0};
        CHECK(membership(MultiresSequence::zeros(1, 4), ball));
        std::mt19937_64 rng(9);
        auto theta = random_sequence(rng, 1, 5);
        const double scale = ball.radius / besov_norm(theta, ball.gamma);
        auto at = theta;
        auto over = theta;
        for (int j = theta.j0(); j <= theta.jmax(); ++j) {
            for (std::size_t i = 0; i < at.level(j).size(); ++i) {
                at.level(j)[i] *= scale;
                over.level(j)[i] *= scale * (1.0 + 1e-6);
            }
        }
        CHECK(membership(at, ball));
        CHECK_FALSE(membership(over, ball));
    }

    TEST_CASE("noise spec") {
        const auto white = NoiseSpec::white(0.1, 0.5);
        CHECK(white.level_scale(4) == doctest::Approx(0.4));
        CHECK_NOTHROW(white.validate());
        const auto tri = NoiseSpec::tridiagonal(0.1, 0.0, 0.3);
        CHECK(tri.xi0 == doctest::Approx(0.4));
        CHECK(tri.xi1 == doctest::Approx(1.6));
        CHECK_NOTHROW(tri.validate());
        CHECK_THROWS_AS(NoiseSpec::tridiagonal(0.1, 0.0, 0.5).validate(), ValidationError);
        auto narrow = tri;
        narrow.xi1 = 1.2;
        CHECK_THROWS_AS(narrow.validate(), ValidationError);
        CHECK_THROWS_AS(NoiseSpec::white(-1.0, 0.0).validate(), ValidationError);
    }
}
