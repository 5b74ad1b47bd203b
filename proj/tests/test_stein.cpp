#include <doctest.h>

#include <cmath>
#include <numbers>

#include "steinpairs/stein.hpp"

using namespace steinpairs;

namespace {

std::vector<Eigen::VectorXd> normal_points(int count, int k, std::uint64_t seed) {
    RngStream rng(seed);
    std::vector<Eigen::VectorXd> pts;
    for (int p = 0; p < count; ++p) {
        Eigen::VectorXd x(k);
        for (int i = 0; i < k; ++i) x(i) = rng.normal();
        pts.push_back(x);
    }
    return pts;
}

}  // namespace

TEST_SUITE_BEGIN("stein");

TEST_CASE("gauss-legendre rule on (0,1)") {
    for (int n : {16, 32, 64}) {
        const Quadrature q = gauss_legendre_01(n);
        double wsum = 0.0, cubic = 0.0, trig = 0.0;
        for (int i = 0; i < n; ++i) {
            wsum += q.weights[i];
            cubic += q.weights[i] * std::pow(q.nodes[i], 3);
            trig += q.weights[i] * std::sin(q.nodes[i]);
        }
        CHECK(wsum == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(cubic == doctest::Approx(0.25).epsilon(1e-14));
        CHECK(trig == doctest::Approx(1.0 - std::cos(1.0)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(gauss_legendre_01(0), std::invalid_argument);
}

TEST_CASE("linear test function has the closed-form solution") {
    // for g = <v, x> the solution is h = -<v, x>: zero Hessian, gradient -v
    const TestFunction g = builtin_test_function("linear", 2);
    const SteinSolution sol = make_stein_solution(g, 32, 20000, 61);
    const auto pts = normal_points(6, 2, 62);
    for (const auto& x : pts) {
        const SteinValue v = stein_evaluate(sol, x);
        CHECK(v.hess.cwiseAbs().maxCoeff() <= 1e-12);
        const Eigen::VectorXd minus_v =
            -Eigen::VectorXd::Ones(2) / std::sqrt(2.0);
        CHECK((v.grad - minus_v).cwiseAbs().maxCoeff() <= 1e-12);
        // h carries O(1/sqrt(S)) noise from the cached-sample mean of g(Z)
        CHECK(std::abs(v.h - -g.value(x)) <= 4.0 / std::sqrt(20000.0));
    }
    // residual reduces to the Monte Carlo mean of g(Z)
    const auto res = stein_residual(sol, pts);
    const double mc_tol = 3.0 / std::sqrt(20000.0);
    for (double r : res) CHECK(std::abs(r) <= mc_tol);
}

TEST_CASE("constant test function gives the zero solution") {
    const TestFunction g = builtin_test_function("constant", 2);
    const SteinSolution sol = make_stein_solution(g, 16, 2000, 63);
    const auto pts = normal_points(4, 2, 64);
    for (const auto& x : pts) {
        const SteinValue v = stein_evaluate(sol, x);
        CHECK(std::abs(v.h) <= 1e-13);
        CHECK(v.grad.cwiseAbs().maxCoeff() <= 1e-13);
        CHECK(v.hess.cwiseAbs().maxCoeff() <= 1e-13);
    }
    for (double r : stein_residual(sol, pts)) CHECK(std::abs(r) <= 1e-12);
}

TEST_CASE("odd g vanishes at the origin") {
    const TestFunction g = builtin_test_function("sin1", 2);
    const SteinSolution sol = make_stein_solution(g, 32, 40000, 65);
    Eigen::VectorXd zero = Eigen::VectorXd::Zero(2);
    const SteinValue v = stein_evaluate(sol, zero);
    CHECK(std::abs(v.h) <= 0.03);
}

TEST_CASE("gradient bound for a 1-Lipschitz g") {
    const TestFunction g = builtin_test_function("sin1", 2);
    const SteinSolution sol = make_stein_solution(g, 32, 5000, 66);
    for (const auto& x : normal_points(8, 2, 67)) {
        CHECK(stein_evaluate(sol, x).grad.norm() <= g.m1 + 1e-12);
    }
}

TEST_CASE("battery function residuals and Hessian bound") {
    const TestFunction g = builtin_test_function("sincos", 2);
    const std::int64_t S = 20000;
    const SteinSolution sol = make_stein_solution(g, 48, S, 68);
    const auto pts = normal_points(12, 2, 69);

    const auto res = stein_residual(sol, pts);
    double max_res = 0.0;
    for (double r : res) max_res = std::max(max_res, std::abs(r));
    CHECK(max_res <= 0.05);  // scaled for S = 2e4 vs the reference 1e5

    for (const auto& x : pts) {
        const SteinValue v = stein_evaluate(sol, x);
        CHECK(v.hess.norm() <= g.m1 * 1.05);
    }

    SUBCASE("residual shrinks with more Gaussian samples") {
        const SteinSolution sol4 = make_stein_solution(g, 48, 4 * S, 68);
        const auto res4 = stein_residual(sol4, pts);
        double mean_abs = 0.0, mean_abs4 = 0.0;
        for (std::size_t i = 0; i < res.size(); ++i) {
            mean_abs += std::abs(res[i]);
            mean_abs4 += std::abs(res4[i]);
        }
        CHECK(mean_abs4 < mean_abs);
    }

    SUBCASE("quadrature-node doubling is converged") {
        const SteinSolution sol2 = make_stein_solution(g, 96, S, 68);
        for (const auto& x : pts) {
            const double h1 = stein_evaluate(sol, x).h;
            const double h2 = stein_evaluate(sol2, x).h;
            CHECK(std::abs(h1 - h2) <= 1e-6 * (1.0 + std::abs(h1)));
        }
    }

    SUBCASE("analytic-integrand Hessian matches differenced gradient") {
        const Eigen::VectorXd x = pts[0];
        const SteinValue v = stein_evaluate(sol, x);
        const double step = 1e-4;
        for (int j = 0; j < 2; ++j) {
            Eigen::VectorXd xp = x, xm = x;
            xp(j) += step;
            xm(j) -= step;
            const Eigen::VectorXd col =
                (stein_evaluate(sol, xp).grad - stein_evaluate(sol, xm).grad) / (2 * step);
            CHECK((col - v.hess.col(j)).cwiseAbs().maxCoeff() <= 5e-3);
        }
    }
}

TEST_CASE("characterizing operator has zero Gaussian expectation") {
    const CharacterizingCheck quad = characterizing_check(builtin_test_function("quadratic", 3), 20000, 71);
    CHECK(std::abs(quad.estimate) <= 4.0 * quad.se);

    const CharacterizingCheck lin = characterizing_check(builtin_test_function("linear", 2), 20000, 72);
    CHECK(std::abs(lin.estimate) <= 4.0 * lin.se);

    const CharacterizingCheck sine = characterizing_check(builtin_test_function("sin1", 2), 20000, 73);
    CHECK(std::abs(sine.estimate) <= 4.0 * sine.se);
}

TEST_CASE("derivative bound audit") {
    SUBCASE("linear g has zero ratio") {
        const SteinSolution sol = make_stein_solution(builtin_test_function("linear", 2), 16, 2000, 74);
        std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
        const auto pts = normal_points(6, 2, 75);
        for (std::size_t i = 0; i + 1 < pts.size(); i += 2) pairs.emplace_back(pts[i], pts[i + 1]);
        const auto rep = derivative_bound_audit(sol, pairs);
        CHECK(rep.max_ratio <= 1e-10);
        CHECK(rep.within_bound);
    }

    SUBCASE("battery function obeys the M3 bound and the kink does not") {
        const TestFunction g = builtin_test_function("sincos", 2);
        const SteinSolution sol = make_stein_solution(g, 32, 20000, 76);
        std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>> pairs;
        const auto pts = normal_points(10, 2, 77);
        for (std::size_t i = 0; i + 1 < pts.size(); i += 2) pairs.emplace_back(pts[i], pts[i + 1]);
        const auto rep = derivative_bound_audit(sol, pairs);
        CHECK(rep.bound == doctest::Approx(0.25 * std::sqrt(2 * std::numbers::pi) * g.m2));
        CHECK(rep.max_ratio <= rep.bound * 1.05);
        CHECK(rep.within_bound);
        REQUIRE(rep.kink_ratios.size() == 3);
        CHECK(rep.kink_ratio_grows);
    }
}

TEST_CASE("declared constants hold on sampled points") {
    const ConstantsCheck sincos = check_declared_constants(builtin_test_function("sincos", 2), 1000, 78);
    CHECK(sincos.m1_ok);
    CHECK(sincos.m2_ok);
    const ConstantsCheck lin = check_declared_constants(builtin_test_function("linear", 3), 1000, 79);
    CHECK(lin.sampled_m1 == doctest::Approx(1.0));
    CHECK(lin.m1_ok);
}

TEST_CASE("configuration errors") {
    CHECK_THROWS_AS(make_stein_solution(builtin_test_function("linear", 2), 8, 1000, 80),
                    std::invalid_argument);
    CHECK_THROWS_AS(builtin_test_function("no_such_function", 2), std::invalid_argument);
    const SteinSolution sol = make_stein_solution(builtin_test_function("linear", 2), 16, 500, 81);
    CHECK_THROWS_AS(stein_evaluate(sol, Eigen::VectorXd::Zero(3)), std::invalid_argument);
}

TEST_SUITE_END();
