#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "steinpairs/parallel.hpp"
#include "steinpairs/quadrature.hpp"
#include "steinpairs/rng.hpp"

namespace steinpairs {

// A test function with optional analytic derivatives and declared Lipschitz
// constants m1 = sup|grad|, m2 = sup||Hess||_op over the working region
// (user-supplied or estimated by sampling; NaN when undeclared).
struct TestFunction {
    int k = 1;
    std::string name;
    std::function<double(const Eigen::VectorXd&)> value;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;  // optional
    std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;   // optional
    double m1 = std::numeric_limits<double>::quiet_NaN();
    double m2 = std::numeric_limits<double>::quiet_NaN();
    double m3 = std::numeric_limits<double>::quiet_NaN();
};

// Central differences at step 1e-5 (1 + |x|), used when no analytic
// derivative is supplied.
Eigen::VectorXd numeric_gradient(const TestFunction& f, const Eigen::VectorXd& x);
Eigen::MatrixXd numeric_hessian(const TestFunction& f, const Eigen::VectorXd& x);

// Builtins: constant, linear, quadratic, sin1, sincos (sin(x1) + x2 cos(x2)),
// kink (max{min{x, y}, 0}, the function whose Stein solution has a
// non-Lipschitz second derivative).
TestFunction builtin_test_function(const std::string& name, int k);

// Spot check of the declared constants on sampled standard normal points.
struct ConstantsCheck {
    double sampled_m1 = 0.0;
    double sampled_m2 = 0.0;
    bool m1_ok = true;
    bool m2_ok = true;
};
ConstantsCheck check_declared_constants(const TestFunction& f, int points, std::uint64_t seed);

// Numerical solution of Delta h - <x, grad h> = g - E g(Z): quadrature in
// the time variable after smoothing substitutions, expectation over a cached
// Gaussian sample shared by every evaluation point (common random numbers).
struct SteinSolution {
    TestFunction g;
    int nodes = 64;
    std::int64_t gaussian_samples = 0;
    std::uint64_t seed = 0;
    Eigen::MatrixXd z;        // k x S cached sample
    double g_mean_z = 0.0;    // cached sample mean of g(Z)
    Quadrature rule;          // Gauss-Legendre on (0, 1)
};

SteinSolution make_stein_solution(TestFunction g, int nodes, std::int64_t gaussian_samples,
                                  std::uint64_t seed);

struct SteinValue {
    double h = 0.0;
    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
};

// h, grad h and Hess h at x. Derivatives come from the differentiated
// integral representations, not from differencing h; the Hessian uses the
// direct second-derivative integrand when g has one, the Gaussian
// integration-by-parts form otherwise.
SteinValue stein_evaluate(const SteinSolution& sol, const Eigen::VectorXd& x);

// trace Hess h(x) - <x, grad h(x)> - g(x) + Eg(Z) per point; ~0 up to
// quadrature and Monte Carlo error.
std::vector<double> stein_residual(const SteinSolution& sol,
                                   const std::vector<Eigen::VectorXd>& points);

struct CharacterizingCheck {
    double estimate = 0.0;
    double se = 0.0;
    std::int64_t samples = 0;
};

// Monte Carlo estimate of E[Delta f(Z) - <Z, grad f(Z)>], which vanishes for
// the standard Gaussian.
CharacterizingCheck characterizing_check(const TestFunction& f, std::int64_t samples,
                                         std::uint64_t seed, int threads = default_threads());

struct HessianLipschitzReport {
    double max_ratio = 0.0;   // max ||Hess h(x) - Hess h(y)||_op / |x - y|
    double bound = 0.0;       // (sqrt(2 pi)/4) m2(g)
    bool within_bound = false;
    std::vector<double> kink_distances;  // pair separations straddling the kink
    std::vector<double> kink_ratios;     // corresponding Hessian-difference ratios
    bool kink_ratio_grows = false;       // pathology flag: ratios increase as pairs shrink
};

// Checks the Hessian Lipschitz ratio against (sqrt(2 pi)/4) m2(g) with a 5%
// numerical allowance, and probes the kink counterexample, for which the
// ratio grows without bound as the pair straddles the diagonal more tightly.
HessianLipschitzReport derivative_bound_audit(
    const SteinSolution& sol,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& point_pairs);

}  // namespace steinpairs
