#include "steinpairs/stein.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "steinpairs/matrix.hpp"

namespace steinpairs {

namespace {

void parallel_points(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (int i = t; i < n; i += threads) fn(i);
        });
    for (auto& th : pool) th.join();
}

Eigen::VectorXd grad_of(const TestFunction& f, const Eigen::VectorXd& x) {
    return f.gradient ? f.gradient(x) : numeric_gradient(f, x);
}

Eigen::MatrixXd hess_of(const TestFunction& f, const Eigen::VectorXd& x) {
    return f.hessian ? f.hessian(x) : numeric_hessian(f, x);
}

}  // namespace

Eigen::VectorXd numeric_gradient(const TestFunction& f, const Eigen::VectorXd& x) {
    const double h = 1e-5 * (1.0 + x.norm());
    Eigen::VectorXd g(x.size());
    Eigen::VectorXd p = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        p(i) = x(i) + h;
        const double up = f.value(p);
        p(i) = x(i) - h;
        const double dn = f.value(p);
        p(i) = x(i);
        g(i) = (up - dn) / (2.0 * h);
    }
    return g;
}

Eigen::MatrixXd numeric_hessian(const TestFunction& f, const Eigen::VectorXd& x) {
    const double h = 1e-5 * (1.0 + x.norm());
    Eigen::MatrixXd out(x.size(), x.size());
    Eigen::VectorXd p = x;
    for (Eigen::Index j = 0; j < x.size(); ++j) {
        p(j) = x(j) + h;
        const Eigen::VectorXd up = grad_of(f, p);
        p(j) = x(j) - h;
        const Eigen::VectorXd dn = grad_of(f, p);
        p(j) = x(j);
        out.col(j) = (up - dn) / (2.0 * h);
    }
    return 0.5 * (out + out.transpose());
}

TestFunction builtin_test_function(const std::string& name, int k) {
    TestFunction f;
    f.k = k;
    f.name = name;
    if (name == "constant") {
        f.value = [](const Eigen::VectorXd&) { return 1.0; };
        f.gradient = [k](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(k).eval(); };
        f.hessian = [k](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(k, k).eval(); };
        f.m1 = 0.0;
        f.m2 = 0.0;
        f.m3 = 0.0;
    } else if (name == "linear") {
        const double c = 1.0 / std::sqrt(static_cast<double>(k));
        f.value = [c](const Eigen::VectorXd& x) { return c * x.sum(); };
        f.gradient = [c, k](const Eigen::VectorXd&) {
            return (c * Eigen::VectorXd::Ones(k)).eval();
        };
        f.hessian = [k](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(k, k).eval(); };
        f.m1 = 1.0;
        f.m2 = 0.0;
        f.m3 = 0.0;
    } else if (name == "quadratic") {
        f.value = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
        f.gradient = [](const Eigen::VectorXd& x) { return (2.0 * x).eval(); };
        f.hessian = [k](const Eigen::VectorXd&) {
            return (2.0 * Eigen::MatrixXd::Identity(k, k)).eval();
        };
        f.m2 = 2.0;
        f.m3 = 0.0;
    } else if (name == "sin1") {
        f.value = [](const Eigen::VectorXd& x) { return std::sin(x(0)); };
        f.gradient = [k](const Eigen::VectorXd& x) {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(k);
            g(0) = std::cos(x(0));
            return g;
        };
        f.hessian = [k](const Eigen::VectorXd& x) {
            Eigen::MatrixXd h = Eigen::MatrixXd::Zero(k, k);
            h(0, 0) = -std::sin(x(0));
            return h;
        };
        f.m1 = 1.0;
        f.m2 = 1.0;
        f.m3 = 1.0;
    } else if (name == "sincos") {
        if (k != 2) throw std::invalid_argument("builtin_test_function: sincos needs k = 2");
        f.value = [](const Eigen::VectorXd& x) {
            return std::sin(x(0)) + x(1) * std::cos(x(1));
        };
        f.gradient = [](const Eigen::VectorXd& x) {
            Eigen::VectorXd g(2);
            g(0) = std::cos(x(0));
            g(1) = std::cos(x(1)) - x(1) * std::sin(x(1));
            return g;
        };
        f.hessian = [](const Eigen::VectorXd& x) {
            Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 2);
            h(0, 0) = -std::sin(x(0));
            h(1, 1) = -2.0 * std::sin(x(1)) - x(1) * std::cos(x(1));
            return h;
        };
        // effective constants on the standard normal sampling region
        f.m1 = 3.2;
        f.m2 = 4.5;
    } else if (name == "kink") {
        if (k != 2) throw std::invalid_argument("builtin_test_function: kink needs k = 2");
        f.value = [](const Eigen::VectorXd& x) {
            return std::max(std::min(x(0), x(1)), 0.0);
        };
        f.gradient = [](const Eigen::VectorXd& x) {
            Eigen::VectorXd g = Eigen::VectorXd::Zero(2);
            if (x(0) <= x(1) && x(0) > 0.0) g(0) = 1.0;
            else if (x(1) < x(0) && x(1) > 0.0) g(1) = 1.0;
            return g;
        };
        f.m1 = 1.0;  // a.e. gradient has norm <= 1; no Lipschitz gradient exists
    } else {
        throw std::invalid_argument("builtin_test_function: unknown name '" + name + "'");
    }
    return f;
}

ConstantsCheck check_declared_constants(const TestFunction& f, int points, std::uint64_t seed) {
    RngStream rng(seed);
    ConstantsCheck out;
    for (int i = 0; i < points; ++i) {
        Eigen::VectorXd x(f.k);
        for (int j = 0; j < f.k; ++j) x(j) = rng.normal();
        out.sampled_m1 = std::max(out.sampled_m1, grad_of(f, x).norm());
        if (f.hessian) out.sampled_m2 = std::max(out.sampled_m2, op_norm(hess_of(f, x)));
    }
    if (!std::isnan(f.m1)) out.m1_ok = out.sampled_m1 <= f.m1;
    if (!std::isnan(f.m2) && f.hessian) out.m2_ok = out.sampled_m2 <= f.m2;
    return out;
}

SteinSolution make_stein_solution(TestFunction g, int nodes, std::int64_t gaussian_samples,
                                  std::uint64_t seed) {
    if (nodes < 16) {
        std::ostringstream msg;
        msg << "make_stein_solution: need at least 16 quadrature nodes, got " << nodes;
        throw std::invalid_argument(msg.str());
    }
    if (gaussian_samples < 1)
        throw std::invalid_argument("make_stein_solution: need a positive gaussian sample size");
    SteinSolution sol;
    sol.g = std::move(g);
    sol.nodes = nodes;
    sol.gaussian_samples = gaussian_samples;
    sol.seed = seed;
    sol.rule = gauss_legendre_01(nodes);
    RngStream rng(seed);
    sol.z.resize(sol.g.k, gaussian_samples);
    for (std::int64_t s = 0; s < gaussian_samples; ++s)
        for (int i = 0; i < sol.g.k; ++i) sol.z(i, s) = rng.normal();
    double acc = 0.0;
    for (std::int64_t s = 0; s < gaussian_samples; ++s) acc += sol.g.value(sol.z.col(s));
    sol.g_mean_z = acc / static_cast<double>(gaussian_samples);
    return sol;
}

SteinValue stein_evaluate(const SteinSolution& sol, const Eigen::VectorXd& x) {
    if (x.size() != sol.g.k) throw std::invalid_argument("stein_evaluate: wrong point dimension");
    if (!x.allFinite()) throw std::invalid_argument("stein_evaluate: non-finite point");
    const int k = sol.g.k;
    const std::int64_t S = sol.gaussian_samples;
    const bool direct_hessian = static_cast<bool>(sol.g.hessian);

    SteinValue out;
    out.grad = Eigen::VectorXd::Zero(k);
    out.hess = Eigen::MatrixXd::Zero(k, k);

    Eigen::VectorXd z(k);
    // Substitution t = u^2: h and grad integrands are bounded and smooth.
    for (int q = 0; q < sol.nodes; ++q) {
        const double u = sol.rule.nodes[static_cast<std::size_t>(q)];
        const double w = sol.rule.weights[static_cast<std::size_t>(q)];
        const double rt = u;                       // sqrt(t)
        const double r1t = std::sqrt(1.0 - u * u); // sqrt(1-t)
        double acc_g = 0.0;
        Eigen::VectorXd acc_grad = Eigen::VectorXd::Zero(k);
        Eigen::MatrixXd acc_hess = Eigen::MatrixXd::Zero(k, k);
        for (std::int64_t s = 0; s < S; ++s) {
            z = rt * x + r1t * sol.z.col(s);
            acc_g += sol.g.value(z);
            acc_grad += grad_of(sol.g, z);
            if (direct_hessian) acc_hess += sol.g.hessian(z);
        }
        const double inv_s = 1.0 / static_cast<double>(S);
        out.h -= w * (acc_g * inv_s - sol.g_mean_z) / u;
        out.grad -= w * inv_s * acc_grad;
        if (direct_hessian) out.hess -= (w * u * inv_s) * acc_hess;
    }

    if (!direct_hessian) {
        // Integration-by-parts form with substitution 1 - t = s^2.
        for (int q = 0; q < sol.nodes; ++q) {
            const double sq = sol.rule.nodes[static_cast<std::size_t>(q)];
            const double w = sol.rule.weights[static_cast<std::size_t>(q)];
            const double rt = std::sqrt(std::max(1.0 - sq * sq, 0.0));
            Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(k, k);
            for (std::int64_t s = 0; s < S; ++s) {
                z = rt * x + sq * sol.z.col(s);
                acc += sol.z.col(s) * grad_of(sol.g, z).transpose();
            }
            out.hess -= (w / static_cast<double>(S)) * acc;
        }
        out.hess = 0.5 * (out.hess + out.hess.transpose()).eval();
    }
    return out;
}

std::vector<double> stein_residual(const SteinSolution& sol,
                                   const std::vector<Eigen::VectorXd>& points) {
    std::vector<double> res(points.size(), 0.0);
    parallel_points(static_cast<int>(points.size()), default_threads(), [&](int i) {
        const auto& x = points[static_cast<std::size_t>(i)];
        const SteinValue v = stein_evaluate(sol, x);
        res[static_cast<std::size_t>(i)] =
            v.hess.trace() - x.dot(v.grad) - sol.g.value(x) + sol.g_mean_z;
    });
    return res;
}

CharacterizingCheck characterizing_check(const TestFunction& f, std::int64_t samples,
                                         std::uint64_t seed, int threads) {
    const int k = f.k;
    const MeanSe ms = mc_mean_se(samples, seed, threads, [&](RngStream& rng) {
        Eigen::VectorXd z(k);
        for (int i = 0; i < k; ++i) z(i) = rng.normal();
        return hess_of(f, z).trace() - z.dot(grad_of(f, z));
    });
    return {ms.mean, ms.se, ms.samples};
}

HessianLipschitzReport derivative_bound_audit(
    const SteinSolution& sol,
    const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& point_pairs) {
    HessianLipschitzReport rep;
    std::vector<double> ratios(point_pairs.size(), 0.0);
    parallel_points(static_cast<int>(point_pairs.size()), default_threads(), [&](int i) {
        const auto& [x, y] = point_pairs[static_cast<std::size_t>(i)];
        const double dist = (x - y).norm();
        if (dist == 0.0) return;
        const SteinValue vx = stein_evaluate(sol, x);
        const SteinValue vy = stein_evaluate(sol, y);
        ratios[static_cast<std::size_t>(i)] = op_norm(Eigen::MatrixXd(vx.hess - vy.hess)) / dist;
    });
    for (double r : ratios) rep.max_ratio = std::max(rep.max_ratio, r);
    rep.bound = 0.25 * std::sqrt(2.0 * std::numbers::pi) * sol.g.m2;
    rep.within_bound = !std::isnan(sol.g.m2) && rep.max_ratio <= rep.bound * 1.05;

    // Pathology probe: pairs that straddle the diagonal kink at (1, 1).
    const SteinSolution* kink = &sol;
    SteinSolution local;
    if (sol.g.name != "kink") {
        local = make_stein_solution(builtin_test_function("kink", 2), sol.nodes,
                                    sol.gaussian_samples, sol.seed);
        kink = &local;
    }
    Eigen::VectorXd center(2), wdir(2);
    center << 1.0, 1.0;
    wdir << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    rep.kink_distances = {0.1, 0.05, 0.025};
    for (double d : rep.kink_distances) {
        const Eigen::VectorXd p = center + 0.5 * d * wdir;
        const Eigen::VectorXd q = center - 0.5 * d * wdir;
        const SteinValue vp = stein_evaluate(*kink, p);
        const SteinValue vq = stein_evaluate(*kink, q);
        rep.kink_ratios.push_back(op_norm(Eigen::MatrixXd(vp.hess - vq.hess)) / d);
    }
    rep.kink_ratio_grows = rep.kink_ratios.size() == 3 &&
                           rep.kink_ratios[0] < rep.kink_ratios[1] &&
                           rep.kink_ratios[1] < rep.kink_ratios[2];
    return rep;
}

}  // namespace steinpairs
