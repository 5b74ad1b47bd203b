#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "steinpairs/family.hpp"
#include "steinpairs/parallel.hpp"
#include "steinpairs/rng.hpp"

namespace steinpairs {

enum class PairKind { IidSum, Spherical, OrthogonalProjection, UnitaryProjection };
std::string to_string(PairKind kind);

// A sampled vector law with declared moment metadata (NaN when unknown).
struct VectorLaw {
    int dim = 0;
    std::string name;
    std::function<Eigen::VectorXd(RngStream&)> sample;
    double var_bound_a = std::numeric_limits<double>::quiet_NaN();   // >= Var(|Y|^2)
    double third_moment = std::numeric_limits<double>::quiet_NaN();  // E|Y|^3
    double fourth_moment = std::numeric_limits<double>::quiet_NaN(); // E|Y|^4
};

VectorLaw gaussian_law(int dim);
VectorLaw rademacher_law(int dim);
VectorLaw sphere_law(int dim);  // uniform on the sphere of radius sqrt(dim)

// One draw of an exchangeable pair together with the per-sample quantities
// the audits consume. Complex statistics are realified with coordinates
// (Re W_1, Im W_1, ..., Re W_k, Im W_k).
struct PairDraw {
    Eigen::VectorXd x;
    Eigen::VectorXd x_other;                 // x' (discrete) or x_eps
    Eigen::VectorXd cond_mean_increment;     // closed-form E[x_eps - x | state]; empty for discrete
    Eigen::MatrixXd surrogate;               // per-sample E or F matrix (realified for complex)
    double gamma_norm = 0.0;                 // ||Gamma_raw||_HS (unitary model)
    double lambda_norm = 0.0;                // ||Lambda_raw||_HS (unitary model)
};

class PairModel {
public:
    virtual ~PairModel() = default;
    virtual PairKind kind() const = 0;
    virtual bool continuous() const = 0;
    virtual int k() const = 0;              // nominal statistic dimension
    virtual int statistic_dim() const = 0;  // k, or 2k for complex models
    virtual int ambient() const = 0;        // n
    virtual double sigma2() const = 0;
    // lambda (discrete) or lambda(eps) = eps^2 / n (continuous).
    virtual double lambda(double eps) const = 0;
    virtual PairDraw draw(RngStream& rng, double eps) const = 0;
    // Statistic alone, without the coupled partner (cloud sampling).
    virtual Eigen::VectorXd draw_statistic(RngStream& rng) const = 0;
};

// W = n^{-1/2} sum Y_i with one summand resampled; lambda = 1/n.
std::unique_ptr<PairModel> make_iid_sum_pair(const VectorLaw& y_law, int n);

// First k coordinates of a spherically symmetric Y under a random
// epsilon-rotation; lambda(eps) = eps^2 / n.
std::unique_ptr<PairModel> make_spherical_pair(const VectorLaw& y_law, int k);

// X_i = Tr(A_i M) for Haar orthogonal M; the family must satisfy
// <A_i, A_j> = n delta_ij within 1e-8.
std::unique_ptr<PairModel> make_orthogonal_projection_pair(const ProjectionFamily& family);

// W_i = Tr(A_i M) for Haar unitary M with Tr(A_i A_j^*) = n delta_ij.
std::unique_ptr<PairModel> make_unitary_projection_pair(const ComplexProjectionFamily& family);

struct AuditStat {
    double value = std::numeric_limits<double>::quiet_NaN();
    double se = std::numeric_limits<double>::quiet_NaN();
};

struct MatrixStat {
    Eigen::MatrixXd value;
    Eigen::MatrixXd se;
};

// Simulation audit of the defining conditional-moment identities.
struct ConditionalAudit {
    PairKind kind = PairKind::IidSum;
    int k = 0;
    int n = 0;
    int dim = 0;
    double epsilon = std::numeric_limits<double>::quiet_NaN();
    std::int64_t samples = 0;
    std::uint64_t seed = 0;

    Eigen::MatrixXd slope;     // regression of the rescaled increment on x
    Eigen::MatrixXd slope_se;

    std::string surrogate_kind;  // "analytic" | "jensen"
    AuditStat e_norm;            // discrete model
    AuditStat f_norm;            // continuous real models
    AuditStat gamma_norm;        // unitary model
    AuditStat lambda_norm;       // unitary model
    AuditStat third_moment_over_lambda;

    MatrixStat mean_surrogate;   // mean per-sample E/F matrix
    MatrixStat second_moment;    // mean (1/(2 lambda)) Delta Delta^T
    MatrixStat xxt;              // mean x x^T
    MatrixStat xxt_other;
    Eigen::VectorXd mean_x, mean_other;

    std::string warning;
};

// epsilon is required for continuous models and ignored by the discrete one.
// Fewer than 1000 samples attaches a precision warning instead of failing.
ConditionalAudit audit_pair(const PairModel& model, std::int64_t samples, double epsilon,
                            std::uint64_t seed, int threads = default_threads());

std::string audit_to_json(const ConditionalAudit& audit, int indent = 2);

Eigen::VectorXd realify(const Eigen::VectorXcd& w);

// The 2k x 2k real matrix with blocks
// (1/2) [[Re(g+l), Im(l-g)], [Im(l+g), Re(g-l)]] for g = Gamma_ij, l = Lambda_ij.
Eigen::MatrixXd realified_quadratic_matrix(const Eigen::MatrixXcd& gamma,
                                           const Eigen::MatrixXcd& lambda);

}  // namespace steinpairs
