#include "steinpairs/pairs.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "steinpairs/haar.hpp"

namespace steinpairs {

std::string to_string(PairKind kind) {
    switch (kind) {
        case PairKind::IidSum: return "iid_sum";
        case PairKind::Spherical: return "spherical";
        case PairKind::OrthogonalProjection: return "orthogonal_projection";
        case PairKind::UnitaryProjection: return "unitary_projection";
    }
    return "unknown";
}

VectorLaw gaussian_law(int dim) {
    if (dim < 1) throw std::invalid_argument("gaussian_law: dim must be >= 1");
    VectorLaw law;
    law.dim = dim;
    law.name = "gaussian";
    law.sample = [dim](RngStream& rng) {
        Eigen::VectorXd y(dim);
        for (int i = 0; i < dim; ++i) y(i) = rng.normal();
        return y;
    };
    const double k = static_cast<double>(dim);
    law.var_bound_a = 2.0 * k;  // Var(chi^2_k)
    law.fourth_moment = k * k + 2.0 * k;
    law.third_moment = std::pow(2.0, 1.5) * std::tgamma((k + 3.0) / 2.0) / std::tgamma(k / 2.0);
    return law;
}

VectorLaw rademacher_law(int dim) {
    if (dim < 1) throw std::invalid_argument("rademacher_law: dim must be >= 1");
    VectorLaw law;
    law.dim = dim;
    law.name = "rademacher";
    law.sample = [dim](RngStream& rng) {
        Eigen::VectorXd y(dim);
        for (int i = 0; i < dim; ++i) y(i) = rng.uniform() < 0.5 ? -1.0 : 1.0;
        return y;
    };
    const double k = static_cast<double>(dim);
    law.var_bound_a = 0.0;  // |Y|^2 = k almost surely
    law.fourth_moment = k * k;
    law.third_moment = std::pow(k, 1.5);
    return law;
}

VectorLaw sphere_law(int dim) {
    if (dim < 1) throw std::invalid_argument("sphere_law: dim must be >= 1");
    VectorLaw law;
    law.dim = dim;
    law.name = "sphere";
    law.sample = [dim](RngStream& rng) {
        Eigen::VectorXd y(dim);
        double norm2 = 0.0;
        do {
            for (int i = 0; i < dim; ++i) y(i) = rng.normal();
            norm2 = y.squaredNorm();
        } while (norm2 == 0.0);
        return (y * std::sqrt(static_cast<double>(dim) / norm2)).eval();
    };
    const double n = static_cast<double>(dim);
    law.var_bound_a = 0.0;  // |Y|^2 = n exactly
    law.fourth_moment = n * n;
    law.third_moment = std::pow(n, 1.5);
    return law;
}

Eigen::VectorXd realify(const Eigen::VectorXcd& w) {
    Eigen::VectorXd r(2 * w.size());
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        r(2 * i) = w(i).real();
        r(2 * i + 1) = w(i).imag();
    }
    return r;
}

Eigen::MatrixXd realified_quadratic_matrix(const Eigen::MatrixXcd& gamma,
                                           const Eigen::MatrixXcd& lambda) {
    const Eigen::Index k = gamma.rows();
    Eigen::MatrixXd f(2 * k, 2 * k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) {
            const std::complex<double> g = gamma(i, j);
            const std::complex<double> l = lambda(i, j);
            f(2 * i, 2 * j) = 0.5 * (g.real() + l.real());
            f(2 * i, 2 * j + 1) = 0.5 * (l.imag() - g.imag());
            f(2 * i + 1, 2 * j) = 0.5 * (l.imag() + g.imag());
            f(2 * i + 1, 2 * j + 1) = 0.5 * (g.real() - l.real());
        }
    return f;
}

namespace {

double trace_product(const RealMatrix& a, const RealMatrix& m) {
    return a.cwiseProduct(m.transpose()).sum();
}

std::complex<double> trace_product(const ComplexMatrix& a, const ComplexMatrix& m) {
    return a.cwiseProduct(m.transpose()).sum();
}

// (-eps^2/2 + delta(eps)) * (2/n): the exact group average of the rotation
// increment applied to the statistic.
double rotation_shrink_coeff(double eps, int n) {
    return (-0.5 * eps * eps + rotation_delta(eps)) * 2.0 / static_cast<double>(n);
}

class IidSumPair final : public PairModel {
public:
    IidSumPair(VectorLaw law, int n) : law_(std::move(law)), n_(n) {
        if (n_ < 1) throw std::invalid_argument("make_iid_sum_pair: n must be >= 1");
        if (law_.dim < 1) throw std::invalid_argument("make_iid_sum_pair: law dimension must be >= 1");
    }
    PairKind kind() const override { return PairKind::IidSum; }
    bool continuous() const override { return false; }
    int k() const override { return law_.dim; }
    int statistic_dim() const override { return law_.dim; }
    int ambient() const override { return n_; }
    double sigma2() const override { return 1.0; }
    double lambda(double) const override { return 1.0 / static_cast<double>(n_); }

    PairDraw draw(RngStream& rng, double) const override {
        const int k = law_.dim;
        const double root_n = std::sqrt(static_cast<double>(n_));
        Eigen::MatrixXd ys(k, n_);
        Eigen::VectorXd w = Eigen::VectorXd::Zero(k);
        for (int i = 0; i < n_; ++i) {
            ys.col(i) = law_.sample(rng);
            w += ys.col(i);
        }
        w /= root_n;
        const int idx = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(n_)));
        const Eigen::VectorXd fresh = law_.sample(rng);

        PairDraw d;
        d.x = w;
        d.x_other = w + (fresh - ys.col(idx)) / root_n;
        Eigen::MatrixXd e = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < n_; ++i) e += ys.col(i) * ys.col(i).transpose();
        e -= static_cast<double>(n_) * Eigen::MatrixXd::Identity(k, k);
        d.surrogate = e / (2.0 * static_cast<double>(n_));
        return d;
    }

    Eigen::VectorXd draw_statistic(RngStream& rng) const override {
        Eigen::VectorXd w = Eigen::VectorXd::Zero(law_.dim);
        for (int i = 0; i < n_; ++i) w += law_.sample(rng);
        return w / std::sqrt(static_cast<double>(n_));
    }

private:
    VectorLaw law_;
    int n_;
};

class SphericalPair final : public PairModel {
public:
    SphericalPair(VectorLaw law, int k) : law_(std::move(law)), k_(k) {
        if (k_ < 1 || k_ > law_.dim)
            throw std::invalid_argument("make_spherical_pair: need 1 <= k <= dim(Y)");
        if (law_.dim < 2)
            throw std::invalid_argument("make_spherical_pair: the rotation coupling needs n >= 2");
    }
    PairKind kind() const override { return PairKind::Spherical; }
    bool continuous() const override { return true; }
    int k() const override { return k_; }
    int statistic_dim() const override { return k_; }
    int ambient() const override { return law_.dim; }
    double sigma2() const override { return 1.0; }
    double lambda(double eps) const override { return eps * eps / static_cast<double>(law_.dim); }

    PairDraw draw(RngStream& rng, double eps) const override {
        const int n = law_.dim;
        const Eigen::VectorXd y = law_.sample(rng);
        const auto witness = draw_conjugated_rotation(n, rng);
        const Eigen::VectorXd y_eps = apply_rotation(witness, eps, y);

        PairDraw d;
        d.x = y.head(k_);
        d.x_other = y_eps.head(k_);
        d.cond_mean_increment = rotation_shrink_coeff(eps, n) * d.x;
        Eigen::MatrixXd f = -d.x * d.x.transpose();
        f += (y.squaredNorm() - static_cast<double>(n - 1)) *
             Eigen::MatrixXd::Identity(k_, k_);
        d.surrogate = f / static_cast<double>(n - 1);
        return d;
    }

    Eigen::VectorXd draw_statistic(RngStream& rng) const override {
        return law_.sample(rng).head(k_);
    }

private:
    VectorLaw law_;
    int k_;
};

class OrthogonalProjectionPair final : public PairModel {
public:
    explicit OrthogonalProjectionPair(ProjectionFamily family) : fam_(std::move(family)) {
        if (fam_.n() < 2)
            throw std::invalid_argument("make_orthogonal_projection_pair: needs n >= 2");
        if (!fam_.orthonormal) {
            double dev = 0.0;
            const double n = static_cast<double>(fam_.n());
            for (int i = 0; i < fam_.k(); ++i)
                for (int j = 0; j <= i; ++j)
                    dev = std::max(dev, std::abs(fam_.gram.gram(i, j) - (i == j ? n : 0.0)));
            std::ostringstream msg;
            msg << "make_orthogonal_projection_pair: family is not orthonormalized to norm "
                   "sqrt(n) (max Gram deviation "
                << dev << "); run gram_schmidt_hs first";
            throw std::invalid_argument(msg.str());
        }
    }
    PairKind kind() const override { return PairKind::OrthogonalProjection; }
    bool continuous() const override { return true; }
    int k() const override { return fam_.k(); }
    int statistic_dim() const override { return fam_.k(); }
    int ambient() const override { return fam_.n(); }
    double sigma2() const override { return 1.0; }
    double lambda(double eps) const override { return eps * eps / static_cast<double>(fam_.n()); }

    PairDraw draw(RngStream& rng, double eps) const override {
        const int n = fam_.n();
        const int k = fam_.k();
        const RealMatrix m = sample_orthogonal(n, rng);
        const auto witness = draw_conjugated_rotation(n, rng);
        const RealMatrix m_eps = apply_rotation(witness, eps, m);

        PairDraw d;
        d.x.resize(k);
        d.x_other.resize(k);
        for (int i = 0; i < k; ++i) {
            d.x(i) = trace_product(fam_.mats[i], m);
            d.x_other(i) = trace_product(fam_.mats[i], m_eps);
        }
        d.cond_mean_increment = rotation_shrink_coeff(eps, n) * d.x;
        d.surrogate.resize(k, k);
        for (int j = 0; j < k; ++j) {
            const RealMatrix mam = m * fam_.mats[j] * m;
            for (int i = 0; i < k; ++i) {
                const double t = trace_product(fam_.mats[i], mam);
                d.surrogate(i, j) = ((i == j ? 1.0 : 0.0) - t) / static_cast<double>(n - 1);
            }
        }
        return d;
    }

    Eigen::VectorXd draw_statistic(RngStream& rng) const override {
        const RealMatrix m = sample_orthogonal(fam_.n(), rng);
        Eigen::VectorXd x(fam_.k());
        for (int i = 0; i < fam_.k(); ++i) x(i) = trace_product(fam_.mats[i], m);
        return x;
    }

private:
    ProjectionFamily fam_;
};

class UnitaryProjectionPair final : public PairModel {
public:
    explicit UnitaryProjectionPair(ComplexProjectionFamily family) : fam_(std::move(family)) {
        if (fam_.n() < 2)
            throw std::invalid_argument("make_unitary_projection_pair: needs n >= 2");
        if (!fam_.orthonormal)
            throw std::invalid_argument(
                "make_unitary_projection_pair: family must satisfy Tr(A_i A_j^*) = n delta_ij "
                "within 1e-8");
    }
    PairKind kind() const override { return PairKind::UnitaryProjection; }
    bool continuous() const override { return true; }
    int k() const override { return fam_.k(); }
    int statistic_dim() const override { return 2 * fam_.k(); }
    int ambient() const override { return fam_.n(); }
    double sigma2() const override { return 0.5; }
    double lambda(double eps) const override { return eps * eps / static_cast<double>(fam_.n()); }

    PairDraw draw(RngStream& rng, double eps) const override {
        const int n = fam_.n();
        const int k = fam_.k();
        const ComplexMatrix m = sample_unitary(n, rng);
        const auto witness = draw_conjugated_rotation_complex(n, rng);
        const ComplexMatrix m_eps = apply_rotation(witness, eps, m);

        Eigen::VectorXcd w(k), w_eps(k);
        for (int i = 0; i < k; ++i) {
            w(i) = trace_product(fam_.mats[i], m);
            w_eps(i) = trace_product(fam_.mats[i], m_eps);
        }
        PairDraw d;
        d.x = realify(w);
        d.x_other = realify(w_eps);
        d.cond_mean_increment = rotation_shrink_coeff(eps, n) * d.x;

        const double denom = static_cast<double>(n - 1) * static_cast<double>(n + 1);
        Eigen::MatrixXcd gamma(k, k), lambda(k, k);
        for (int j = 0; j < k; ++j) {
            const ComplexMatrix mam = m * fam_.mats[j] * m;
            for (int i = 0; i < k; ++i) {
                const std::complex<double> tr_ij = trace_product(fam_.mats[i], mam);
                gamma(i, j) = ((i == j ? 1.0 : 0.0) - w(i) * std::conj(w(j))) / denom;
                lambda(i, j) = (w(i) * w(j) - static_cast<double>(n) * tr_ij) / denom;
            }
        }
        d.surrogate = realified_quadratic_matrix(gamma, lambda);
        d.gamma_norm = gamma.norm();
        d.lambda_norm = lambda.norm();
        return d;
    }

    Eigen::VectorXd draw_statistic(RngStream& rng) const override {
        const ComplexMatrix m = sample_unitary(fam_.n(), rng);
        Eigen::VectorXcd w(fam_.k());
        for (int i = 0; i < fam_.k(); ++i) w(i) = trace_product(fam_.mats[i], m);
        return realify(w);
    }

private:
    ComplexProjectionFamily fam_;
};

}  // namespace

std::unique_ptr<PairModel> make_iid_sum_pair(const VectorLaw& y_law, int n) {
    return std::make_unique<IidSumPair>(y_law, n);
}

std::unique_ptr<PairModel> make_spherical_pair(const VectorLaw& y_law, int k) {
    return std::make_unique<SphericalPair>(y_law, k);
}

std::unique_ptr<PairModel> make_orthogonal_projection_pair(const ProjectionFamily& family) {
    return std::make_unique<OrthogonalProjectionPair>(family);
}

std::unique_ptr<PairModel> make_unitary_projection_pair(const ComplexProjectionFamily& family) {
    return std::make_unique<UnitaryProjectionPair>(family);
}

namespace {

struct AuditAccumulator {
    Eigen::MatrixXd sxx, sdx;
    Eigen::VectorXd sdd;
    Eigen::MatrixXd surr_sum, surr_sq;
    Eigen::MatrixXd smom_sum, smom_sq;
    Eigen::MatrixXd xxt_sum, xxt_sq;
    Eigen::MatrixXd xot_sum, xot_sq;
    Eigen::VectorXd x_sum, xo_sum;
    double norm_sum = 0.0, norm_sq = 0.0;
    double gam_sum = 0.0, gam_sq = 0.0;
    double lam_sum = 0.0, lam_sq = 0.0;
    double third_sum = 0.0, third_sq = 0.0;

    explicit AuditAccumulator(int dim) {
        sxx.setZero(dim, dim);
        sdx.setZero(dim, dim);
        sdd.setZero(dim);
        surr_sum.setZero(dim, dim);
        surr_sq.setZero(dim, dim);
        smom_sum.setZero(dim, dim);
        smom_sq.setZero(dim, dim);
        xxt_sum.setZero(dim, dim);
        xxt_sq.setZero(dim, dim);
        xot_sum.setZero(dim, dim);
        xot_sq.setZero(dim, dim);
        x_sum.setZero(dim);
        xo_sum.setZero(dim);
    }

    void merge(const AuditAccumulator& o) {
        sxx += o.sxx;
        sdx += o.sdx;
        sdd += o.sdd;
        surr_sum += o.surr_sum;
        surr_sq += o.surr_sq;
        smom_sum += o.smom_sum;
        smom_sq += o.smom_sq;
        xxt_sum += o.xxt_sum;
        xxt_sq += o.xxt_sq;
        xot_sum += o.xot_sum;
        xot_sq += o.xot_sq;
        x_sum += o.x_sum;
        xo_sum += o.xo_sum;
        norm_sum += o.norm_sum;
        norm_sq += o.norm_sq;
        gam_sum += o.gam_sum;
        gam_sq += o.gam_sq;
        lam_sum += o.lam_sum;
        lam_sq += o.lam_sq;
        third_sum += o.third_sum;
        third_sq += o.third_sq;
    }
};

MatrixStat matrix_stat(const Eigen::MatrixXd& sum, const Eigen::MatrixXd& sq, std::int64_t n) {
    MatrixStat s;
    const double dn = static_cast<double>(n);
    s.value = sum / dn;
    s.se = ((sq / dn - s.value.cwiseProduct(s.value)).cwiseMax(0.0) / std::max(dn - 1.0, 1.0))
               .cwiseSqrt();
    return s;
}

AuditStat scalar_stat(double sum, double sq, std::int64_t n) {
    const double dn = static_cast<double>(n);
    AuditStat s;
    s.value = sum / dn;
    const double var = (sq - dn * s.value * s.value) / std::max(dn - 1.0, 1.0);
    s.se = std::sqrt(std::max(var, 0.0) / dn);
    return s;
}

}  // namespace

ConditionalAudit audit_pair(const PairModel& model, std::int64_t samples, double epsilon,
                            std::uint64_t seed, int threads) {
    if (samples < 2) throw std::invalid_argument("audit_pair: need at least 2 samples");
    if (model.continuous()) {
        if (!(epsilon > 0.0 && epsilon <= 0.5))
            throw std::invalid_argument(
                "audit_pair: continuous models require epsilon in (0, 1/2]");
    }
    const int dim = model.statistic_dim();
    const double lam = model.lambda(epsilon);
    const bool unitary = model.kind() == PairKind::UnitaryProjection;

    std::vector<AuditAccumulator> accs(kMonteCarloStrips, AuditAccumulator(dim));
    for_each_strip(samples, seed, threads, [&](int s, std::int64_t, std::int64_t count, RngStream& rng) {
        AuditAccumulator& a = accs[static_cast<std::size_t>(s)];
        for (std::int64_t i = 0; i < count; ++i) {
            const PairDraw d = model.draw(rng, epsilon);
            const Eigen::VectorXd delta = d.x_other - d.x;
            const Eigen::VectorXd rescaled =
                (model.continuous() ? d.cond_mean_increment : delta) / lam;

            a.sxx += d.x * d.x.transpose();
            a.sdx += rescaled * d.x.transpose();
            a.sdd += rescaled.cwiseProduct(rescaled);

            const double nrm = d.surrogate.norm();
            a.norm_sum += nrm;
            a.norm_sq += nrm * nrm;
            if (unitary) {
                a.gam_sum += d.gamma_norm;
                a.gam_sq += d.gamma_norm * d.gamma_norm;
                a.lam_sum += d.lambda_norm;
                a.lam_sq += d.lambda_norm * d.lambda_norm;
            }
            const double third = std::pow(delta.norm(), 3.0) / lam;
            a.third_sum += third;
            a.third_sq += third * third;

            a.surr_sum += d.surrogate;
            a.surr_sq += d.surrogate.cwiseProduct(d.surrogate);
            const Eigen::MatrixXd smom = (0.5 / lam) * delta * delta.transpose();
            a.smom_sum += smom;
            a.smom_sq += smom.cwiseProduct(smom);
            a.xxt_sum += d.x * d.x.transpose();
            a.xxt_sq += (d.x * d.x.transpose()).cwiseProduct(d.x * d.x.transpose());
            a.xot_sum += d.x_other * d.x_other.transpose();
            a.xot_sq += (d.x_other * d.x_other.transpose()).cwiseProduct(d.x_other * d.x_other.transpose());
            a.x_sum += d.x;
            a.xo_sum += d.x_other;
        }
    });

    AuditAccumulator total(dim);
    for (const auto& a : accs) total.merge(a);

    ConditionalAudit audit;
    audit.kind = model.kind();
    audit.k = model.k();
    audit.n = model.ambient();
    audit.dim = dim;
    audit.epsilon = model.continuous() ? epsilon : std::numeric_limits<double>::quiet_NaN();
    audit.samples = samples;
    audit.seed = seed;
    if (samples < 1000)
        audit.warning = "fewer than 1000 samples; audit estimates are low-precision";

    const Eigen::MatrixXd sxx_inv = total.sxx.ldlt().solve(
        Eigen::MatrixXd::Identity(dim, dim));
    audit.slope = total.sdx * sxx_inv;
    audit.slope_se.resize(dim, dim);
    const double dof = std::max(static_cast<double>(samples - dim), 1.0);
    for (int i = 0; i < dim; ++i) {
        const double rss =
            std::max(total.sdd(i) - audit.slope.row(i).dot(total.sdx.row(i)), 0.0);
        const double sigma2_i = rss / dof;
        for (int j = 0; j < dim; ++j)
            audit.slope_se(i, j) = std::sqrt(std::max(sigma2_i * sxx_inv(j, j), 0.0));
    }

    audit.surrogate_kind =
        (model.kind() == PairKind::IidSum || model.kind() == PairKind::Spherical) ? "jensen"
                                                                                  : "analytic";
    if (model.kind() == PairKind::IidSum) {
        audit.e_norm = scalar_stat(total.norm_sum, total.norm_sq, samples);
    } else if (unitary) {
        audit.gamma_norm = scalar_stat(total.gam_sum, total.gam_sq, samples);
        audit.lambda_norm = scalar_stat(total.lam_sum, total.lam_sq, samples);
    } else {
        audit.f_norm = scalar_stat(total.norm_sum, total.norm_sq, samples);
    }
    audit.third_moment_over_lambda = scalar_stat(total.third_sum, total.third_sq, samples);

    audit.mean_surrogate = matrix_stat(total.surr_sum, total.surr_sq, samples);
    audit.second_moment = matrix_stat(total.smom_sum, total.smom_sq, samples);
    audit.xxt = matrix_stat(total.xxt_sum, total.xxt_sq, samples);
    audit.xxt_other = matrix_stat(total.xot_sum, total.xot_sq, samples);
    audit.mean_x = total.x_sum / static_cast<double>(samples);
    audit.mean_other = total.xo_sum / static_cast<double>(samples);
    return audit;
}

namespace {

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

}  // namespace

std::string audit_to_json(const ConditionalAudit& audit, int indent) {
    nlohmann::json j;
    j["model"] = to_string(audit.kind);
    j["k"] = audit.k;
    j["n"] = audit.n;
    if (std::isnan(audit.epsilon)) j["epsilon"] = nullptr;
    else j["epsilon"] = audit.epsilon;
    j["slope_matrix"] = matrix_json(audit.slope);
    nlohmann::json surrs = nlohmann::json::array();
    auto add = [&](const char* name, const AuditStat& s) {
        if (std::isnan(s.value)) return;
        surrs.push_back({{"name", name},
                         {"type", audit.surrogate_kind},
                         {"value", s.value},
                         {"se", s.se}});
    };
    add("e_norm", audit.e_norm);
    add("f_norm", audit.f_norm);
    add("gamma_norm", audit.gamma_norm);
    add("lambda_norm", audit.lambda_norm);
    j["surrogates"] = surrs;
    j["third_moment"] = {{"value", audit.third_moment_over_lambda.value},
                         {"se", audit.third_moment_over_lambda.se}};
    j["samples"] = audit.samples;
    j["seed"] = audit.seed;
    if (!audit.warning.empty()) j["warning"] = audit.warning;
    return j.dump(indent);
}

}  // namespace steinpairs
