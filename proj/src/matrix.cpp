#include "steinpairs/matrix.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace steinpairs {

namespace {

void check_same_shape(Eigen::Index ar, Eigen::Index ac, Eigen::Index br, Eigen::Index bc) {
    if (ar != br || ac != bc) {
        std::ostringstream msg;
        msg << "hs_inner: shape mismatch (" << ar << "x" << ac << " vs " << br << "x" << bc << ")";
        throw std::invalid_argument(msg.str());
    }
}

// Power iteration on the Gram operator v -> A^H (A v) with a deterministic
// start vector. Stops on the symmetric Rayleigh-quotient residual bound, so
// the returned singular value is accurate to 1e-10 relative.
template <typename Matrix>
double power_iteration_sv(const Matrix& a) {
    using Vector = Eigen::Matrix<typename Matrix::Scalar, Eigen::Dynamic, 1>;
    const Eigen::Index n = a.cols();
    Vector v = Vector::Ones(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) += typename Matrix::Scalar(1.0 / double(i + 2));
    v /= v.norm();

    constexpr int max_iter = 10000;
    constexpr double rel_tol = 1e-10;
    for (int it = 0; it < max_iter; ++it) {
        Vector w = a.adjoint() * (a * v);
        const double rho = std::real(v.dot(w));  // Rayleigh quotient of A^H A
        if (rho <= 0.0) return 0.0;
        const double resid = (w - typename Matrix::Scalar(rho) * v).norm();
        if (resid <= rel_tol * rho) return std::sqrt(rho);
        v = w / w.norm();
    }
    std::ostringstream msg;
    msg << "op_norm: power iteration did not converge within " << max_iter << " iterations";
    throw std::runtime_error(msg.str());
}

template <typename Matrix>
double op_norm_impl(const Matrix& a) {
    if (!a.allFinite()) throw std::invalid_argument("op_norm: matrix has non-finite entries");
    if (a.rows() == 0 || a.cols() == 0) return 0.0;
    const Eigen::Index small_side = std::min(a.rows(), a.cols());
    if (small_side <= 64) {
        // Eigensolve of the smaller Gram matrix.
        if (a.cols() <= a.rows()) {
            Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(a.adjoint() * a));
            return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
        }
        Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(a * a.adjoint()));
        return std::sqrt(std::max(es.eigenvalues().maxCoeff(), 0.0));
    }
    return power_iteration_sv(a);
}

template <typename Matrix, typename Result>
Result gram_schmidt_impl(const std::vector<Matrix>& family, double target_norm) {
    using Scalar = typename Matrix::Scalar;
    const int k = static_cast<int>(family.size());
    if (k == 0) throw std::invalid_argument("gram_schmidt_hs: empty family");
    if (!(target_norm > 0.0)) throw std::invalid_argument("gram_schmidt_hs: target_norm must be positive");
    const Eigen::Index rows = family[0].rows();
    const Eigen::Index cols = family[0].cols();
    for (const auto& m : family) check_same_shape(rows, cols, m.rows(), m.cols());

    const double tau2 = target_norm * target_norm;
    Result out;
    out.family.reserve(family.size());
    out.d.setZero(k, k);

    double leading_pivot = 0.0;
    for (int i = 0; i < k; ++i) {
        Matrix v = family[i];
        for (int l = 0; l < i; ++l) {
            const Scalar coeff = hs_inner(family[i], out.family[l]) / tau2;
            out.d(i, l) = coeff;
            v -= coeff * out.family[l];
        }
        const double r = hs_norm(v);
        if (i == 0) leading_pivot = r;
        if (r <= 1e-12 * leading_pivot) {
            std::ostringstream msg;
            msg << "gram_schmidt_hs: family is linearly dependent at index " << i
                << " (pivot " << r << ")";
            throw std::invalid_argument(msg.str());
        }
        out.d(i, i) = r / target_norm;
        out.family.push_back(v * (target_norm / r));
    }
    return out;
}

}  // namespace

double hs_inner(const RealMatrix& a, const RealMatrix& b) {
    check_same_shape(a.rows(), a.cols(), b.rows(), b.cols());
    return a.cwiseProduct(b).sum();
}

std::complex<double> hs_inner(const ComplexMatrix& a, const ComplexMatrix& b) {
    check_same_shape(a.rows(), a.cols(), b.rows(), b.cols());
    return a.cwiseProduct(b.conjugate()).sum();
}

double hs_norm(const RealMatrix& a) { return a.norm(); }
double hs_norm(const ComplexMatrix& a) { return a.norm(); }

double op_norm(const RealMatrix& a) { return op_norm_impl(a); }
double op_norm(const ComplexMatrix& a) { return op_norm_impl(a); }

std::pair<RealMatrix, RealMatrix> qr_decompose(const RealMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("qr_decompose: matrix must be square");
    Eigen::HouseholderQR<RealMatrix> qr(a);
    RealMatrix q = qr.householderQ();
    RealMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const double d = r(i, i);
        if (std::abs(d) < 1e-13 * std::max(1.0, hs_norm(a))) {
            std::ostringstream msg;
            msg << "qr_decompose: matrix is rank deficient (|r_" << i << i << "| = " << std::abs(d) << ")";
            throw std::invalid_argument(msg.str());
        }
        if (d < 0.0) {
            r.row(i) = -r.row(i);
            q.col(i) = -q.col(i);
        }
    }
    return {std::move(q), std::move(r)};
}

std::pair<ComplexMatrix, ComplexMatrix> qr_decompose(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("qr_decompose: matrix must be square");
    Eigen::HouseholderQR<ComplexMatrix> qr(a);
    ComplexMatrix q = qr.householderQ();
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        const std::complex<double> d = r(i, i);
        const double mag = std::abs(d);
        if (mag < 1e-13 * std::max(1.0, hs_norm(a))) {
            std::ostringstream msg;
            msg << "qr_decompose: matrix is rank deficient (|r_" << i << i << "| = " << mag << ")";
            throw std::invalid_argument(msg.str());
        }
        const std::complex<double> phase = d / mag;
        r.row(i) *= std::conj(phase);
        q.col(i) *= phase;
    }
    return {std::move(q), std::move(r)};
}

GramSchmidtResult gram_schmidt_hs(const std::vector<RealMatrix>& family, double target_norm) {
    return gram_schmidt_impl<RealMatrix, GramSchmidtResult>(family, target_norm);
}

ComplexGramSchmidtResult gram_schmidt_hs(const std::vector<ComplexMatrix>& family,
                                         double target_norm) {
    return gram_schmidt_impl<ComplexMatrix, ComplexGramSchmidtResult>(family, target_norm);
}

GramData gram_of(const std::vector<RealMatrix>& family, double scale) {
    const int k = static_cast<int>(family.size());
    GramData g;
    g.scale = scale;
    g.gram.setZero(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = hs_inner(family[i], family[j]);
            g.gram(i, j) = v;
            g.gram(j, i) = v;
        }
    return g;
}

namespace {

template <typename Matrix>
void write_matrix_impl(std::ostream& os, const Matrix& a, const char* kind) {
    os << a.rows() << ' ' << a.cols() << ' ' << kind << '\n';
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            if (j) os << ' ';
            if constexpr (std::is_same_v<typename Matrix::Scalar, double>) {
                os << a(i, j);
            } else {
                os << a(i, j).real() << ' ' << a(i, j).imag();
            }
        }
        os << '\n';
    }
}

}  // namespace

void write_matrix(std::ostream& os, const RealMatrix& a) { write_matrix_impl(os, a, "real"); }
void write_matrix(std::ostream& os, const ComplexMatrix& a) { write_matrix_impl(os, a, "complex"); }

std::string matrix_to_string(const RealMatrix& a) {
    std::ostringstream os;
    write_matrix(os, a);
    return os.str();
}

std::string matrix_to_string(const ComplexMatrix& a) {
    std::ostringstream os;
    write_matrix(os, a);
    return os.str();
}

ParsedMatrix read_matrix(std::istream& is) {
    Eigen::Index rows = 0, cols = 0;
    std::string kind;
    if (!(is >> rows >> cols >> kind)) throw std::invalid_argument("read_matrix: malformed header");
    if (rows < 0 || cols < 0) throw std::invalid_argument("read_matrix: negative dimensions");
    ParsedMatrix out;
    if (kind == "real") {
        out.real.resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j)
                if (!(is >> out.real(i, j))) throw std::invalid_argument("read_matrix: truncated entries");
    } else if (kind == "complex") {
        out.is_complex = true;
        out.complex.resize(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i)
            for (Eigen::Index j = 0; j < cols; ++j) {
                double re, im;
                if (!(is >> re >> im)) throw std::invalid_argument("read_matrix: truncated entries");
                out.complex(i, j) = {re, im};
            }
    } else {
        throw std::invalid_argument("read_matrix: unknown kind '" + kind + "'");
    }
    return out;
}

ParsedMatrix matrix_from_string(const std::string& text) {
    std::istringstream is(text);
    return read_matrix(is);
}

}  // namespace steinpairs
