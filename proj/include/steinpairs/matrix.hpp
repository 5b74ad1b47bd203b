#pragma once

#include <Eigen/Dense>
#include <complex>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace steinpairs {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

// Gram matrix of a matrix family under the Hilbert-Schmidt inner product,
// together with the normalization scale (the common squared norm, usually n).
struct GramData {
    Eigen::MatrixXd gram;  // k x k, symmetric
    double scale = 1.0;

    int k() const { return static_cast<int>(gram.rows()); }
};

// Hilbert-Schmidt inner product Tr(A B^T), resp. Tr(A B*).
double hs_inner(const RealMatrix& a, const RealMatrix& b);
std::complex<double> hs_inner(const ComplexMatrix& a, const ComplexMatrix& b);

double hs_norm(const RealMatrix& a);
double hs_norm(const ComplexMatrix& a);

// Largest singular value. Dense symmetric eigensolve for small matrices,
// power iteration on A^T A (deterministic start, capped iterations) above.
double op_norm(const RealMatrix& a);
double op_norm(const ComplexMatrix& a);

// QR factorization with the diagonal of R forced positive (real) or positive
// real (complex), so that Q of a Ginibre matrix is Haar distributed.
std::pair<RealMatrix, RealMatrix> qr_decompose(const RealMatrix& a);
std::pair<ComplexMatrix, ComplexMatrix> qr_decompose(const ComplexMatrix& a);

// Gram-Schmidt in the Hilbert-Schmidt geometry. Returns matrices A_i with
// <A_i, A_j> = target_norm^2 delta_ij and the lower-triangular D mapping them
// back to the input: B_i = sum_l d_il A_l, so that D D^T equals the scaled
// Gram matrix C = Gram(B) / target_norm^2.
struct GramSchmidtResult {
    std::vector<RealMatrix> family;
    Eigen::MatrixXd d;
};
struct ComplexGramSchmidtResult {
    std::vector<ComplexMatrix> family;
    Eigen::MatrixXcd d;
};
GramSchmidtResult gram_schmidt_hs(const std::vector<RealMatrix>& family, double target_norm);
ComplexGramSchmidtResult gram_schmidt_hs(const std::vector<ComplexMatrix>& family,
                                         double target_norm);

GramData gram_of(const std::vector<RealMatrix>& family, double scale);

// Plain-text serialization: "rows cols real|complex" then row-major entries,
// complex entries as "re im" pairs.
void write_matrix(std::ostream& os, const RealMatrix& a);
void write_matrix(std::ostream& os, const ComplexMatrix& a);
std::string matrix_to_string(const RealMatrix& a);
std::string matrix_to_string(const ComplexMatrix& a);

// Reads either flavor; exactly one of the outputs is filled.
struct ParsedMatrix {
    bool is_complex = false;
    RealMatrix real;
    ComplexMatrix complex;
};
ParsedMatrix read_matrix(std::istream& is);
ParsedMatrix matrix_from_string(const std::string& text);

}  // namespace steinpairs
