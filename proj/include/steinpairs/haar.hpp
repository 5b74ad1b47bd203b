#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "steinpairs/matrix.hpp"
#include "steinpairs/parallel.hpp"
#include "steinpairs/rng.hpp"

namespace steinpairs {

// Exact Haar sampling via QR of a Ginibre matrix with corrected diagonal.
RealMatrix sample_orthogonal(int n, RngStream& rng);
ComplexMatrix sample_unitary(int n, RngStream& rng);

// The planar epsilon-rotation used to build continuous exchangeable pairs:
// a_eps = [[sqrt(1-eps^2), eps], [-eps, sqrt(1-eps^2)]] (+) I_{n-2},
// delta = sqrt(1-eps^2) - 1 + eps^2/2,   |delta| <= eps^4 for eps <= 1/2.
struct RotationPerturbation {
    double epsilon = 0.0;
    int dimension = 0;
    RealMatrix a_eps;
    double delta = 0.0;
};
RotationPerturbation make_rotation_perturbation(int n, double epsilon);

inline double rotation_delta(double epsilon) {
    return std::sqrt(1.0 - epsilon * epsilon) - 1.0 + 0.5 * epsilon * epsilon;
}

// Witness of a conjugated rotation u a_eps u^T: the conjugator u, its first
// two columns k_cols, and q = k_cols C2 k_cols^adj with C2 = [[0,1],[-1,0]].
struct ConjugatedRotation {
    RealMatrix u;
    RealMatrix k_cols;
    RealMatrix q;
};
struct ComplexConjugatedRotation {
    ComplexMatrix u;
    ComplexMatrix k_cols;
    ComplexMatrix q;
};

ConjugatedRotation draw_conjugated_rotation(int n, RngStream& rng);
ComplexConjugatedRotation draw_conjugated_rotation_complex(int n, RngStream& rng);

// Applies u a_eps u^adj to the columns of m through the rank-two form
// m + [(-eps^2/2 + delta) k k^adj + eps q] m. Exact, O(n^2 c) for n x c input.
RealMatrix apply_rotation(const ConjugatedRotation& w, double epsilon, const RealMatrix& m);
Eigen::VectorXd apply_rotation(const ConjugatedRotation& w, double epsilon,
                               const Eigen::VectorXd& y);
ComplexMatrix apply_rotation(const ComplexConjugatedRotation& w, double epsilon,
                             const ComplexMatrix& m);

// Exchangeable perturbation of a group element; m must lie in the group
// within 1e-10 and 0 < epsilon <= 1/2.
std::pair<RealMatrix, ConjugatedRotation> conjugated_rotation_pair(const RealMatrix& m,
                                                                   double epsilon,
                                                                   RngStream& rng);
std::pair<ComplexMatrix, ComplexConjugatedRotation> conjugated_rotation_pair(
    const ComplexMatrix& m, double epsilon, RngStream& rng);

// ---------------------------------------------------------------------------
// Exact low-degree moments of Haar matrix entries.

enum class HaarGroup { Orthogonal, Unitary };

struct MomentFactor {
    int row = 1;  // 1-based
    int col = 1;
    bool conj = false;
};

// A product of matrix entries (degree 2 or 4), or of two entries of the
// antisymmetric q matrix above, whose expectation is requested.
struct MomentQuery {
    HaarGroup group = HaarGroup::Orthogonal;
    bool q_entries = false;
    std::vector<MomentFactor> factors;
    int n = 0;
};

// Query strings: "O:u(1,1)u(2,2)@n=5", "U:h(1,1)h*(1,2)@n=6",
// "O:q(1,2)q(1,2)@n=5". A trailing '*' marks a conjugated entry.
MomentQuery parse_moment_query(const std::string& text);
std::string to_string(const MomentQuery& q);

// Exact values per the degree <= 4 Haar entry-moment formulas, evaluated with
// integer arithmetic in n and converted to double at the end.
double orthogonal_moment_oracle(const MomentQuery& q);
double unitary_moment_oracle(const MomentQuery& q);
double moment_oracle(const MomentQuery& q);

struct MomentEstimate {
    double estimate = 0.0;
    double se = 0.0;
    std::int64_t samples = 0;
};

// Sample mean and standard error of the queried entry product over fresh Haar
// draws (real part for unitary queries; supported expectations are real).
MomentEstimate mc_moment_estimate(const MomentQuery& q, std::int64_t samples, std::uint64_t seed,
                                  int threads = default_threads());

// The fixed 30-query battery (10 index patterns at n in {4, 6, 9}) used by
// the haar-check preset and the acceptance suite.
std::vector<std::string> haar_battery_queries();

}  // namespace steinpairs
