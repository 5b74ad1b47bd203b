#pragma once

#include <vector>

#include "steinpairs/matrix.hpp"
#include "steinpairs/rng.hpp"

namespace steinpairs {

// Ordered family of n x n parameter matrices with its Gram data. The pair
// models require hs_inner(mats[i], mats[j]) = n delta_ij; `orthonormal`
// records whether that holds within 1e-8.
struct ProjectionFamily {
    std::vector<RealMatrix> mats;
    GramData gram;
    bool orthonormal = false;

    int k() const { return static_cast<int>(mats.size()); }
    int n() const { return mats.empty() ? 0 : static_cast<int>(mats[0].rows()); }
};

struct ComplexProjectionFamily {
    std::vector<ComplexMatrix> mats;
    Eigen::MatrixXcd gram;
    double scale = 1.0;
    bool orthonormal = false;

    int k() const { return static_cast<int>(mats.size()); }
    int n() const { return mats.empty() ? 0 : static_cast<int>(mats[0].rows()); }
};

ProjectionFamily make_family(std::vector<RealMatrix> mats);
ComplexProjectionFamily make_family(std::vector<ComplexMatrix> mats);

// Orthonormalizes to hs-norm sqrt(n) via gram_schmidt_hs.
ProjectionFamily orthonormalize_family(const ProjectionFamily& family);
ComplexProjectionFamily orthonormalize_family(const ComplexProjectionFamily& family);

// Family of k independent Ginibre matrices orthonormalized to norm sqrt(n).
ProjectionFamily random_orthonormal_family(int k, int n, RngStream& rng);
ComplexProjectionFamily random_orthonormal_complex_family(int k, int n, RngStream& rng);

// Nested diagonal blocks B_i = sqrt(n/a_i) (I_{a_i} (+) 0), 0 < a_1 < ... <= n,
// with <B_i, B_j> = n sqrt(a_min/a_max).
ProjectionFamily diagonal_block_family(const std::vector<int>& a, int n);

}  // namespace steinpairs
