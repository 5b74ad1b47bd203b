#include "steinpairs/family.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace steinpairs {

namespace {

template <typename Family>
void fill_gram_and_flag(Family& f) {
    const int k = f.k();
    const double n = static_cast<double>(f.n());
    bool ortho = true;
    if constexpr (std::is_same_v<Family, ProjectionFamily>) {
        f.gram = gram_of(f.mats, n);
        for (int i = 0; i < k && ortho; ++i)
            for (int j = 0; j <= i; ++j) {
                const double want = (i == j) ? n : 0.0;
                if (std::abs(f.gram.gram(i, j) - want) > 1e-8) {
                    ortho = false;
                    break;
                }
            }
    } else {
        f.scale = n;
        f.gram.setZero(k, k);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < k; ++j) f.gram(i, j) = hs_inner(f.mats[i], f.mats[j]);
        for (int i = 0; i < k && ortho; ++i)
            for (int j = 0; j <= i; ++j) {
                const std::complex<double> want = (i == j) ? n : 0.0;
                if (std::abs(f.gram(i, j) - want) > 1e-8) {
                    ortho = false;
                    break;
                }
            }
    }
    f.orthonormal = ortho;
}

}  // namespace

ProjectionFamily make_family(std::vector<RealMatrix> mats) {
    if (mats.empty()) throw std::invalid_argument("make_family: empty family");
    ProjectionFamily f;
    f.mats = std::move(mats);
    fill_gram_and_flag(f);
    return f;
}

ComplexProjectionFamily make_family(std::vector<ComplexMatrix> mats) {
    if (mats.empty()) throw std::invalid_argument("make_family: empty family");
    ComplexProjectionFamily f;
    f.mats = std::move(mats);
    fill_gram_and_flag(f);
    return f;
}

ProjectionFamily orthonormalize_family(const ProjectionFamily& family) {
    const double root_n = std::sqrt(static_cast<double>(family.n()));
    auto gs = gram_schmidt_hs(family.mats, root_n);
    return make_family(std::move(gs.family));
}

ComplexProjectionFamily orthonormalize_family(const ComplexProjectionFamily& family) {
    const double root_n = std::sqrt(static_cast<double>(family.n()));
    auto gs = gram_schmidt_hs(family.mats, root_n);
    return make_family(std::move(gs.family));
}

ProjectionFamily random_orthonormal_family(int k, int n, RngStream& rng) {
    std::vector<RealMatrix> mats;
    mats.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        RealMatrix m(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m(r, c) = rng.normal();
        mats.push_back(std::move(m));
    }
    auto gs = gram_schmidt_hs(mats, std::sqrt(static_cast<double>(n)));
    return make_family(std::move(gs.family));
}

ComplexProjectionFamily random_orthonormal_complex_family(int k, int n, RngStream& rng) {
    std::vector<ComplexMatrix> mats;
    mats.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
        ComplexMatrix m(n, n);
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m(r, c) = rng.complex_normal();
        mats.push_back(std::move(m));
    }
    auto gs = gram_schmidt_hs(mats, std::sqrt(static_cast<double>(n)));
    return make_family(std::move(gs.family));
}

ProjectionFamily diagonal_block_family(const std::vector<int>& a, int n) {
    if (a.empty()) throw std::invalid_argument("diagonal_block_family: empty size list");
    int prev = 0;
    for (int ai : a) {
        if (ai <= prev || ai > n) {
            std::ostringstream msg;
            msg << "diagonal_block_family: sizes must be strictly increasing in (0, n]; got " << ai;
            throw std::invalid_argument(msg.str());
        }
        prev = ai;
    }
    std::vector<RealMatrix> mats;
    mats.reserve(a.size());
    for (int ai : a) {
        RealMatrix b = RealMatrix::Zero(n, n);
        const double v = std::sqrt(static_cast<double>(n) / static_cast<double>(ai));
        for (int i = 0; i < ai; ++i) b(i, i) = v;
        mats.push_back(std::move(b));
    }
    return make_family(std::move(mats));
}

}  // namespace steinpairs
