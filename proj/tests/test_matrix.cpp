#include <doctest.h>

#include <cmath>
#include <sstream>

#include "steinpairs/family.hpp"
#include "steinpairs/matrix.hpp"
#include "test_util.hpp"

using namespace steinpairs;
using test_util::random_matrix;
using test_util::random_complex_matrix;

TEST_SUITE_BEGIN("matrix");

TEST_CASE("hs_inner basics") {
    const int n = 5;
    CHECK(hs_inner(RealMatrix(RealMatrix::Identity(n, n)), RealMatrix(RealMatrix::Identity(n, n))) ==
          doctest::Approx(5.0));

    RealMatrix a(2, 2), b(2, 2);
    a << 1, 2, 3, 4;
    b << 0, 1, 1, 0;
    // elementwise-sum oracle: sum_ij a_ij b_ij
    double oracle = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) oracle += a(i, j) * b(i, j);
    CHECK(oracle == doctest::Approx(5.0));
    CHECK(hs_inner(a, b) == doctest::Approx(oracle));

    CHECK_THROWS_AS(hs_inner(a, RealMatrix(RealMatrix::Zero(3, 3))), std::invalid_argument);
}

TEST_CASE("hs_inner on nested diagonal blocks") {
    const int n = 10;
    const std::vector<int> sizes = {2, 5, 10};
    const auto fam = diagonal_block_family(sizes, n);
    for (std::size_t i = 0; i < sizes.size(); ++i)
        for (std::size_t j = i; j < sizes.size(); ++j) {
            const double want = n * std::sqrt(static_cast<double>(sizes[i]) / sizes[j]);
            CHECK(hs_inner(fam.mats[i], fam.mats[j]) == doctest::Approx(want).epsilon(1e-14));
        }
}

TEST_CASE("hs_inner bilinearity and symmetry on random triples") {
    RngStream rng(11);
    for (int rep = 0; rep < 20; ++rep) {
        const auto a = random_matrix(4, 4, rng);
        const auto b = random_matrix(4, 4, rng);
        const auto c = random_matrix(4, 4, rng);
        const double s = rng.normal();
        CHECK(hs_inner(a, b) == doctest::Approx(hs_inner(b, a)));
        CHECK(hs_inner(RealMatrix(a + s * c), b) ==
              doctest::Approx(hs_inner(a, b) + s * hs_inner(c, b)));
        CHECK(std::abs(hs_inner(a, b)) <= hs_norm(a) * hs_norm(b) * (1 + 1e-12));
        CHECK(hs_norm(RealMatrix(a * b)) <= hs_norm(a) * hs_norm(b) * (1 + 1e-12));
        CHECK(op_norm(a) <= hs_norm(a) * (1 + 1e-12));
    }
}

TEST_CASE("hs_inner complex conjugate symmetry") {
    RngStream rng(12);
    for (int rep = 0; rep < 10; ++rep) {
        const auto a = random_complex_matrix(3, 3, rng);
        const auto b = random_complex_matrix(3, 3, rng);
        const auto ab = hs_inner(a, b);
        const auto ba = hs_inner(b, a);
        CHECK(ab.real() == doctest::Approx(ba.real()));
        CHECK(ab.imag() == doctest::Approx(-ba.imag()));
        CHECK(hs_norm(a) == doctest::Approx(std::sqrt(hs_inner(a, a).real())));
    }
}

TEST_CASE("op_norm") {
    CHECK(op_norm(RealMatrix(RealMatrix::Identity(6, 6))) == doctest::Approx(1.0).epsilon(1e-12));
    RealMatrix d = RealMatrix::Zero(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = 1.0;
    CHECK(op_norm(d) == doctest::Approx(3.0).epsilon(1e-12));

    // eigenvalues of (sqrt(a_min/a_max))_ij are at most k
    const std::vector<int> sizes = {2, 3, 5, 8, 13};
    const int k = static_cast<int>(sizes.size());
    RealMatrix c(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j)
            c(i, j) = std::sqrt(static_cast<double>(std::min(sizes[i], sizes[j])) /
                                std::max(sizes[i], sizes[j]));
    CHECK(op_norm(c) <= k * (1 + 1e-12));

    // power-iteration path (above the dense-solver cutoff)
    RngStream rng(13);
    RealMatrix big = RealMatrix::Zero(80, 80);
    for (int i = 0; i < 80; ++i) big(i, i) = 1.0 + i * 0.05;
    CHECK(op_norm(big) == doctest::Approx(1.0 + 79 * 0.05).epsilon(1e-9));
    const auto g = random_matrix(70, 70, rng);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(g);
    CHECK(op_norm(g) == doctest::Approx(svd.singularValues()(0)).epsilon(1e-8));
}

TEST_CASE("qr_decompose") {
    const auto [qi, ri] = qr_decompose(RealMatrix(RealMatrix::Identity(4, 4)));
    CHECK((qi - RealMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((ri - RealMatrix::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-14);

    RngStream rng(14);
    const auto a = random_matrix(5, 5, rng);
    const auto [q, r] = qr_decompose(a);
    CHECK((q.transpose() * q - RealMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((q * r - a).cwiseAbs().maxCoeff() <= 1e-10);
    for (int i = 0; i < 5; ++i) CHECK(r(i, i) > 0.0);

    const auto ac = random_complex_matrix(5, 5, rng);
    const auto [qc, rc] = qr_decompose(ac);
    CHECK((qc.adjoint() * qc - ComplexMatrix::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK((qc * rc - ac).cwiseAbs().maxCoeff() <= 1e-10);
    for (int i = 0; i < 5; ++i) {
        CHECK(rc(i, i).imag() == doctest::Approx(0.0).epsilon(1e-14));
        CHECK(rc(i, i).real() > 0.0);
    }

    RealMatrix singular = RealMatrix::Zero(3, 3);
    singular(0, 0) = 1.0;
    CHECK_THROWS_AS(qr_decompose(singular), std::invalid_argument);
    CHECK_THROWS_AS(qr_decompose(RealMatrix(RealMatrix::Zero(2, 3))), std::invalid_argument);
}

TEST_CASE("gram_schmidt_hs") {
    RngStream rng(15);
    const double root3 = std::sqrt(3.0);

    SUBCASE("already orthogonal family is unchanged, D diagonal") {
        std::vector<RealMatrix> fam;
        RealMatrix m1 = RealMatrix::Zero(3, 3);
        m1(0, 0) = root3;
        RealMatrix m2 = RealMatrix::Zero(3, 3);
        m2(0, 1) = root3;
        fam.push_back(m1);
        fam.push_back(m2);
        const auto res = gram_schmidt_hs(fam, root3);
        CHECK((res.family[0] - m1).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK((res.family[1] - m2).cwiseAbs().maxCoeff() <= 1e-14);
        CHECK(std::abs(res.d(1, 0)) <= 1e-14);
        CHECK(res.d(0, 0) == doctest::Approx(1.0));
        CHECK(res.d(1, 1) == doctest::Approx(1.0));
    }

    SUBCASE("orthogonality and D D^T = C on random families") {
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<RealMatrix> fam;
            for (int i = 0; i < 3; ++i) fam.push_back(random_matrix(3, 3, rng));
            const auto res = gram_schmidt_hs(fam, root3);
            for (std::size_t i = 0; i < fam.size(); ++i)
                for (std::size_t j = 0; j <= i; ++j) {
                    const double want = i == j ? 3.0 : 0.0;
                    CHECK(std::abs(hs_inner(res.family[i], res.family[j]) - want) <= 1e-10 * 3.0);
                }
            // D D^T equals the scaled Gram matrix of the input
            const GramData g = gram_of(fam, 3.0);
            const Eigen::MatrixXd c = g.gram / 3.0;
            CHECK((res.d * res.d.transpose() - c).cwiseAbs().maxCoeff() <= 1e-10);
            // reconstruction B_i = sum_l d_il A_l
            for (std::size_t i = 0; i < fam.size(); ++i) {
                RealMatrix rec = RealMatrix::Zero(3, 3);
                for (std::size_t l = 0; l <= i; ++l) rec += res.d(i, l) * res.family[l];
                CHECK((rec - fam[i]).cwiseAbs().maxCoeff() <= 1e-9);
            }
        }
    }

    SUBCASE("rank deficiency names the offending index") {
        std::vector<RealMatrix> fam;
        fam.push_back(random_matrix(3, 3, rng));
        fam.push_back(2.0 * fam[0]);
        try {
            gram_schmidt_hs(fam, root3);
            FAIL("expected linear-dependence error");
        } catch (const std::invalid_argument& e) {
            CHECK(std::string(e.what()).find("index 1") != std::string::npos);
        }
    }

    SUBCASE("complex families") {
        std::vector<ComplexMatrix> fam;
        for (int i = 0; i < 3; ++i) fam.push_back(random_complex_matrix(4, 4, rng));
        const auto res = gram_schmidt_hs(fam, 2.0);
        for (std::size_t i = 0; i < fam.size(); ++i)
            for (std::size_t j = 0; j <= i; ++j) {
                const std::complex<double> want = i == j ? 4.0 : 0.0;
                CHECK(std::abs(hs_inner(res.family[i], res.family[j]) - want) <= 1e-10 * 4.0);
            }
    }
}

TEST_CASE("matrix serialization round trip") {
    RngStream rng(16);
    const auto a = random_matrix(3, 4, rng);
    const auto parsed = matrix_from_string(matrix_to_string(a));
    REQUIRE_FALSE(parsed.is_complex);
    CHECK((parsed.real - a).cwiseAbs().maxCoeff() == 0.0);

    const auto c = random_complex_matrix(2, 5, rng);
    const auto parsed_c = matrix_from_string(matrix_to_string(c));
    REQUIRE(parsed_c.is_complex);
    CHECK((parsed_c.complex - c).cwiseAbs().maxCoeff() == 0.0);

    CHECK_THROWS_AS(matrix_from_string("2 2 quaternion\n1 2 3 4"), std::invalid_argument);
    CHECK_THROWS_AS(matrix_from_string("2 2 real\n1 2 3"), std::invalid_argument);
}

TEST_CASE("projection family helpers") {
    RngStream rng(17);
    const auto fam = random_orthonormal_family(3, 8, rng);
    CHECK(fam.orthonormal);
    CHECK(fam.k() == 3);
    CHECK(fam.n() == 8);

    const auto cfam = random_orthonormal_complex_family(2, 6, rng);
    CHECK(cfam.orthonormal);

    CHECK_THROWS_AS(diagonal_block_family({5, 2}, 10), std::invalid_argument);
    CHECK_THROWS_AS(diagonal_block_family({2, 12}, 10), std::invalid_argument);
}

TEST_SUITE_END();
