#include "steinpairs/haar.hpp"

#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace steinpairs {

namespace {

int delta(int a, int b) { return a == b ? 1 : 0; }

void check_epsilon(double epsilon) {
    if (!(epsilon > 0.0 && epsilon <= 0.5)) {
        std::ostringstream msg;
        msg << "conjugated_rotation_pair: epsilon must lie in (0, 1/2], got " << epsilon;
        throw std::invalid_argument(msg.str());
    }
}

template <typename Matrix>
void check_in_group(const Matrix& m, const char* what) {
    if (m.rows() != m.cols()) throw std::invalid_argument(std::string(what) + ": matrix must be square");
    const Matrix gram = m * m.adjoint();
    const double dev = (gram - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
    if (dev > 1e-10) {
        std::ostringstream msg;
        msg << what << ": input is not in the group (deviation " << dev << ")";
        throw std::invalid_argument(msg.str());
    }
}

// q_ij = k_i1 k_j2^adj - k_i2 k_j1^adj, built entrywise so that the
// antisymmetry q_ij = -conj(q_ji) is exact in floating point.
template <typename Matrix>
Matrix build_q(const Matrix& k_cols) {
    using Scalar = typename Matrix::Scalar;
    const Eigen::Index n = k_cols.rows();
    Matrix q(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            Scalar a, b;
            if constexpr (std::is_same_v<Scalar, double>) {
                a = k_cols(i, 0) * k_cols(j, 1);
                b = k_cols(i, 1) * k_cols(j, 0);
            } else {
                a = k_cols(i, 0) * std::conj(k_cols(j, 1));
                b = k_cols(i, 1) * std::conj(k_cols(j, 0));
            }
            q(i, j) = a - b;
        }
    return q;
}

// m + [(-eps^2/2 + delta) k k^adj + eps k C2 k^adj] m with C2 = [[0,1],[-1,0]].
template <typename Witness, typename Matrix>
Matrix apply_rotation_impl(const Witness& w, double epsilon, const Matrix& m) {
    const double shrink = -0.5 * epsilon * epsilon + rotation_delta(epsilon);
    Matrix t = w.k_cols.adjoint() * m;  // 2 x c
    Matrix rot(2, m.cols());
    rot.row(0) = t.row(1);
    rot.row(1) = -t.row(0);
    return m + w.k_cols * (shrink * t + epsilon * rot);
}

}  // namespace

RealMatrix sample_orthogonal(int n, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("sample_orthogonal: n must be >= 1");
    RealMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    return qr_decompose(g).first;
}

ComplexMatrix sample_unitary(int n, RngStream& rng) {
    if (n < 1) throw std::invalid_argument("sample_unitary: n must be >= 1");
    ComplexMatrix g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.complex_normal();
    return qr_decompose(g).first;
}

RotationPerturbation make_rotation_perturbation(int n, double epsilon) {
    if (n < 2) throw std::invalid_argument("make_rotation_perturbation: n must be >= 2");
    check_epsilon(epsilon);
    RotationPerturbation p;
    p.epsilon = epsilon;
    p.dimension = n;
    p.delta = rotation_delta(epsilon);
    p.a_eps = RealMatrix::Identity(n, n);
    const double c = std::sqrt(1.0 - epsilon * epsilon);
    p.a_eps(0, 0) = c;
    p.a_eps(1, 1) = c;
    p.a_eps(0, 1) = epsilon;
    p.a_eps(1, 0) = -epsilon;
    return p;
}

ConjugatedRotation draw_conjugated_rotation(int n, RngStream& rng) {
    if (n < 2) throw std::invalid_argument("draw_conjugated_rotation: n must be >= 2");
    ConjugatedRotation w;
    w.u = sample_orthogonal(n, rng);
    w.k_cols = w.u.leftCols(2);
    w.q = build_q(w.k_cols);
    return w;
}

ComplexConjugatedRotation draw_conjugated_rotation_complex(int n, RngStream& rng) {
    if (n < 2) throw std::invalid_argument("draw_conjugated_rotation_complex: n must be >= 2");
    ComplexConjugatedRotation w;
    w.u = sample_unitary(n, rng);
    w.k_cols = w.u.leftCols(2);
    w.q = build_q(w.k_cols);
    return w;
}

RealMatrix apply_rotation(const ConjugatedRotation& w, double epsilon, const RealMatrix& m) {
    return apply_rotation_impl(w, epsilon, m);
}

Eigen::VectorXd apply_rotation(const ConjugatedRotation& w, double epsilon,
                               const Eigen::VectorXd& y) {
    const RealMatrix m = y;
    return apply_rotation_impl(w, epsilon, m);
}

ComplexMatrix apply_rotation(const ComplexConjugatedRotation& w, double epsilon,
                             const ComplexMatrix& m) {
    return apply_rotation_impl(w, epsilon, m);
}

std::pair<RealMatrix, ConjugatedRotation> conjugated_rotation_pair(const RealMatrix& m,
                                                                   double epsilon,
                                                                   RngStream& rng) {
    check_epsilon(epsilon);
    check_in_group(m, "conjugated_rotation_pair");
    auto w = draw_conjugated_rotation(static_cast<int>(m.rows()), rng);
    RealMatrix m_eps = apply_rotation(w, epsilon, m);
    return {std::move(m_eps), std::move(w)};
}

std::pair<ComplexMatrix, ComplexConjugatedRotation> conjugated_rotation_pair(
    const ComplexMatrix& m, double epsilon, RngStream& rng) {
    check_epsilon(epsilon);
    check_in_group(m, "conjugated_rotation_pair");
    auto w = draw_conjugated_rotation_complex(static_cast<int>(m.rows()), rng);
    ComplexMatrix m_eps = apply_rotation(w, epsilon, m);
    return {std::move(m_eps), std::move(w)};
}

// ---------------------------------------------------------------------------

MomentQuery parse_moment_query(const std::string& text) {
    MomentQuery q;
    std::size_t pos = 0;
    auto skip_ws = [&] { while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos; };
    auto fail = [&](const std::string& why) {
        throw std::invalid_argument("parse_moment_query: " + why + " in '" + text + "'");
    };

    skip_ws();
    if (pos >= text.size()) fail("empty query");
    if (text[pos] == 'O') q.group = HaarGroup::Orthogonal;
    else if (text[pos] == 'U') q.group = HaarGroup::Unitary;
    else fail("expected group prefix 'O:' or 'U:'");
    ++pos;
    skip_ws();
    if (pos >= text.size() || text[pos] != ':') fail("expected ':' after group");
    ++pos;

    bool saw_entry = false, saw_q = false;
    auto read_int = [&]() -> int {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
        if (pos == start) fail("expected an index");
        return std::stoi(text.substr(start, pos - start));
    };

    for (;;) {
        skip_ws();
        if (pos >= text.size()) fail("missing '@n=' suffix");
        if (text[pos] == '@') break;
        const char letter = text[pos];
        if (letter != 'u' && letter != 'h' && letter != 'q') fail("expected factor 'u', 'h' or 'q'");
        ++pos;
        MomentFactor f;
        if (pos < text.size() && text[pos] == '*') {
            f.conj = true;
            ++pos;
        }
        skip_ws();
        if (pos >= text.size() || text[pos] != '(') fail("expected '('");
        ++pos;
        f.row = read_int();
        skip_ws();
        if (pos >= text.size() || text[pos] != ',') fail("expected ','");
        ++pos;
        f.col = read_int();
        skip_ws();
        if (pos >= text.size() || text[pos] != ')') fail("expected ')'");
        ++pos;
        if (letter == 'q') {
            saw_q = true;
            if (f.conj) fail("conjugation marker not supported on q entries");
        } else {
            saw_entry = true;
            if (f.conj && q.group == HaarGroup::Orthogonal)
                fail("conjugation marker invalid for the orthogonal group");
        }
        q.factors.push_back(f);
    }
    if (saw_entry && saw_q) fail("cannot mix entry and q factors");
    q.q_entries = saw_q;

    ++pos;  // '@'
    skip_ws();
    if (pos + 1 >= text.size() || text[pos] != 'n' || text[pos + 1] != '=') fail("expected 'n='");
    pos += 2;
    q.n = read_int();
    skip_ws();
    if (pos != text.size()) fail("trailing characters");

    if (q.n < 1) fail("n must be >= 1");
    if (q.factors.empty()) fail("no factors");
    for (const auto& f : q.factors)
        if (f.row < 1 || f.row > q.n || f.col < 1 || f.col > q.n) fail("index out of [1, n]");
    return q;
}

std::string to_string(const MomentQuery& q) {
    std::ostringstream os;
    os << (q.group == HaarGroup::Orthogonal ? "O:" : "U:");
    for (const auto& f : q.factors) {
        if (q.q_entries) os << 'q';
        else os << (q.group == HaarGroup::Orthogonal ? 'u' : 'h');
        if (f.conj) os << '*';
        os << '(' << f.row << ',' << f.col << ')';
    }
    os << "@n=" << q.n;
    return os.str();
}

namespace {

void require_degree(const MomentQuery& q) {
    if (q.q_entries) {
        if (q.factors.size() != 2)
            throw std::invalid_argument("moment oracle: q-entry queries take exactly two factors");
        if (q.n < 2) throw std::invalid_argument("moment oracle: q-entry queries need n >= 2");
        return;
    }
    if (q.factors.size() != 2 && q.factors.size() != 4)
        throw std::invalid_argument("moment oracle: not implemented for degree " +
                                    std::to_string(q.factors.size()) + " (only 2 and 4)");
    if (q.factors.size() == 4 && q.n < 2)
        throw std::invalid_argument("moment oracle: degree-4 formulas need n >= 2");
}

}  // namespace

double orthogonal_moment_oracle(const MomentQuery& q) {
    if (q.group != HaarGroup::Orthogonal)
        throw std::invalid_argument("orthogonal_moment_oracle: query is not for the orthogonal group");
    require_degree(q);
    const long long n = q.n;
    if (q.q_entries) {
        const auto& f = q.factors;
        const long long num = 2LL * (delta(f[0].row, f[1].row) * delta(f[0].col, f[1].col) -
                                     delta(f[0].row, f[1].col) * delta(f[0].col, f[1].row));
        return static_cast<double>(num) / static_cast<double>(n * (n - 1));
    }
    if (q.factors.size() == 2) {
        const auto& f = q.factors;
        return static_cast<double>(delta(f[0].row, f[1].row) * delta(f[0].col, f[1].col)) /
               static_cast<double>(n);
    }
    const int i = q.factors[0].row, j = q.factors[0].col;
    const int r = q.factors[1].row, s = q.factors[1].col;
    const int al = q.factors[2].row, be = q.factors[2].col;
    const int la = q.factors[3].row, mu = q.factors[3].col;
    const long long minus_part =
        delta(i, r) * delta(al, la) * delta(j, be) * delta(s, mu) +
        delta(i, r) * delta(al, la) * delta(j, mu) * delta(s, be) +
        delta(i, al) * delta(r, la) * delta(j, s) * delta(be, mu) +
        delta(i, al) * delta(r, la) * delta(j, mu) * delta(be, s) +
        delta(i, la) * delta(r, al) * delta(j, s) * delta(be, mu) +
        delta(i, la) * delta(r, al) * delta(j, be) * delta(s, mu);
    const long long plus_part =
        delta(i, r) * delta(al, la) * delta(j, s) * delta(be, mu) +
        delta(i, al) * delta(r, la) * delta(j, be) * delta(s, mu) +
        delta(i, la) * delta(r, al) * delta(j, mu) * delta(s, be);
    const long long num = -minus_part + (n + 1) * plus_part;
    const long long den = (n - 1) * n * (n + 2);
    return static_cast<double>(num) / static_cast<double>(den);
}

double unitary_moment_oracle(const MomentQuery& q) {
    if (q.group != HaarGroup::Unitary)
        throw std::invalid_argument("unitary_moment_oracle: query is not for the unitary group");
    require_degree(q);
    const long long n = q.n;
    if (q.q_entries) {
        const auto& f = q.factors;
        const long long num = -2LL * n * delta(f[0].row, f[1].col) * delta(f[0].col, f[1].row) +
                              2LL * delta(f[0].row, f[0].col) * delta(f[1].row, f[1].col);
        return static_cast<double>(num) / static_cast<double>((n - 1) * n * (n + 1));
    }
    std::vector<MomentFactor> plain, conj;
    for (const auto& f : q.factors) (f.conj ? conj : plain).push_back(f);
    if (plain.size() != conj.size()) return 0.0;  // unbalanced products vanish
    if (q.factors.size() == 2) {
        return static_cast<double>(delta(plain[0].row, conj[0].row) *
                                   delta(plain[0].col, conj[0].col)) /
               static_cast<double>(n);
    }
    const int i = plain[0].row, j = plain[0].col;
    const int r = plain[1].row, s = plain[1].col;
    const int al = conj[0].row, be = conj[0].col;
    const int la = conj[1].row, mu = conj[1].col;
    const long long big =
        delta(i, al) * delta(r, la) * delta(j, be) * delta(s, mu) +
        delta(i, la) * delta(r, al) * delta(j, mu) * delta(s, be);
    const long long small =
        delta(i, al) * delta(r, la) * delta(j, mu) * delta(s, be) +
        delta(i, la) * delta(r, al) * delta(j, be) * delta(s, mu);
    const long long num = n * big - small;
    const long long den = (n - 1) * n * (n + 1);
    return static_cast<double>(num) / static_cast<double>(den);
}

double moment_oracle(const MomentQuery& q) {
    return q.group == HaarGroup::Orthogonal ? orthogonal_moment_oracle(q)
                                            : unitary_moment_oracle(q);
}

MomentEstimate mc_moment_estimate(const MomentQuery& q, std::int64_t samples, std::uint64_t seed,
                                  int threads) {
    if (samples < 100) throw std::invalid_argument("mc_moment_estimate: need at least 100 samples");
    for (const auto& f : q.factors)
        if (f.row < 1 || f.row > q.n || f.col < 1 || f.col > q.n)
            throw std::invalid_argument("mc_moment_estimate: index out of [1, n]");
    if (q.q_entries && (q.factors.size() != 2 || q.n < 2))
        throw std::invalid_argument(
            "mc_moment_estimate: q-entry queries take exactly two factors and n >= 2");

    MeanSe ms;
    if (q.group == HaarGroup::Orthogonal) {
        ms = mc_mean_se(samples, seed, threads, [&](RngStream& rng) {
            const RealMatrix m = sample_orthogonal(q.n, rng);
            double prod = 1.0;
            if (q.q_entries) {
                for (const auto& f : q.factors)
                    prod *= m(f.row - 1, 0) * m(f.col - 1, 1) - m(f.row - 1, 1) * m(f.col - 1, 0);
            } else {
                for (const auto& f : q.factors) prod *= m(f.row - 1, f.col - 1);
            }
            return prod;
        });
    } else {
        ms = mc_mean_se(samples, seed, threads, [&](RngStream& rng) {
            const ComplexMatrix m = sample_unitary(q.n, rng);
            std::complex<double> prod = 1.0;
            if (q.q_entries) {
                for (const auto& f : q.factors)
                    prod *= m(f.row - 1, 0) * std::conj(m(f.col - 1, 1)) -
                            m(f.row - 1, 1) * std::conj(m(f.col - 1, 0));
            } else {
                for (const auto& f : q.factors) {
                    const std::complex<double> e = m(f.row - 1, f.col - 1);
                    prod *= f.conj ? std::conj(e) : e;
                }
            }
            return prod.real();
        });
    }
    return {ms.mean, ms.se, ms.samples};
}

std::vector<std::string> haar_battery_queries() {
    static const char* patterns[] = {
        "O:u(1,1)u(1,1)",
        "O:u(1,1)u(1,2)",
        "O:u(1,1)u(1,1)u(1,1)u(1,1)",
        "O:u(1,1)u(1,1)u(2,2)u(2,2)",
        "O:u(1,1)u(1,1)u(1,2)u(1,2)",
        "O:q(1,2)q(1,2)",
        "U:h(1,1)h*(1,1)",
        "U:h(1,1)h*(1,2)",
        "U:h(1,1)h(2,2)h*(1,1)h*(2,2)",
        "U:h(1,1)h(1,2)h*(1,1)h*(1,2)",
    };
    std::vector<std::string> out;
    for (int n : {4, 6, 9})
        for (const char* p : patterns) out.push_back(std::string(p) + "@n=" + std::to_string(n));
    return out;
}

}  // namespace steinpairs
