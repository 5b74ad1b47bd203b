#include "steinpairs/transport.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace steinpairs {

namespace {

constexpr int kExactCap = 4096;

// Shortest-augmenting-path assignment (Jonker-Volgenant row iteration).
// Returns col_of_row for the minimum-cost perfect matching of the dense
// m x m cost matrix.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost) {
    const int n = static_cast<int>(cost.rows());
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, std::numeric_limits<double>::infinity());
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = 0;
            double delta = std::numeric_limits<double>::infinity();
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }
    std::vector<int> col_of_row(n, -1);
    for (int j = 1; j <= n; ++j)
        if (p[j]) col_of_row[p[j] - 1] = j - 1;
    return col_of_row;
}

}  // namespace

double w1_exact(const SampleCloud& a, const SampleCloud& b) {
    if (a.m() != b.m() || a.k() != b.k()) {
        std::ostringstream msg;
        msg << "w1_exact: cloud shapes differ (" << a.m() << "x" << a.k() << " vs " << b.m()
            << "x" << b.k() << ")";
        throw std::invalid_argument(msg.str());
    }
    const int m = a.m();
    if (m < 1) throw std::invalid_argument("w1_exact: empty clouds");
    if (m > kExactCap) {
        std::ostringstream msg;
        msg << "w1_exact: m = " << m << " exceeds the exact-matching cap " << kExactCap
            << "; use w1_sliced_lb for larger clouds";
        throw std::invalid_argument(msg.str());
    }
    Eigen::MatrixXd cost(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) cost(i, j) = (a.points.row(i) - b.points.row(j)).norm();

    const std::vector<int> match = solve_assignment(cost);
    // Summing the matched costs in sorted order keeps w1_exact(a, b) and
    // w1_exact(b, a) bit-identical (same multiset of distances).
    std::vector<double> dists(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) dists[static_cast<std::size_t>(i)] = cost(i, match[i]);
    std::sort(dists.begin(), dists.end());
    double total = 0.0;
    for (double d : dists) total += d;
    return total / static_cast<double>(m);
}

double w1_one_dim(Eigen::VectorXd a, Eigen::VectorXd b) {
    if (a.size() != b.size())
        throw std::invalid_argument("w1_one_dim: sample sizes differ");
    std::sort(a.data(), a.data() + a.size());
    std::sort(b.data(), b.data() + b.size());
    double total = 0.0;
    for (Eigen::Index i = 0; i < a.size(); ++i) total += std::abs(a(i) - b(i));
    return total / static_cast<double>(a.size());
}

double w1_sliced_lb(const SampleCloud& a, const SampleCloud& b, int directions, RngStream& rng) {
    if (a.k() != b.k()) throw std::invalid_argument("w1_sliced_lb: dimensions differ");
    if (a.m() != b.m()) throw std::invalid_argument("w1_sliced_lb: cloud sizes differ");
    if (directions < 1) throw std::invalid_argument("w1_sliced_lb: need at least one direction");
    const int k = a.k();
    if (k == 1) return w1_one_dim(a.points.col(0), b.points.col(0));
    double best = 0.0;
    for (int d = 0; d < directions; ++d) {
        Eigen::VectorXd theta(k);
        double norm2 = 0.0;
        do {
            for (int i = 0; i < k; ++i) theta(i) = rng.normal();
            norm2 = theta.squaredNorm();
        } while (norm2 == 0.0);
        theta /= std::sqrt(norm2);
        best = std::max(best, w1_one_dim(a.points * theta, b.points * theta));
    }
    return best;
}

SelfDistance self_distance(const CloudSampler& law, int m, int reps, RngStream& rng) {
    if (reps < 3) throw std::invalid_argument("self_distance: need at least 3 repetitions");
    double sum = 0.0, sq = 0.0;
    for (int r = 0; r < reps; ++r) {
        const SampleCloud x = law(m, rng);
        const SampleCloud y = law(m, rng);
        const double w = w1_exact(x, y);
        sum += w;
        sq += w * w;
    }
    SelfDistance out;
    out.reps = reps;
    out.mean = sum / reps;
    const double var = (sq - reps * out.mean * out.mean) / (reps - 1);
    out.se = std::sqrt(std::max(var, 0.0) / reps);
    return out;
}

SampleCloud gaussian_cloud(int m, int k, RngStream& rng) {
    SampleCloud c;
    c.points.resize(m, k);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < k; ++j) c.points(i, j) = rng.normal();
    c.source = "gaussian";
    return c;
}

void write_cloud_csv(std::ostream& os, const SampleCloud& cloud) {
    os << std::setprecision(17);
    for (int i = 0; i < cloud.m(); ++i) {
        for (int j = 0; j < cloud.k(); ++j) {
            if (j) os << ',';
            os << cloud.points(i, j);
        }
        os << '\n';
    }
}

SampleCloud read_cloud_csv(std::istream& is) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::invalid_argument("read_cloud_csv: ragged rows");
        rows.push_back(std::move(row));
    }
    if (rows.size() < 2) throw std::invalid_argument("read_cloud_csv: need at least two points");
    SampleCloud c;
    c.points.resize(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < rows.front().size(); ++j)
            c.points(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    return c;
}

}  // namespace steinpairs
