#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace steinpairs {

struct Quadrature {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on (0, 1); weights sum to 1. Nodes found by Newton
// iteration on the Legendre recurrence.
inline Quadrature gauss_legendre_01(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre_01: need at least one node");
    Quadrature q;
    q.nodes.resize(static_cast<std::size_t>(n));
    q.weights.resize(static_cast<std::size_t>(n));
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(3.14159265358979323846 * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
            }
            pp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / pp;
            z -= dz;
            if (std::abs(dz) < 1e-15) break;
        }
        const double w = 2.0 / ((1.0 - z * z) * pp * pp);
        // map [-1, 1] -> (0, 1)
        q.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 - z);
        q.nodes[static_cast<std::size_t>(n - 1 - i)] = 0.5 * (1.0 + z);
        q.weights[static_cast<std::size_t>(i)] = 0.5 * w;
        q.weights[static_cast<std::size_t>(n - 1 - i)] = 0.5 * w;
    }
    return q;
}

}  // namespace steinpairs
