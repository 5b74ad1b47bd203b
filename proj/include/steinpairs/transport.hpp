#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

#include <Eigen/Dense>

#include "steinpairs/parallel.hpp"
#include "steinpairs/rng.hpp"

namespace steinpairs {

// m points in R^k, one per row, with provenance metadata.
struct SampleCloud {
    Eigen::MatrixXd points;
    std::uint64_t seed = 0;
    std::string source;

    int m() const { return static_cast<int>(points.rows()); }
    int k() const { return static_cast<int>(points.cols()); }
};

void write_cloud_csv(std::ostream& os, const SampleCloud& cloud);
SampleCloud read_cloud_csv(std::istream& is);

// Exact W1 between equal-size empirical measures: minimum-cost perfect
// matching with Euclidean costs (shortest augmenting path), divided by m.
// Deterministic; capped at m <= 4096.
double w1_exact(const SampleCloud& a, const SampleCloud& b);

// Max over random unit directions of the 1-d W1 of the projected samples.
// Always a lower bound for the W1 between the empirical measures.
double w1_sliced_lb(const SampleCloud& a, const SampleCloud& b, int directions, RngStream& rng);

// One-dimensional W1 between sorted samples (equal sizes: mean sorted gap).
double w1_one_dim(Eigen::VectorXd a, Eigen::VectorXd b);

using CloudSampler = std::function<SampleCloud(int m, RngStream& rng)>;

struct SelfDistance {
    double mean = 0.0;
    double se = 0.0;
    int reps = 0;
};

// Mean and standard error of w1_exact between independent same-law clouds of
// size m; the finite-sample allowance used to debias cloud comparisons.
SelfDistance self_distance(const CloudSampler& law, int m, int reps, RngStream& rng);

SampleCloud gaussian_cloud(int m, int k, RngStream& rng);

}  // namespace steinpairs
