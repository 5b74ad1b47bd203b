#pragma once

#include <Eigen/Dense>

#include "steinpairs/rng.hpp"

namespace test_util {

inline Eigen::MatrixXd random_matrix(int rows, int cols, steinpairs::RngStream& rng) {
    Eigen::MatrixXd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.normal();
    return m;
}

inline Eigen::MatrixXcd random_complex_matrix(int rows, int cols, steinpairs::RngStream& rng) {
    Eigen::MatrixXcd m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = rng.complex_normal();
    return m;
}

}  // namespace test_util
