#ifndef DUNKL_NNLS_HPP
#define DUNKL_NNLS_HPP

#include <cstddef>
#include <vector>

namespace dunkl {

struct NnlsResult {
    std::vector<double> x;
    double residual_max = 0.0; // max |(A x - b)_i|
    double residual_l2 = 0.0;
    int iterations = 0;
    bool converged = false;
};

// min ||A x - b||_2 subject to x >= 0, Lawson-Hanson active set.
// A is column-major (rows x cols); columns are normalized internally and
// entering ties are broken by the smallest column index.
NnlsResult nnls_solve(const std::vector<double>& A, std::size_t rows, std::size_t cols,
                      const std::vector<double>& b, int max_outer = 0);

} // namespace dunkl

#endif
