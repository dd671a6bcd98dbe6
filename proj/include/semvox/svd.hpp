#ifndef SEMVOX_SVD_HPP
#define SEMVOX_SVD_HPP

#include <cstddef>
#include <functional>
#include <vector>

#include "semvox/mat.hpp"

namespace semvox::svd {

// Eigenvalues/eigenvectors of a symmetric tridiagonal matrix
// (implicit-shift QL). diag has length n, off length n-1. On return
// eigenpairs are sorted by descending eigenvalue; z is n x n with
// eigenvectors in columns.
void sym_tridiag_eig(std::vector<double> diag, std::vector<double> off,
                     std::vector<double>& eigenvalues, Mat& z);

// Cyclic Jacobi eigendecomposition of a symmetric matrix; eigenpairs
// sorted by descending eigenvalue, eigenvectors in columns of z.
void jacobi_eigh(Mat a, std::vector<double>& eigenvalues, Mat& z);

// Symmetric linear operator y = G x of dimension dim().
struct SymOperator {
    std::size_t dim;
    std::function<void(const double*, double*)> apply;
};

struct LanczosOptions {
    std::size_t max_iterations = 1000; // cap on the Krylov dimension
    double tolerance = 1e-10;          // Ritz residual, relative to the top eigenvalue
};

// Top-k eigenpairs of a symmetric PSD operator by Lanczos iteration
// with full reorthogonalization; deterministic start vectors, lucky
// breakdowns handled by orthogonal restarts. Throws NumericalError
// (with the achieved residual) if the cap is reached unconverged.
void lanczos_topk(const SymOperator& op, std::size_t k, const LanczosOptions& opts,
                  std::vector<double>& eigenvalues, Mat& vectors);

} // namespace semvox::svd

#endif
