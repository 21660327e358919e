#pragma once

#include <complex>
#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace rabi {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<Complex>;

/// Largest absolute entry of a matrix expression.
double max_abs(const Matrix& m);

/// max |A - A^dagger|.
double hermiticity_defect(const Matrix& m);

/// max |U^dagger U - I|.
double unitarity_defect(const Matrix& m);

/// Kronecker product, left factor major (row index = i_a * rows(b) + i_b).
Matrix kron(const Matrix& a, const Matrix& b);

/// (m + m^dagger)/2.
void hermitize(Matrix& m);

/// Sparse copy of a dense matrix, dropping entries with |entry| <= drop_tol.
SparseMatrix sparsify(const Matrix& m, double drop_tol = 0.0);

/// y = exp(A) * v for anti-Hermitian A, evaluated by repeated short Taylor
/// steps exp(A/s) so every partial sum stays well conditioned. Accurate to
/// machine precision; cost is O(steps * nnz(A)).
Vector expm_apply_antihermitian(const SparseMatrix& a, const Vector& v);

}  // namespace rabi
