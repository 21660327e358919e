#include "rabi/linalg.hpp"

#include <cmath>
#include <vector>

#include "rabi/errors.hpp"

namespace rabi {

double max_abs(const Matrix& m) {
    return m.cwiseAbs().maxCoeff();
}

double hermiticity_defect(const Matrix& m) {
    return max_abs(m - m.adjoint());
}

double unitarity_defect(const Matrix& m) {
    Matrix g = m.adjoint() * m;
    g.diagonal().array() -= 1.0;
    return max_abs(g);
}

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

void hermitize(Matrix& m) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        m(j, j) = Complex(m(j, j).real(), 0.0);
        for (Eigen::Index i = j + 1; i < m.rows(); ++i) {
            Complex avg = 0.5 * (m(i, j) + std::conj(m(j, i)));
            m(i, j) = avg;
            m(j, i) = std::conj(avg);
        }
    }
}

SparseMatrix sparsify(const Matrix& m, double drop_tol) {
    std::vector<Eigen::Triplet<Complex>> trip;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (std::abs(m(i, j)) > drop_tol) trip.emplace_back(i, j, m(i, j));
    SparseMatrix out(m.rows(), m.cols());
    out.setFromTriplets(trip.begin(), trip.end());
    return out;
}

Vector expm_apply_antihermitian(const SparseMatrix& a, const Vector& v) {
    if (a.rows() != v.size()) throw DimensionError("expm_apply: size mismatch");
    // 1-norm upper bound from column sums.
    double norm1 = 0.0;
    for (int j = 0; j < a.outerSize(); ++j) {
        double col = 0.0;
        for (SparseMatrix::InnerIterator it(a, j); it; ++it) col += std::abs(it.value());
        norm1 = std::max(norm1, col);
    }
    const int steps = std::max(1, static_cast<int>(std::ceil(norm1)));
    const double inv = 1.0 / steps;

    Vector y = v;
    Vector term(v.size()), next(v.size());
    for (int s = 0; s < steps; ++s) {
        term = y;
        // Taylor series of exp(A/steps); unit step norm converges in ~20 terms.
        for (int k = 1; k <= 40; ++k) {
            next.noalias() = a * term;
            term = next * (inv / k);
            y += term;
            if (term.norm() <= 1e-18 * y.norm()) break;
        }
    }
    return y;
}

}  // namespace rabi
