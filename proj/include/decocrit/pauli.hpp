#pragma once

#include <complex>
#include <Eigen/Dense>

// Pauli matrices and small dense helpers shared by the MPS engine and the
// dense reference implementation (the only code the two paths share).

namespace decocrit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

namespace pauli {

inline Matrix id2() {
    Matrix m(2, 2);
    m << 1, 0, 0, 1;
    return m;
}

inline Matrix x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

inline Matrix y() {
    Matrix m(2, 2);
    m << 0, Complex(0, -1), Complex(0, 1), 0;
    return m;
}

inline Matrix z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

} // namespace pauli

// Kronecker product with the left factor on the slower index:
// (A (x) B)[ia*nb+ib, ja*mb+jb] = A(ia,ja) * B(ib,jb).
inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Single-site operator embedded into an L-site chain, site 0 on the slow index.
inline Matrix embed_site_op(const Matrix& op, int site, int length) {
    Matrix out = Matrix::Identity(1, 1);
    for (int j = 0; j < length; ++j)
        out = kron(out, j == site ? op : pauli::id2());
    return out;
}

} // namespace decocrit
