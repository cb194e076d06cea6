#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "decocrit/mps.hpp"
#include "decocrit/pauli.hpp"
#include "test_util.hpp"

using namespace decocrit;
using testutil::dense_apply_one;
using testutil::dense_apply_two;

namespace {

MpsState basis_state(const std::vector<int>& bits, int d = 2) {
    std::vector<Vector> sites;
    for (int b : bits) {
        Vector v = Vector::Zero(d);
        v(b) = 1.0;
        sites.push_back(v);
    }
    return MpsState::product_state(sites, 64, 0.0);
}

bool side_tensors_orthonormal(const MpsState& s, int center, double tol) {
    for (int j = 0; j < s.length(); ++j) {
        const auto& t = s.site(j);
        if (j < center) {
            Matrix g = Matrix::Zero(t[0].cols(), t[0].cols());
            for (int p = 0; p < s.local_dim(); ++p) g += t[p].adjoint() * t[p];
            if ((g - Matrix::Identity(g.rows(), g.cols())).norm() > tol) return false;
        } else if (j > center) {
            Matrix g = Matrix::Zero(t[0].rows(), t[0].rows());
            for (int p = 0; p < s.local_dim(); ++p) g += t[p] * t[p].adjoint();
            if ((g - Matrix::Identity(g.rows(), g.cols())).norm() > tol) return false;
        }
    }
    return true;
}

} // namespace

TEST_CASE("truncation_rank: cutoff, cap and tie handling") {
    Eigen::VectorXd sv(5);
    sv << 1.0, 0.5, 0.1, 1e-8, 1e-12;

    SUBCASE("relative cutoff") {
        const auto [k, w] = truncation_rank(sv, 10, 1e-6);
        CHECK(k == 3);
        CHECK(w == doctest::Approx((1e-16 + 1e-24) / sv.squaredNorm()).epsilon(1e-6));
    }
    SUBCASE("cap") {
        const auto [k, w] = truncation_rank(sv, 2, 0.0);
        CHECK(k == 2);
        CHECK(w > 0.0);
    }
    SUBCASE("no truncation") {
        const auto [k, w] = truncation_rank(sv, 10, 0.0);
        CHECK(k == 5);
        CHECK(w == 0.0);
    }
    SUBCASE("degenerate group is kept whole at the cutoff") {
        Eigen::VectorXd tied(4);
        tied << 1.0, 1e-6, 1e-6, 1e-7;
        const auto [k, w] = truncation_rank(tied, 10, 1e-6);
        CHECK(k == 3);
    }
    SUBCASE("degenerate group is dropped whole at the cap") {
        Eigen::VectorXd tied(4);
        tied << 1.0, 0.5, 0.5, 0.1;
        const auto [k, w] = truncation_rank(tied, 2, 0.0);
        CHECK(k == 1);  // the tied pair straddling the cap goes together
    }
}

TEST_CASE("canonicalize: product state is already canonical") {
    MpsState s = basis_state({0, 0, 0, 0});
    s.canonicalize(0);
    for (int b = 1; b < 4; ++b) CHECK(s.bond_dim(b) == 1);
    const Vector dense = s.to_dense();
    CHECK(std::abs(dense(0) - 1.0) < 1e-14);
}

TEST_CASE("canonicalize preserves the vector and orthonormalizes the sides") {
    MpsState s = MpsState::random_state(2, 6, 8, 42, 64, 0.0);
    const MpsState original = s;
    for (int c : {0, 3, 5, 2}) {
        s.canonicalize(c);
        CHECK(s.center() == c);
        const Complex ov = overlap(s, original);
        CHECK(std::abs(ov / (s.norm() * original.norm()) - 1.0) < 1e-12);
        CHECK(side_tensors_orthonormal(s, c, 1e-10));
    }
    CHECK_THROWS_AS(s.canonicalize(6), std::invalid_argument);
}

TEST_CASE("gauge invariance: overlaps and strings unchanged by canonicalization") {
    MpsState a = MpsState::random_state(2, 6, 8, 7, 64, 0.0);
    MpsState b = MpsState::random_state(2, 6, 8, 8, 64, 0.0);
    const Complex before = overlap(a, b);
    const Complex str_before = expect_string(a, {{1, pauli::x()}, {3, pauli::z()}}, b);
    for (int c : {5, 0, 2}) {
        a.canonicalize(c);
        CHECK(std::abs(overlap(a, b) - before) < 1e-10);
        CHECK(std::abs(expect_string(a, {{1, pauli::x()}, {3, pauli::z()}}, b) - str_before) <
              1e-10);
    }
}

TEST_CASE("apply_gate: identity leaves the state alone with zero discarded weight") {
    MpsState s = MpsState::random_state(2, 5, 6, 3, 64, 0.0);
    const Vector before = s.to_dense();
    const double w1 = s.apply_gate(LocalOperator::one_site(Matrix::Identity(2, 2)), 2);
    const double w2 = s.apply_gate(LocalOperator::two_site(Matrix::Identity(4, 4)), 1);
    CHECK(w1 == 0.0);
    CHECK(w2 < 1e-28);
    CHECK((s.to_dense() - before).norm() < 1e-12);
}

TEST_CASE("apply_gate: swap exchanges product-state sites") {
    MpsState s = basis_state({0, 1});
    s.apply_gate(LocalOperator::swap_sites(2), 0);
    const Vector v = s.to_dense();
    CHECK(std::abs(v(2) - 1.0) < 1e-14);  // |10>
    CHECK(std::abs(v(1)) < 1e-14);
}

TEST_CASE("apply_gate: exp(tau Z(x)Z) on |++> matches the dense matrix exponential") {
    const double tau = 0.3;
    Vector plus(2);
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    MpsState s = MpsState::product_state({plus, plus}, 8, 0.0);

    const Matrix zz = kron(pauli::z(), pauli::z());
    const Matrix gate = (tau * zz).exp();
    s.apply_gate(LocalOperator::two_site(gate), 0);
    const Vector v = s.to_dense();

    // exp(tau ZZ) is diagonal (e^tau, e^-tau, e^-tau, e^tau); on |++> the
    // amplitudes are those values over 2 = (cosh+sinh, cosh-sinh, ...)/2
    CHECK(std::abs(v(0) - std::exp(tau) / 2.0) < 1e-12);
    CHECK(std::abs(v(1) - std::exp(-tau) / 2.0) < 1e-12);
    CHECK(std::abs(v(2) - std::exp(-tau) / 2.0) < 1e-12);
    CHECK(std::abs(v(3) - std::exp(tau) / 2.0) < 1e-12);

    // and against a dense application of the same exponential
    Vector dense = Vector::Constant(4, 0.5);
    dense = gate * dense;
    CHECK((v - dense).norm() < 1e-12);
}

TEST_CASE("apply_gate errors") {
    MpsState s = basis_state({0, 0, 0});
    CHECK_THROWS_AS(s.apply_gate(LocalOperator::one_site(Matrix::Identity(2, 2)), 3),
                    std::invalid_argument);
    CHECK_THROWS_AS(s.apply_gate(LocalOperator::two_site(Matrix::Identity(4, 4)), 2),
                    std::invalid_argument);
}

TEST_CASE("truncation exactness: unbounded chi reproduces the dense gate application") {
    const int length = 6;
    const Vector psi = testutil::random_vector(1 << length, 99);
    MpsState s = MpsState::from_dense(psi, 2, length, 1 << (length / 2), 0.0);
    CHECK((s.to_dense() - psi).norm() < 1e-12);

    const Matrix gate = (Complex(0, 0.37) * kron(pauli::x(), pauli::z())).exp();
    MpsState gated = s;
    gated.apply_gate(LocalOperator::two_site(gate), 2);
    const Vector expected = dense_apply_two(psi, gate, 2, 3, length, 2);
    CHECK((gated.to_dense() - expected).norm() < 1e-12);
}

TEST_CASE("unitary gates preserve the norm without truncation") {
    MpsState s = MpsState::random_state(2, 6, 4, 17, 64, 0.0);
    const double before = s.norm();
    const Matrix u = (Complex(0, 0.81) * kron(pauli::z(), pauli::x())).exp();
    s.apply_gate(LocalOperator::two_site(u), 3);
    CHECK(std::abs(s.norm() - before) < 1e-12);
}

TEST_CASE("apply_gate_longrange: identity between the chain ends is a no-op") {
    MpsState s = MpsState::random_state(2, 6, 6, 23, 64, 0.0);
    const Vector before = s.to_dense();
    s.apply_gate_longrange(LocalOperator::two_site(Matrix::Identity(4, 4)), 0, 5);
    CHECK((s.to_dense() - before).norm() < 1e-10);
}

TEST_CASE("apply_gate_longrange: Z(x)Z between sites 0 and 3 matches the dense result") {
    MpsState s = basis_state({0, 1, 1, 0});
    const Vector before = s.to_dense();
    s.apply_gate_longrange(LocalOperator::two_site(kron(pauli::z(), pauli::z())), 0, 3);
    const Vector expected = dense_apply_two(before, kron(pauli::z(), pauli::z()), 0, 3, 4, 2);
    CHECK((s.to_dense() - expected).norm() < 1e-12);
    // |0110>: both end spins up -> +1
    CHECK((s.to_dense() - before).norm() < 1e-12);
}

TEST_CASE("swap-network correctness for every site pair on a random state") {
    const int length = 6;
    const Vector psi = testutil::random_vector(1 << length, 1234);
    const Matrix op = (0.23 * kron(pauli::z(), pauli::z()) +
                       Complex(0, 0.4) * kron(pauli::x(), pauli::id2()))
                          .exp();
    for (int i = 0; i < length; ++i) {
        for (int j = i + 1; j < length; ++j) {
            MpsState s = MpsState::from_dense(psi, 2, length, 64, 0.0);
            s.apply_gate_longrange(LocalOperator::two_site(op), i, j);
            const Vector expected = dense_apply_two(psi, op, i, j, length, 2);
            CHECK((s.to_dense() - expected).norm() < 1e-10);
        }
    }
}

TEST_CASE("apply_gate_longrange errors") {
    MpsState s = basis_state({0, 0, 0, 0});
    const LocalOperator op = LocalOperator::two_site(Matrix::Identity(4, 4));
    CHECK_THROWS_AS(s.apply_gate_longrange(op, 2, 2), std::invalid_argument);
    CHECK_THROWS_AS(s.apply_gate_longrange(op, 0, 4), std::invalid_argument);
    CHECK_THROWS_AS(s.apply_gate_longrange(op, 3, 1), std::invalid_argument);
}

TEST_CASE("overlap: normalized self-overlap and orthogonal basis states") {
    MpsState s = MpsState::random_state(2, 5, 5, 5, 64, 0.0);
    CHECK(std::abs(overlap(s, s) - 1.0) < 1e-12);
    const MpsState a = basis_state({0, 0, 0});
    const MpsState b = basis_state({1, 0, 0});
    CHECK(std::abs(overlap(a, b)) < 1e-14);
    CHECK_THROWS_AS(overlap(a, basis_state({0, 0})), std::invalid_argument);
}

TEST_CASE("overlap of random states matches the dense inner product") {
    const int length = 5;
    const Vector va = testutil::random_vector(1 << length, 31);
    const Vector vb = testutil::random_vector(1 << length, 32);
    const MpsState a = MpsState::from_dense(va, 2, length, 64, 0.0);
    const MpsState b = MpsState::from_dense(vb, 2, length, 64, 0.0);
    CHECK(std::abs(overlap(a, b) - va.dot(vb)) < 1e-12);
}

TEST_CASE("expect_string: identity string, eigenstates and dense cross-check") {
    MpsState a = MpsState::random_state(2, 6, 6, 55, 64, 0.0);
    MpsState b = MpsState::random_state(2, 6, 6, 56, 64, 0.0);
    CHECK(std::abs(expect_string(a, {}, b) - overlap(a, b)) < 1e-13);

    const MpsState zero = basis_state({0, 0, 0, 0});
    CHECK(std::abs(expect_string(zero, {{0, pauli::z()}}, zero) - 1.0) < 1e-14);

    const int length = 6;
    const Vector psi = testutil::random_vector(1 << length, 57);
    const MpsState s = MpsState::from_dense(psi, 2, length, 64, 0.0);
    Vector dense = psi;
    for (int site : {1, 2, 3}) dense = dense_apply_one(dense, pauli::x(), site, length, 2);
    const Complex expected = psi.dot(dense);
    CHECK(std::abs(expect_string(s, {{1, pauli::x()}, {2, pauli::x()}, {3, pauli::x()}}, s) -
                   expected) < 1e-12);

    CHECK_THROWS_AS(expect_string(s, {{2, pauli::x()}, {2, pauli::x()}}, s),
                    std::invalid_argument);
}

TEST_CASE("truncation cap is honored and discarded weight is reported") {
    const int length = 8;
    const Vector psi = testutil::random_vector(1 << length, 77);
    MpsState s = MpsState::from_dense(psi, 2, length, 1 << (length / 2), 0.0);
    s.set_truncation(3, 0.0);
    const Matrix u = (Complex(0, 0.9) * kron(pauli::x(), pauli::x())).exp();
    const double w = s.apply_gate(LocalOperator::two_site(u), 3);
    CHECK(s.bond_dim(4) <= 3);
    CHECK(w > 0.0);
    CHECK(s.discarded_weight() >= w);
}
