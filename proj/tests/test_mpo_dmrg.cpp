#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "decocrit/dmrg.hpp"
#include "decocrit/ed_oracle.hpp"
#include "decocrit/pauli.hpp"

using namespace decocrit;

TEST_CASE("tfim mpo: decoupled spins at J=0") {
    const MpoOperator mpo = build_tfim_mpo(3, 0.0, 1.0, false);
    const Matrix h = mpo.to_dense();
    Matrix expected = Matrix::Zero(8, 8);
    for (int j = 0; j < 3; ++j) expected -= embed_site_op(pauli::x(), j, 3);
    CHECK((h - expected).norm() < 1e-13);
}

TEST_CASE("tfim mpo: classical Ising ground energy at h=0") {
    const MpoOperator mpo = build_tfim_mpo(4, 1.0, 0.0, true);
    const Matrix h = mpo.to_dense();
    // diagonal matrix; |0000> is an eigenstate at the ground energy -4
    CHECK(std::abs(h(0, 0).real() + 4.0) < 1e-13);
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    CHECK(std::abs(es.eigenvalues()(0) + 4.0) < 1e-12);
}

TEST_CASE("tfim mpo equals the directly constructed dense Hamiltonian (L=8, PBC)") {
    const MpoOperator mpo = build_tfim_mpo(8, 1.0, 1.0, true);
    const Matrix h = mpo.to_dense();
    const Matrix expected = oracle::dense_tfim(8, 1.0, 1.0, true);
    CHECK((h - expected).norm() < 1e-11);
}

TEST_CASE("tfim mpo: open boundaries and unequal couplings") {
    const MpoOperator mpo = build_tfim_mpo(6, 1.3, 0.7, false);
    const Matrix expected = oracle::dense_tfim(6, 1.3, 0.7, false);
    CHECK((mpo.to_dense() - expected).norm() < 1e-11);
    CHECK_THROWS_AS(build_tfim_mpo(1, 1.0, 1.0, false), std::invalid_argument);
}

TEST_CASE("dmrg: product ground state of the pure field Hamiltonian") {
    const MpoOperator mpo = build_tfim_mpo(2, 0.0, 1.0, false);
    DmrgSettings settings;
    settings.sweep_tol = 1e-12;
    const DmrgResult res = ground_state(mpo, settings);
    CHECK(res.converged);
    CHECK(std::abs(res.energy + 2.0) < 1e-10);
    // |++> has all amplitudes 1/2
    const Vector v = res.state.to_dense();
    for (int i = 0; i < 4; ++i) CHECK(std::abs(std::abs(v(i)) - 0.5) < 1e-8);
}

TEST_CASE("dmrg matches exact diagonalization at the critical point (L=8, PBC)") {
    const MpoOperator mpo = build_tfim_mpo(8, 1.0, 1.0, true);
    DmrgSettings settings;
    settings.chi_max = 64;
    settings.sv_cutoff = 1e-12;
    settings.sweep_tol = 1e-10;
    const DmrgResult res = ground_state(mpo, settings);
    const auto [psi, e0] = oracle::exact_ground_state(8, 1.0, 1.0, true);
    CHECK(std::abs(res.energy - e0) < 1e-6);
    CHECK(res.energy >= e0 - 1e-9);  // variational
}

TEST_CASE("dmrg state overlaps the exact ground state (L=12, PBC)") {
    const MpoOperator mpo = build_tfim_mpo(12, 1.0, 1.0, true);
    DmrgSettings settings;
    settings.chi_max = 128;
    settings.sv_cutoff = 1e-12;
    settings.sweep_tol = 1e-11;
    settings.max_sweeps = 60;
    const DmrgResult res = ground_state(mpo, settings);
    const auto [psi, e0] = oracle::exact_ground_state(12, 1.0, 1.0, true);
    CHECK(std::abs(res.energy - e0) < 1e-8);

    const Vector v = res.state.to_dense();
    const double fidelity = std::abs(psi.amplitudes.dot(v));
    CHECK(fidelity > 1.0 - 1e-8);
}

TEST_CASE("dmrg sweep energies are non-increasing") {
    const MpoOperator mpo = build_tfim_mpo(10, 1.0, 1.0, true);
    DmrgSettings settings;
    settings.sweep_tol = 1e-9;
    const DmrgResult res = ground_state(mpo, settings);
    REQUIRE(res.sweep_energies.size() >= 2);
    for (std::size_t i = 1; i < res.sweep_energies.size(); ++i)
        CHECK(res.sweep_energies[i] <= res.sweep_energies[i - 1] + 1e-10);
}

TEST_CASE("dmrg ground state respects the Z2 and translation symmetries") {
    const MpoOperator mpo = build_tfim_mpo(10, 1.0, 1.0, true);
    DmrgSettings settings;
    settings.chi_max = 64;
    settings.sv_cutoff = 1e-10;
    settings.sweep_tol = 1e-10;
    const DmrgResult res = ground_state(mpo, settings);
    const MpsState& psi = res.state;

    for (int j = 0; j < psi.length(); ++j)
        CHECK(std::abs(expect_string(psi, {{j, pauli::z()}}, psi)) < 1e-6);

    const double zz0 =
        expect_string(psi, {{0, pauli::z()}, {1, pauli::z()}}, psi).real();
    for (int j = 1; j + 1 < psi.length(); ++j) {
        const double zz =
            expect_string(psi, {{j, pauli::z()}, {j + 1, pauli::z()}}, psi).real();
        CHECK(std::abs(zz - zz0) < 1e-5);
    }
}

TEST_CASE("dmrg reports non-convergence instead of throwing") {
    const MpoOperator mpo = build_tfim_mpo(12, 1.0, 1.0, true);
    DmrgSettings settings;
    settings.sweep_tol = 1e-14;
    settings.max_sweeps = 3;  // below the mandatory minimum, cannot converge
    const DmrgResult res = ground_state(mpo, settings);
    CHECK_FALSE(res.converged);
    CHECK(res.last_delta_e > 0.0);
    CHECK(res.state.length() == 12);
}
