#pragma once

#include <vector>

#include "decocrit/observables.hpp"
#include "decocrit/pauli.hpp"

// Dense, exact reference implementation for L <= 12. Shares nothing with the
// MPS path beyond the Pauli constants; every cross-check in the test suite
// compares against the values computed here.

namespace decocrit::oracle {

struct DenseState {
    Vector amplitudes;
    int length = 0;
};

struct DenseDensityMatrix {
    Matrix matrix;
    int length = 0;  // L <= 12
};

// Dense TFIM Hamiltonian (test helper, L <= 12 but 2^L x 2^L, use sparingly).
Matrix dense_tfim(int length, double coupling_j, double field_h, bool periodic);

// Lowest eigenpair of H0, converged to machine precision; the first nonzero
// amplitude is made positive real.
std::pair<DenseState, double> exact_ground_state(int length, double coupling_j, double field_h,
                                                 bool periodic);

DenseDensityMatrix pure_density(const DenseState& psi);

// All E_X then all E_ZZ (wrap bond included), by direct conjugation sums.
DenseDensityMatrix exact_apply_channel(const DenseDensityMatrix& rho, double p_zz, double p_x);

// -log Tr[(Tr_comp rho)^2] of the trace-normalized state.
double exact_renyi2(const DenseDensityMatrix& rho, const Subsystem& sub);

double exact_mutual_information(const DenseDensityMatrix& rho, int l_a);

// Every curve and susceptibility by direct traces.
ObservableRecord exact_correlators(const DenseDensityMatrix& rho);

} // namespace decocrit::oracle
