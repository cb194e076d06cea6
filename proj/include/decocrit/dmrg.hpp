#pragma once

#include <cstdint>
#include <vector>

#include "decocrit/mpo.hpp"
#include "decocrit/mps.hpp"

namespace decocrit {

struct DmrgSettings {
    int chi_max = 300;
    double sv_cutoff = 1e-6;
    double sweep_tol = 1e-5;   // stop when |E_sweep - E_prev| < sweep_tol
    int max_sweeps = 40;
    int min_sweeps = 6;        // guards against accidental early Delta-E coincidences
    std::uint64_t seed = 7;
    int init_bond = 8;
    double lanczos_tol = 1e-10;
    int lanczos_max_iter = 100;
    int lanczos_max_basis = 25;
};

struct DmrgResult {
    MpsState state;
    double energy = 0.0;
    bool converged = false;
    int sweeps = 0;
    double last_delta_e = 0.0;
    std::vector<double> sweep_energies;
};

// Two-site DMRG ground-state search. The returned state is normalized and
// canonicalized; non-convergence is reported, not thrown.
DmrgResult ground_state(const MpoOperator& mpo, const DmrgSettings& settings);

} // namespace decocrit
