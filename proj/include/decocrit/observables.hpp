#pragma once

#include <vector>

#include "decocrit/channels.hpp"
#include "decocrit/choi.hpp"

// Measurements on a ChoiState: Renyi-2 subsystem entropy via the rung
// depolarization projector, Renyi-2 mutual information, the four correlator
// families and the reduced susceptibilities. Everything here is invariant
// under rescaling of the state.

namespace decocrit {

struct Subsystem {
    int start = 0;
    int length_sites = 0;  // contiguous range [start, start + length_sites), mod L
};

namespace rung_ops {
Matrix zz();                    // Zu (x) Zl
Matrix xx();                    // Xu (x) Xl
Matrix z_upper();               // Zu (x) I
Matrix x_upper();               // Xu (x) I
Matrix depolarize_projector();  // (1/4)[II + XX - YY + ZZ], projects onto |t>/sqrt(2)
} // namespace rung_ops

// S2 of the trace-normalized reduced state on `sub`; the complement sites are
// filtered through the depolarization projector and the norm of the filtered
// vector gives Tr[rho_X^2].
double renyi2_entropy(const ChoiState& state, const Subsystem& sub);

// S2_A + S2_B - S2_{A u B} with A = [0, L_A), B = [L_A, L).
double mutual_information(const ChoiState& state, int l_a);

// <<rho| Zu_i Zu_j Zl_i Zl_j |rho>> / <<rho|rho>>
double corr_renyi2_zz(const ChoiState& state, int i, int j);
// Tr[rho Z_i Z_j] via the identity vector
double corr_canonical_z(const ChoiState& state, int i, int j);
// Tr[rho X_i X_j] - Tr[rho X_i] Tr[rho X_j]
double corr_canonical_x_connected(const ChoiState& state, int i, int j);
// <<rho| prod_{i<=l<j} Xu_l Xl_l |rho>> / <<rho|rho>>, i < j
double corr_renyi2_string_x(const ChoiState& state, int i, int j);

// (chi_I, chi_II) = (2/L) sum_{r=1}^{L/2} of the canonical / Renyi-2 ZZ curves.
std::pair<double, double> susceptibilities(const ChoiState& state);

// ----------------------------------------------------------------------------
// Batch evaluation (one transfer sweep per family instead of one per point);
// must agree with the single-point operations above.
// ----------------------------------------------------------------------------

// MI^(2)(L_A) for L_A = 1..L-1
std::vector<std::pair<int, double>> mi_profile(const ChoiState& state);
// S2 of A = [0, L_A) for L_A = 1..L-1
std::vector<std::pair<int, double>> s2_profile(const ChoiState& state);
// correlator curves from the origin, r = 1..L/2
std::vector<std::pair<int, double>> canonical_z_curve(const ChoiState& state);
std::vector<std::pair<int, double>> canonical_x_connected_curve(const ChoiState& state);
std::vector<std::pair<int, double>> renyi2_zz_curve(const ChoiState& state);
std::vector<std::pair<int, double>> renyi2_string_x_curve(const ChoiState& state);

struct ObservableFlags {
    bool s2_profile = true;
    bool mi_profile = true;
    bool correlators = true;
    bool susceptibilities = true;
};

struct ObservableRecord {
    ChannelParams params;
    int length = 0;
    double jh_ratio = 1.0;
    std::vector<std::pair<int, double>> s2_profile;
    std::vector<std::pair<int, double>> mi_profile;
    std::vector<std::pair<int, double>> czz_curve;   // canonical ZZ
    std::vector<std::pair<int, double>> cxx_curve;   // canonical connected XX
    std::vector<std::pair<int, double>> c2zz_curve;  // Renyi-2 ZZ
    std::vector<std::pair<int, double>> cstx_curve;  // Renyi-2 X string
    double chi_i = 0.0;
    double chi_ii = 0.0;
    double truncation_budget = 0.0;
    double dmrg_energy = 0.0;
    bool dmrg_converged = true;
};

ObservableRecord measure_all(const ChoiState& state, const ChannelParams& params,
                             const ObservableFlags& flags = {});

} // namespace decocrit
