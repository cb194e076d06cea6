#pragma once

#include <optional>

#include "decocrit/mps.hpp"

// Doubled-space (vectorized density matrix) machinery. A ChoiState is an MPS
// with one 4-dimensional "rung" site per physical spin; the rung basis is
// ordered |uu ul>, with the upper leg carrying the conjugated copy:
// s_rung = 2*s_upper + s_lower.

namespace decocrit {

class ChoiState {
public:
    ChoiState() = default;
    ChoiState(MpsState mps, int chain_length);

    const MpsState& mps() const { return mps_; }
    MpsState& mps_mutable();  // invalidates cached contractions
    int chain_length() const { return length_; }

    // <<rho|rho>>
    Complex self_overlap() const;
    // <<1|rho>> against the unit-norm identity vector
    Complex identity_overlap() const;
    // Tr rho = 2^(L/2) <<1|rho>>
    double trace() const;

    void invalidate_caches();

private:
    MpsState mps_;
    int length_ = 0;
    mutable std::optional<Complex> self_overlap_;
    mutable std::optional<Complex> identity_overlap_;
};

// |psi*> (x) |psi> with rung-fused sites; bond dimensions are the squares of
// psi's, no truncation. Overall scale is ||psi||^2.
ChoiState double_pure(const MpsState& psi);

// Same state built directly in truncated form: kept rung-bond states are the
// largest Schmidt-value products of the two copies, selected per bond by the
// usual cutoff/cap rule. Avoids materializing the chi^2 tensors, which is
// what makes L ~ 20+ pipelines fit in memory.
ChoiState double_pure_truncated(const MpsState& psi, int chi_max, double sv_cutoff);

// Product state with every rung in (|uu> + |ll>)/sqrt(2); unit norm.
ChoiState identity_choi(int length, int chi_max = 4, double sv_cutoff = 0.0);

// Column-stacked Choi vector of a dense density matrix in the same rung
// ordering (oracle path, L <= 12). Unit global prefactor.
Vector vectorize_dense(const Matrix& rho);

// Exact ChoiState from a dense density matrix (test sizes only).
ChoiState choi_from_dense(const Matrix& rho, int chi_max, double sv_cutoff);

} // namespace decocrit
