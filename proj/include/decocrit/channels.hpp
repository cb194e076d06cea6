#pragma once

#include <vector>

#include "decocrit/choi.hpp"

// The X+ZZ decoherence acting on a ChoiState as local filtering operators,
// plus the parameter maps between decoherence strengths and filter strengths.

namespace decocrit {

// tanh^-1[p/(1-p)] for p in [0, 1/2); +infinity at p = 1/2 (maximal decoherence).
double tau_from_p(double p);

// critical-line constraint p_x = 1/2 - (1/2)(1 - 2 p_zz)^(1/J)
double px_from_pzz(double p_zz, double coupling_j);

struct ChannelParams {
    double p_zz = 0.0;
    double p_x = 0.0;
    double coupling_j = 1.0;
    double field_h = 1.0;

    static ChannelParams critical_line(double p_zz, double coupling_j, double field_h);
    static ChannelParams explicit_p(double p_zz, double p_x, double coupling_j, double field_h);

    double tau_zz() const { return tau_from_p(p_zz); }
    double tau_x() const { return tau_from_p(p_x); }
    bool maximal_zz() const { return p_zz == 0.5; }
    bool maximal_x() const { return p_x == 0.5; }

    void validate() const;
};

// The four Kraus operators of the combined two-site channel cell at strength
// p_D: {(1-p)I, sqrt(p(1-p)) X_j, sqrt(p(1-p)) Z_j Z_{j+1}, p X_j Z_j Z_{j+1}},
// each as a 4x4 matrix on the (j, j+1) spin pair.
std::vector<Matrix> kraus_set(double p_d);

// rung-local filter matrices
Matrix filter_x(double p_x);     // 4x4:   (1-p) I + p X(x)X
Matrix filter_zz(double p_zz);   // 16x16: (1-p) I + p (ZuZl)(x)(ZuZl)

struct DecoherenceReport {
    double total_discarded = 0.0;
    double max_gate_discarded = 0.0;
    int max_bond = 1;
    bool alarm = false;
};

// Applies every one-rung X filter, then the ZZ bond filters (even bonds, odd
// bonds, then the wrap bond through the swap network). The state is left
// unnormalized; consumers are scale invariant. Truncation above
// alarm_threshold per gate is reported, not fatal.
DecoherenceReport apply_decoherence(ChoiState& state, const ChannelParams& params,
                                    double alarm_threshold = 1e-4);

} // namespace decocrit
