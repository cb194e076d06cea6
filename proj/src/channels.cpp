#include "decocrit/channels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "decocrit/pauli.hpp"

namespace decocrit {

double tau_from_p(double p) {
    if (p < 0.0 || p > 0.5) throw std::invalid_argument("tau_from_p: p must be in [0, 1/2]");
    if (p == 0.5) return std::numeric_limits<double>::infinity();
    return std::atanh(p / (1.0 - p));
}

double px_from_pzz(double p_zz, double coupling_j) {
    if (p_zz < 0.0 || p_zz > 0.5)
        throw std::invalid_argument("px_from_pzz: p_zz must be in [0, 1/2]");
    if (coupling_j <= 0.0) throw std::invalid_argument("px_from_pzz: J must be > 0");
    return 0.5 - 0.5 * std::pow(1.0 - 2.0 * p_zz, 1.0 / coupling_j);
}

ChannelParams ChannelParams::critical_line(double p_zz, double coupling_j, double field_h) {
    ChannelParams p;
    p.p_zz = p_zz;
    p.coupling_j = coupling_j;
    p.field_h = field_h;
    p.p_x = px_from_pzz(p_zz, coupling_j);
    p.validate();
    return p;
}

ChannelParams ChannelParams::explicit_p(double p_zz, double p_x, double coupling_j,
                                        double field_h) {
    ChannelParams p;
    p.p_zz = p_zz;
    p.p_x = p_x;
    p.coupling_j = coupling_j;
    p.field_h = field_h;
    p.validate();
    return p;
}

void ChannelParams::validate() const {
    if (p_zz < 0.0 || p_zz > 0.5) throw std::invalid_argument("ChannelParams: p_zz out of [0, 1/2]");
    if (p_x < 0.0 || p_x > 0.5) throw std::invalid_argument("ChannelParams: p_x out of [0, 1/2]");
    if (coupling_j <= 0.0) throw std::invalid_argument("ChannelParams: J must be > 0");
    if (field_h <= 0.0) throw std::invalid_argument("ChannelParams: h must be > 0");
}

std::vector<Matrix> kraus_set(double p_d) {
    if (p_d < 0.0 || p_d > 0.5) throw std::invalid_argument("kraus_set: p must be in [0, 1/2]");
    const Matrix id = pauli::id2();
    const Matrix x = pauli::x();
    const Matrix z = pauli::z();
    std::vector<Matrix> k(4);
    k[0] = (1.0 - p_d) * kron(id, id);
    k[1] = std::sqrt(p_d * (1.0 - p_d)) * kron(x, id);
    k[2] = std::sqrt(p_d * (1.0 - p_d)) * kron(z, z);
    k[3] = p_d * kron(x * z, z);
    return k;
}

Matrix filter_x(double p_x) {
    // rung X(x)X flips both legs
    Matrix xx = Matrix::Zero(4, 4);
    xx(0, 3) = xx(1, 2) = xx(2, 1) = xx(3, 0) = 1.0;
    return (1.0 - p_x) * Matrix::Identity(4, 4) + p_x * xx;
}

Matrix filter_zz(double p_zz) {
    Vector d(4);
    d << 1, -1, -1, 1;  // rung Zu Zl
    Matrix zz = Matrix::Zero(16, 16);
    for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) zz(a * 4 + b, a * 4 + b) = d(a) * d(b);
    return (1.0 - p_zz) * Matrix::Identity(16, 16) + p_zz * zz;
}

DecoherenceReport apply_decoherence(ChoiState& state, const ChannelParams& params,
                                    double alarm_threshold) {
    params.validate();
    const int length = state.chain_length();
    MpsState& mps = state.mps_mutable();
    if (mps.local_dim() != 4) throw std::invalid_argument("apply_decoherence: not a ChoiState");

    DecoherenceReport report;
    auto track = [&](double w) {
        report.total_discarded += w;
        report.max_gate_discarded = std::max(report.max_gate_discarded, w);
        if (w > alarm_threshold) report.alarm = true;
    };

    const LocalOperator fx = LocalOperator::one_site(filter_x(params.p_x));
    for (int j = 0; j < length; ++j) track(mps.apply_gate(fx, j));

    const LocalOperator fzz = LocalOperator::two_site(filter_zz(params.p_zz));
    for (int j = 0; j + 1 < length; j += 2) track(mps.apply_gate(fzz, j));
    for (int j = 1; j + 1 < length; j += 2) track(mps.apply_gate(fzz, j));
    if (length > 2) {
        // wrap bond (L-1, 0); the filter is symmetric under site exchange
        track(mps.apply_gate_longrange(fzz, 0, length - 1));
    } else if (length == 2) {
        track(mps.apply_gate(fzz, 0));
    }

    report.max_bond = mps.max_bond();
    state.invalidate_caches();
    return report;
}

} // namespace decocrit
