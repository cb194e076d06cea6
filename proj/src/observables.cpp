#include "decocrit/observables.hpp"

#include <cmath>
#include <stdexcept>
#include <cstdio>

namespace decocrit {

namespace rung_ops {

Matrix zz() {
    Vector d(4);
    d << 1, -1, -1, 1;
    return d.asDiagonal();
}

Matrix xx() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 3) = m(1, 2) = m(2, 1) = m(3, 0) = 1.0;
    return m;
}

Matrix z_upper() {
    Vector d(4);
    d << 1, 1, -1, -1;
    return d.asDiagonal();
}

Matrix x_upper() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 2) = m(2, 0) = m(1, 3) = m(3, 1) = 1.0;
    return m;
}

Matrix depolarize_projector() {
    Matrix m = Matrix::Zero(4, 4);
    m(0, 0) = m(0, 3) = m(3, 0) = m(3, 3) = 0.5;
    return m;
}

} // namespace rung_ops

namespace {

constexpr double kImagAlarm = 1e-6;

double real_checked(Complex v) {
    // imaginary residue above the alarm threshold signals truncation trouble;
    // the real part is still returned
    if (std::abs(v.imag()) > kImagAlarm * std::max(1.0, std::abs(v.real())))
        std::fprintf(stderr, "observables: imaginary residue %.3e on nominally real value\n",
                     v.imag());
    return v.real();
}

std::vector<int> complement_sites(const Subsystem& sub, int length) {
    std::vector<bool> in(length, false);
    for (int k = 0; k < sub.length_sites; ++k) in[(sub.start + k) % length] = true;
    std::vector<int> out;
    for (int j = 0; j < length; ++j)
        if (!in[j]) out.push_back(j);
    return out;
}

} // namespace

double renyi2_entropy(const ChoiState& state, const Subsystem& sub) {
    const int length = state.chain_length();
    if (sub.length_sites < 1 || sub.length_sites > length)
        throw std::invalid_argument("renyi2_entropy: empty or oversized subsystem");

    const std::vector<int> comp = complement_sites(sub, length);

    MpsState filtered = state.mps();
    const LocalOperator proj = LocalOperator::one_site(rung_ops::depolarize_projector());
    for (int j : comp) filtered.apply_gate(proj, j);

    const double vnorm2 = std::abs(overlap(filtered, filtered));
    const double trace = state.trace();
    const double d_comp = std::pow(2.0, static_cast<double>(comp.size()));
    return -std::log(d_comp * vnorm2 / (trace * trace));
}

double mutual_information(const ChoiState& state, int l_a) {
    const int length = state.chain_length();
    if (l_a < 1 || l_a >= length) throw std::invalid_argument("mutual_information: L_A out of range");
    const double s_a = renyi2_entropy(state, Subsystem{0, l_a});
    const double s_b = renyi2_entropy(state, Subsystem{l_a, length - l_a});
    const double s_ab = renyi2_entropy(state, Subsystem{0, length});
    return s_a + s_b - s_ab;
}

double corr_renyi2_zz(const ChoiState& state, int i, int j) {
    if (i == j) throw std::invalid_argument("corr_renyi2_zz: i and j must differ");
    if (i > j) std::swap(i, j);
    const Complex num = expect_string(
        state.mps(), {{i, rung_ops::zz()}, {j, rung_ops::zz()}}, state.mps());
    return real_checked(num / state.self_overlap());
}

double corr_canonical_z(const ChoiState& state, int i, int j) {
    if (i == j) throw std::invalid_argument("corr_canonical_z: i and j must differ");
    if (i > j) std::swap(i, j);
    const MpsState ident = identity_choi(state.chain_length()).mps();
    const Complex num =
        expect_string(ident, {{i, rung_ops::z_upper()}, {j, rung_ops::z_upper()}}, state.mps());
    return real_checked(num / state.identity_overlap());
}

double corr_canonical_x_connected(const ChoiState& state, int i, int j) {
    if (i == j) throw std::invalid_argument("corr_canonical_x_connected: i and j must differ");
    if (i > j) std::swap(i, j);
    const MpsState ident = identity_choi(state.chain_length()).mps();
    const Complex denom = state.identity_overlap();
    const Complex xx =
        expect_string(ident, {{i, rung_ops::x_upper()}, {j, rung_ops::x_upper()}}, state.mps());
    const Complex xi = expect_string(ident, {{i, rung_ops::x_upper()}}, state.mps());
    const Complex xj = expect_string(ident, {{j, rung_ops::x_upper()}}, state.mps());
    return real_checked(xx / denom - (xi / denom) * (xj / denom));
}

double corr_renyi2_string_x(const ChoiState& state, int i, int j) {
    if (i >= j) throw std::invalid_argument("corr_renyi2_string_x: require i < j");
    std::vector<std::pair<int, Matrix>> ops;
    for (int l = i; l < j; ++l) ops.emplace_back(l, rung_ops::xx());
    const Complex num = expect_string(state.mps(), ops, state.mps());
    return real_checked(num / state.self_overlap());
}

std::pair<double, double> susceptibilities(const ChoiState& state) {
    const int length = state.chain_length();
    if (length % 2 != 0) throw std::invalid_argument("susceptibilities: L must be even");
    const auto ci = canonical_z_curve(state);
    const auto cii = renyi2_zz_curve(state);
    double chi_i = 0.0, chi_ii = 0.0;
    for (const auto& [r, v] : ci) chi_i += v;
    for (const auto& [r, v] : cii) chi_ii += v;
    return {2.0 * chi_i / length, 2.0 * chi_ii / length};
}

// ---------------------------------------------------------------------------
// batch sweeps
// ---------------------------------------------------------------------------

namespace {

using kernels::SiteTensor;

// suffix transfer ladders: suffix[j] = contraction of sites j..L-1, so that
// <a|b> = sum(prefix[j] .* suffix[j]) at any cut j
std::vector<Matrix> suffix_ladder(const MpsState& a, const MpsState& b, const Matrix* op) {
    const int length = a.length();
    const int d = a.local_dim();
    std::vector<Matrix> out(length + 1);
    out[length] = Matrix::Ones(1, 1);
    std::vector<Matrix> eb(d);
    for (int j = length - 1; j >= 0; --j) {
        const SiteTensor& ta = a.site(j);
        const SiteTensor& tb = b.site(j);
        for (int s = 0; s < d; ++s) eb[s].noalias() = out[j + 1] * tb[s].transpose();
        Matrix e = Matrix::Zero(ta[0].rows(), tb[0].rows());
        for (int sp = 0; sp < d; ++sp) {
            Matrix acc;
            for (int s = 0; s < d; ++s) {
                const Complex w = op ? (*op)(sp, s) : (sp == s ? Complex(1, 0) : Complex(0, 0));
                if (w == Complex(0, 0)) continue;
                if (acc.size() == 0)
                    acc.noalias() = w * eb[s];
                else
                    acc.noalias() += w * eb[s];
            }
            if (acc.size() != 0) e.noalias() += ta[sp].conjugate() * acc;
        }
        out[j] = std::move(e);
    }
    return out;
}

std::vector<Matrix> prefix_ladder(const MpsState& a, const MpsState& b, const Matrix* op) {
    const int length = a.length();
    std::vector<Matrix> out(length + 1);
    out[0] = Matrix::Ones(1, 1);
    for (int j = 0; j < length; ++j) {
        if (op)
            out[j + 1] = kernels::transfer_update_op(out[j], a.site(j), b.site(j), *op);
        else
            out[j + 1] = kernels::transfer_update(out[j], a.site(j), b.site(j));
    }
    return out;
}

Complex combine(const Matrix& prefix, const Matrix& suffix) {
    return (prefix.cwiseProduct(suffix)).sum();
}

// generic two-point curve: value(r) = <bra| M_0 M_r |ket> / denom, r = 1..L/2
std::vector<std::pair<int, double>> two_point_curve(const MpsState& bra, const MpsState& ket,
                                                    const Matrix& m, Complex denom) {
    const int length = bra.length();
    const std::vector<Matrix> plain_suffix = suffix_ladder(bra, ket, nullptr);
    std::vector<std::pair<int, double>> out;
    Matrix e = kernels::transfer_update_op(Matrix::Ones(1, 1), bra.site(0), ket.site(0), m);
    for (int r = 1; r <= length / 2; ++r) {
        const Matrix er = kernels::transfer_update_op(e, bra.site(r), ket.site(r), m);
        out.emplace_back(r, (combine(er, plain_suffix[r + 1]) / denom).real());
        if (r < length / 2) e = kernels::transfer_update(e, bra.site(r), ket.site(r));
    }
    return out;
}

} // namespace

std::vector<std::pair<int, double>> canonical_z_curve(const ChoiState& state) {
    const MpsState ident = identity_choi(state.chain_length()).mps();
    return two_point_curve(ident, state.mps(), rung_ops::z_upper(), state.identity_overlap());
}

std::vector<std::pair<int, double>> canonical_x_connected_curve(const ChoiState& state) {
    const MpsState ident = identity_choi(state.chain_length()).mps();
    const Complex denom = state.identity_overlap();
    auto curve = two_point_curve(ident, state.mps(), rung_ops::x_upper(), denom);
    // subtract the one-point functions
    const int length = state.chain_length();
    const Matrix xu = rung_ops::x_upper();
    std::vector<Complex> one(length);
    const std::vector<Matrix> plain_prefix = prefix_ladder(ident, state.mps(), nullptr);
    const std::vector<Matrix> plain_suffix = suffix_ladder(ident, state.mps(), nullptr);
    for (int r = 0; r < length; ++r) {
        const Matrix er = kernels::transfer_update_op(plain_prefix[r], ident.site(r),
                                                      state.mps().site(r), xu);
        one[r] = combine(er, plain_suffix[r + 1]) / denom;
    }
    for (auto& [r, v] : curve) v -= (one[0] * one[r]).real();
    return curve;
}

std::vector<std::pair<int, double>> renyi2_zz_curve(const ChoiState& state) {
    return two_point_curve(state.mps(), state.mps(), rung_ops::zz(), state.self_overlap());
}

std::vector<std::pair<int, double>> renyi2_string_x_curve(const ChoiState& state) {
    const int length = state.chain_length();
    const MpsState& mps = state.mps();
    const Matrix xx = rung_ops::xx();
    const std::vector<Matrix> plain_suffix = suffix_ladder(mps, mps, nullptr);
    const Complex denom = state.self_overlap();
    std::vector<std::pair<int, double>> out;
    Matrix e = Matrix::Ones(1, 1);
    for (int r = 1; r <= length / 2; ++r) {
        e = kernels::transfer_update_op(e, mps.site(r - 1), mps.site(r - 1), xx);
        out.emplace_back(r, (combine(e, plain_suffix[r]) / denom).real());
    }
    return out;
}

std::vector<std::pair<int, double>> s2_profile(const ChoiState& state) {
    const int length = state.chain_length();
    const MpsState& mps = state.mps();
    const Matrix proj = rung_ops::depolarize_projector();

    const std::vector<Matrix> plain_prefix = prefix_ladder(mps, mps, nullptr);
    const std::vector<Matrix> proj_suffix = suffix_ladder(mps, mps, &proj);

    const double trace = state.trace();
    std::vector<std::pair<int, double>> out;
    for (int l_a = 1; l_a < length; ++l_a) {
        // D on the complement [L_A, L); D is a projector so <v|v> = <rho|D|rho>
        const double v2 = std::abs(combine(plain_prefix[l_a], proj_suffix[l_a]));
        const double d_comp = std::pow(2.0, static_cast<double>(length - l_a));
        out.emplace_back(l_a, -std::log(d_comp * v2 / (trace * trace)));
    }
    return out;
}

std::vector<std::pair<int, double>> mi_profile(const ChoiState& state) {
    const int length = state.chain_length();
    const MpsState& mps = state.mps();
    const Matrix proj = rung_ops::depolarize_projector();

    const std::vector<Matrix> plain_prefix = prefix_ladder(mps, mps, nullptr);
    const std::vector<Matrix> proj_prefix = prefix_ladder(mps, mps, &proj);
    const std::vector<Matrix> plain_suffix = suffix_ladder(mps, mps, nullptr);
    const std::vector<Matrix> proj_suffix = suffix_ladder(mps, mps, &proj);

    const double trace = state.trace();
    const double t2 = trace * trace;
    const double s_full = -std::log(std::abs(combine(plain_prefix[length], plain_suffix[length])) / t2);

    std::vector<std::pair<int, double>> out;
    for (int l_a = 1; l_a < length; ++l_a) {
        const double da = std::pow(2.0, static_cast<double>(l_a));
        const double db = std::pow(2.0, static_cast<double>(length - l_a));
        const double s_a = -std::log(db * std::abs(combine(plain_prefix[l_a], proj_suffix[l_a])) / t2);
        const double s_b = -std::log(da * std::abs(combine(proj_prefix[l_a], plain_suffix[l_a])) / t2);
        out.emplace_back(l_a, s_a + s_b - s_full);
    }
    return out;
}

ObservableRecord measure_all(const ChoiState& state, const ChannelParams& params,
                             const ObservableFlags& flags) {
    ObservableRecord rec;
    rec.params = params;
    rec.length = state.chain_length();
    rec.jh_ratio = params.coupling_j / params.field_h;
    rec.truncation_budget = state.mps().discarded_weight();
    if (flags.s2_profile) rec.s2_profile = s2_profile(state);
    if (flags.mi_profile) rec.mi_profile = mi_profile(state);
    if (flags.correlators) {
        rec.czz_curve = canonical_z_curve(state);
        rec.cxx_curve = canonical_x_connected_curve(state);
        rec.c2zz_curve = renyi2_zz_curve(state);
        rec.cstx_curve = renyi2_string_x_curve(state);
    }
    if (flags.susceptibilities) {
        if (!rec.czz_curve.empty() && !rec.c2zz_curve.empty()) {
            double chi_i = 0.0, chi_ii = 0.0;
            for (const auto& [r, v] : rec.czz_curve) chi_i += v;
            for (const auto& [r, v] : rec.c2zz_curve) chi_ii += v;
            rec.chi_i = 2.0 * chi_i / rec.length;
            rec.chi_ii = 2.0 * chi_ii / rec.length;
        } else {
            const auto [ci, cii] = susceptibilities(state);
            rec.chi_i = ci;
            rec.chi_ii = cii;
        }
    }
    return rec;
}

} // namespace decocrit
