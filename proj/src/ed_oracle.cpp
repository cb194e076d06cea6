#include "decocrit/ed_oracle.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "decocrit/kernels.hpp"

namespace decocrit::oracle {

namespace {

inline int site_bit(std::int64_t basis, int site, int length) {
    return static_cast<int>((basis >> (length - 1 - site)) & 1);
}

inline double z_value(std::int64_t basis, int site, int length) {
    return site_bit(basis, site, length) ? -1.0 : 1.0;
}

// H |v> without forming the matrix
Vector apply_tfim(const Vector& v, int length, double coupling_j, double field_h, bool periodic) {
    const std::int64_t dim = std::int64_t(1) << length;
    Vector out = Vector::Zero(dim);
    const int nbonds = periodic ? length : length - 1;
    for (std::int64_t b = 0; b < dim; ++b) {
        double diag = 0.0;
        for (int j = 0; j < nbonds; ++j)
            diag -= coupling_j * z_value(b, j, length) * z_value(b, (j + 1) % length, length);
        out(b) += diag * v(b);
        for (int j = 0; j < length; ++j) {
            const std::int64_t flipped = b ^ (std::int64_t(1) << (length - 1 - j));
            out(flipped) -= field_h * v(b);
        }
    }
    return out;
}

} // namespace

Matrix dense_tfim(int length, double coupling_j, double field_h, bool periodic) {
    if (length > 12) throw std::invalid_argument("dense_tfim: L too large");
    const std::int64_t dim = std::int64_t(1) << length;
    Matrix h = Matrix::Zero(dim, dim);
    const int nbonds = periodic ? length : length - 1;
    for (std::int64_t b = 0; b < dim; ++b) {
        for (int j = 0; j < nbonds; ++j)
            h(b, b) -= coupling_j * z_value(b, j, length) * z_value(b, (j + 1) % length, length);
        for (int j = 0; j < length; ++j) {
            const std::int64_t flipped = b ^ (std::int64_t(1) << (length - 1 - j));
            h(flipped, b) -= field_h;
        }
    }
    return h;
}

std::pair<DenseState, double> exact_ground_state(int length, double coupling_j, double field_h,
                                                 bool periodic) {
    if (length > 12) throw std::invalid_argument("exact_ground_state: L too large");
    const std::int64_t dim = std::int64_t(1) << length;

    // Lanczos with full reorthogonalization, restarted until the residual is
    // at machine level; deterministic fixed-seed start
    std::mt19937_64 rng(20240901u);
    std::normal_distribution<double> dist(0.0, 1.0);
    Vector v(dim);
    for (std::int64_t i = 0; i < dim; ++i) v(i) = Complex(dist(rng), dist(rng));
    v /= v.norm();

    double ev = 0.0;
    for (int restart = 0; restart < 30; ++restart) {
        std::vector<Vector> basis{v};
        std::vector<double> alpha, beta;
        const int max_basis = static_cast<int>(std::min<std::int64_t>(dim, 120));
        for (int it = 0; it < max_basis; ++it) {
            Vector w = apply_tfim(basis.back(), length, coupling_j, field_h, periodic);
            alpha.push_back(std::real(basis.back().dot(w)));
            w -= alpha.back() * basis.back();
            if (basis.size() > 1) w -= beta.back() * basis[basis.size() - 2];
            for (const Vector& u : basis) w -= u.dot(w) * u;
            const double b = w.norm();
            if (b < 1e-14 || it + 1 == max_basis) break;
            beta.push_back(b);
            basis.push_back(w / b);
        }
        const int k = static_cast<int>(alpha.size());
        Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
        for (int i = 0; i < k; ++i) tri(i, i) = alpha[i];
        for (int i = 0; i + 1 < k; ++i) tri(i, i + 1) = tri(i + 1, i) = beta[i];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
        ev = es.eigenvalues()(0);
        Vector ritz = Vector::Zero(dim);
        for (int i = 0; i < k; ++i) ritz += es.eigenvectors()(i, 0) * basis[i];
        ritz /= ritz.norm();
        v = ritz;
        const Vector hv = apply_tfim(v, length, coupling_j, field_h, periodic);
        if ((hv - ev * v).norm() < 1e-12 * std::max(1.0, std::abs(ev))) break;
    }

    // sign convention: first amplitude above noise level is positive real
    for (std::int64_t i = 0; i < dim; ++i) {
        if (std::abs(v(i)) > 1e-10) {
            v *= std::conj(v(i)) / std::abs(v(i));
            break;
        }
    }
    return {DenseState{std::move(v), length}, ev};
}

DenseDensityMatrix pure_density(const DenseState& psi) {
    DenseDensityMatrix rho;
    rho.length = psi.length;
    rho.matrix = psi.amplitudes * psi.amplitudes.adjoint();
    return rho;
}

DenseDensityMatrix exact_apply_channel(const DenseDensityMatrix& rho, double p_zz, double p_x) {
    if (p_zz < 0 || p_zz > 0.5 || p_x < 0 || p_x > 0.5)
        throw std::invalid_argument("exact_apply_channel: p out of [0, 1/2]");
    const int length = rho.length;
    const std::int64_t dim = std::int64_t(1) << length;

    DenseDensityMatrix out = rho;
    const std::vector<Complex> unit_phase(dim, Complex(1, 0));
    std::vector<int> identity_perm(dim);
    for (std::int64_t i = 0; i < dim; ++i) identity_perm[i] = static_cast<int>(i);

    // all E_X first
    for (int j = 0; j < length; ++j) {
        std::vector<int> perm(dim);
        const std::int64_t mask = std::int64_t(1) << (length - 1 - j);
        for (std::int64_t i = 0; i < dim; ++i) perm[i] = static_cast<int>(i ^ mask);
        out.matrix = kernels::pauli_mix(out.matrix, perm, unit_phase, 1.0 - p_x, p_x);
    }
    // then all E_ZZ including the wrap bond
    for (int j = 0; j < length; ++j) {
        std::vector<Complex> phase(dim);
        for (std::int64_t i = 0; i < dim; ++i)
            phase[i] = z_value(i, j, length) * z_value(i, (j + 1) % length, length);
        out.matrix = kernels::pauli_mix(out.matrix, identity_perm, phase, 1.0 - p_zz, p_zz);
    }
    return out;
}

double exact_renyi2(const DenseDensityMatrix& rho, const Subsystem& sub) {
    const int length = rho.length;
    if (sub.length_sites < 1 || sub.length_sites > length)
        throw std::invalid_argument("exact_renyi2: empty or oversized subsystem");
    const double tr = rho.matrix.trace().real();
    unsigned keep_mask = 0;
    for (int k = 0; k < sub.length_sites; ++k) keep_mask |= 1u << ((sub.start + k) % length);
    const Matrix reduced = kernels::partial_trace(rho.matrix, keep_mask, length) / tr;
    Complex purity(0, 0);
    for (Eigen::Index i = 0; i < reduced.rows(); ++i)
        for (Eigen::Index j = 0; j < reduced.cols(); ++j) purity += reduced(i, j) * reduced(j, i);
    return -std::log(purity.real());
}

double exact_mutual_information(const DenseDensityMatrix& rho, int l_a) {
    const int length = rho.length;
    if (l_a < 1 || l_a >= length)
        throw std::invalid_argument("exact_mutual_information: L_A out of range");
    return exact_renyi2(rho, Subsystem{0, l_a}) + exact_renyi2(rho, Subsystem{l_a, length - l_a}) -
           exact_renyi2(rho, Subsystem{0, length});
}

ObservableRecord exact_correlators(const DenseDensityMatrix& rho) {
    const int length = rho.length;
    const std::int64_t dim = std::int64_t(1) << length;
    const double tr = rho.matrix.trace().real();
    const Matrix& m = rho.matrix;

    double tr2 = 0.0;
    for (std::int64_t b = 0; b < dim; ++b)
        for (std::int64_t c = 0; c < dim; ++c) tr2 += std::real(m(b, c) * m(c, b));

    ObservableRecord rec;
    rec.length = length;

    for (int r = 1; r <= length / 2; ++r) {
        // canonical ZZ: Tr[rho Z_0 Z_r] (Z is diagonal)
        double czz = 0.0;
        for (std::int64_t b = 0; b < dim; ++b)
            czz += std::real(m(b, b)) * z_value(b, 0, length) * z_value(b, r, length);
        rec.czz_curve.emplace_back(r, czz / tr);

        // canonical connected XX
        const std::int64_t m0 = std::int64_t(1) << (length - 1);
        const std::int64_t mr = std::int64_t(1) << (length - 1 - r);
        Complex xx(0, 0), x0(0, 0), xr(0, 0);
        for (std::int64_t b = 0; b < dim; ++b) {
            xx += m(b, b ^ m0 ^ mr);
            x0 += m(b, b ^ m0);
            xr += m(b, b ^ mr);
        }
        rec.cxx_curve.emplace_back(r, std::real(xx / tr - (x0 / tr) * (xr / tr)));

        // Renyi-2 ZZ: Tr[Z_0 Z_r rho Z_r Z_0 rho] / Tr[rho^2]
        double c2 = 0.0;
        for (std::int64_t b = 0; b < dim; ++b) {
            const double zb = z_value(b, 0, length) * z_value(b, r, length);
            for (std::int64_t c = 0; c < dim; ++c) {
                const double zc = z_value(c, 0, length) * z_value(c, r, length);
                c2 += zb * zc * std::real(m(b, c) * m(c, b));
            }
        }
        rec.c2zz_curve.emplace_back(r, c2 / tr2);

        // Renyi-2 X string over sites [0, r)
        std::int64_t smask = 0;
        for (int l = 0; l < r; ++l) smask |= std::int64_t(1) << (length - 1 - l);
        double cs = 0.0;
        for (std::int64_t b = 0; b < dim; ++b)
            for (std::int64_t c = 0; c < dim; ++c)
                cs += std::real(m(b ^ smask, c ^ smask) * m(c, b));
        rec.cstx_curve.emplace_back(r, cs / tr2);
    }

    if (length % 2 == 0) {
        double chi_i = 0.0, chi_ii = 0.0;
        for (const auto& [r, v] : rec.czz_curve) chi_i += v;
        for (const auto& [r, v] : rec.c2zz_curve) chi_ii += v;
        rec.chi_i = 2.0 * chi_i / length;
        rec.chi_ii = 2.0 * chi_ii / length;
    }

    for (int l_a = 1; l_a < length; ++l_a) {
        rec.s2_profile.emplace_back(l_a, exact_renyi2(rho, Subsystem{0, l_a}));
        rec.mi_profile.emplace_back(l_a, exact_mutual_information(rho, l_a));
    }
    return rec;
}

} // namespace decocrit::oracle
