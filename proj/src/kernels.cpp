#include "decocrit/kernels.hpp"

#include <atomic>
#include <cassert>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace decocrit::kernels {

namespace {
#ifdef _OPENMP
std::atomic<bool> g_parallel{true};
#else
std::atomic<bool> g_parallel{false};
#endif
} // namespace

bool parallel_enabled() { return g_parallel.load(std::memory_order_relaxed); }

void set_parallel(bool on) {
#ifndef _OPENMP
    on = false;
#endif
    g_parallel.store(on, std::memory_order_relaxed);
}

// ---------------------------------------------------------------------------
// transfer_update
// ---------------------------------------------------------------------------

Matrix transfer_update_serial(const Matrix& e, const SiteTensor& a, const SiteTensor& b) {
    const int d = static_cast<int>(a.size());
    Matrix out = Matrix::Zero(a[0].cols(), b[0].cols());
    for (int s = 0; s < d; ++s)
        out.noalias() += a[s].adjoint() * (e * b[s]);
    return out;
}

Matrix transfer_update_parallel(const Matrix& e, const SiteTensor& a, const SiteTensor& b) {
    const int d = static_cast<int>(a.size());
    std::vector<Matrix> partial(d);
#pragma omp parallel for schedule(static)
    for (int s = 0; s < d; ++s)
        partial[s].noalias() = a[s].adjoint() * (e * b[s]);
    // fixed-order accumulation keeps the result identical to the serial path
    Matrix out = Matrix::Zero(a[0].cols(), b[0].cols());
    for (int s = 0; s < d; ++s)
        out += partial[s];
    return out;
}

Matrix transfer_update(const Matrix& e, const SiteTensor& a, const SiteTensor& b) {
    return parallel_enabled() ? transfer_update_parallel(e, a, b)
                              : transfer_update_serial(e, a, b);
}

namespace {

// rows of m that touch physical index s at all
inline bool op_column_used(const Matrix& m, int s) {
    for (Eigen::Index sp = 0; sp < m.rows(); ++sp)
        if (m(sp, s) != Complex(0, 0)) return true;
    return false;
}

} // namespace

Matrix transfer_update_op_serial(const Matrix& e, const SiteTensor& a, const SiteTensor& b,
                                 const Matrix& m) {
    const int d = static_cast<int>(a.size());
    std::vector<Matrix> eb(d);
    for (int s = 0; s < d; ++s)
        if (op_column_used(m, s)) eb[s].noalias() = e * b[s];
    Matrix out = Matrix::Zero(a[0].cols(), b[0].cols());
    for (int sp = 0; sp < d; ++sp) {
        Matrix acc;
        for (int s = 0; s < d; ++s) {
            if (m(sp, s) == Complex(0, 0)) continue;
            if (acc.size() == 0)
                acc.noalias() = m(sp, s) * eb[s];
            else
                acc.noalias() += m(sp, s) * eb[s];
        }
        if (acc.size() != 0) out.noalias() += a[sp].adjoint() * acc;
    }
    return out;
}

Matrix transfer_update_op_parallel(const Matrix& e, const SiteTensor& a, const SiteTensor& b,
                                   const Matrix& m) {
    const int d = static_cast<int>(a.size());
    std::vector<Matrix> eb(d);
#pragma omp parallel for schedule(static)
    for (int s = 0; s < d; ++s)
        if (op_column_used(m, s)) eb[s].noalias() = e * b[s];
    std::vector<Matrix> partial(d);
#pragma omp parallel for schedule(static)
    for (int sp = 0; sp < d; ++sp) {
        Matrix acc;
        for (int s = 0; s < d; ++s) {
            if (m(sp, s) == Complex(0, 0)) continue;
            if (acc.size() == 0)
                acc.noalias() = m(sp, s) * eb[s];
            else
                acc.noalias() += m(sp, s) * eb[s];
        }
        if (acc.size() != 0) partial[sp].noalias() = a[sp].adjoint() * acc;
    }
    Matrix out = Matrix::Zero(a[0].cols(), b[0].cols());
    for (int sp = 0; sp < d; ++sp)
        if (partial[sp].size() != 0) out += partial[sp];
    return out;
}

Matrix transfer_update_op(const Matrix& e, const SiteTensor& a, const SiteTensor& b,
                          const Matrix& m) {
    return parallel_enabled() ? transfer_update_op_parallel(e, a, b, m)
                              : transfer_update_op_serial(e, a, b, m);
}

// ---------------------------------------------------------------------------
// gate_theta
// ---------------------------------------------------------------------------

namespace {

inline Matrix gate_theta_block(const Matrix& gate, const Matrix& theta, int chi_l, int chi_r,
                               int d, int spl, int spr) {
    Matrix blk = Matrix::Zero(chi_l, chi_r);
    for (int sl = 0; sl < d; ++sl) {
        for (int sr = 0; sr < d; ++sr) {
            const Complex g = gate(spl * d + spr, sl * d + sr);
            if (g == Complex(0, 0)) continue;
            blk.noalias() += g * theta.block(sl * chi_l, sr * chi_r, chi_l, chi_r);
        }
    }
    return blk;
}

} // namespace

Matrix gate_theta_serial(const Matrix& gate, const Matrix& theta, int chi_l, int chi_r, int d) {
    Matrix out(d * chi_l, d * chi_r);
    for (int k = 0; k < d * d; ++k) {
        const int spl = k / d, spr = k % d;
        out.block(spl * chi_l, spr * chi_r, chi_l, chi_r) =
            gate_theta_block(gate, theta, chi_l, chi_r, d, spl, spr);
    }
    return out;
}

Matrix gate_theta_parallel(const Matrix& gate, const Matrix& theta, int chi_l, int chi_r, int d) {
    Matrix out(d * chi_l, d * chi_r);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < d * d; ++k) {
        const int spl = k / d, spr = k % d;
        out.block(spl * chi_l, spr * chi_r, chi_l, chi_r) =
            gate_theta_block(gate, theta, chi_l, chi_r, d, spl, spr);
    }
    return out;
}

Matrix gate_theta(const Matrix& gate, const Matrix& theta, int chi_l, int chi_r, int d) {
    return parallel_enabled() ? gate_theta_parallel(gate, theta, chi_l, chi_r, d)
                              : gate_theta_serial(gate, theta, chi_l, chi_r, d);
}

// ---------------------------------------------------------------------------
// heff_matvec
// ---------------------------------------------------------------------------

namespace {

// X[w] = lenv[w] * theta, viewing theta rows through the left bond only is not
// possible with the (s*chi + a) layout, so work block-row by block-row.
std::vector<Matrix> left_env_apply(const std::vector<Matrix>& lenv, const Matrix& theta,
                                   int chi_l, int d, bool par) {
    const int nw = static_cast<int>(lenv.size());
    std::vector<Matrix> x(nw);
    const int nt = par ? nw : 1;
    (void)nt;
#pragma omp parallel for schedule(static) if (par)
    for (int w = 0; w < nw; ++w) {
        x[w].resize(theta.rows(), theta.cols());
        for (int s = 0; s < d; ++s)
            x[w].middleRows(s * chi_l, chi_l).noalias() =
                lenv[w] * theta.middleRows(s * chi_l, chi_l);
    }
    return x;
}

// Y[w'] = sum_{w,s',s} Wl[w][w'](s',s) X[w] with the s index living on rows.
std::vector<Matrix> mpo_row_apply(const std::vector<Matrix>& x, const MpoSiteOps& wl,
                                  int chi_l, int d, bool par) {
    const int nw0 = static_cast<int>(wl.size());
    const int nw1 = static_cast<int>(wl[0].size());
    std::vector<Matrix> y(nw1);
#pragma omp parallel for schedule(static) if (par)
    for (int w1 = 0; w1 < nw1; ++w1) {
        y[w1] = Matrix::Zero(x[0].rows(), x[0].cols());
        for (int w0 = 0; w0 < nw0; ++w0) {
            const Matrix& op = wl[w0][w1];
            if (op.size() == 0) continue;
            for (int sp = 0; sp < d; ++sp)
                for (int s = 0; s < d; ++s) {
                    if (op(sp, s) == Complex(0, 0)) continue;
                    y[w1].middleRows(sp * chi_l, chi_l) +=
                        op(sp, s) * x[w0].middleRows(s * chi_l, chi_l);
                }
        }
    }
    return y;
}

std::vector<Matrix> mpo_col_apply(const std::vector<Matrix>& x, const MpoSiteOps& wr,
                                  int chi_r, int d, bool par) {
    const int nw1 = static_cast<int>(wr.size());
    const int nw2 = static_cast<int>(wr[0].size());
    std::vector<Matrix> y(nw2);
#pragma omp parallel for schedule(static) if (par)
    for (int w2 = 0; w2 < nw2; ++w2) {
        y[w2] = Matrix::Zero(x[0].rows(), x[0].cols());
        for (int w1 = 0; w1 < nw1; ++w1) {
            const Matrix& op = wr[w1][w2];
            if (op.size() == 0) continue;
            for (int sp = 0; sp < d; ++sp)
                for (int s = 0; s < d; ++s) {
                    if (op(sp, s) == Complex(0, 0)) continue;
                    y[w2].middleCols(sp * chi_r, chi_r) +=
                        op(sp, s) * x[w1].middleCols(s * chi_r, chi_r);
                }
        }
    }
    return y;
}

Matrix heff_matvec_impl(const std::vector<Matrix>& lenv, const std::vector<Matrix>& renv,
                        const MpoSiteOps& wl, const MpoSiteOps& wr, const Matrix& theta,
                        int chi_l, int chi_r, int d, bool par) {
    auto x = left_env_apply(lenv, theta, chi_l, d, par);
    auto y = mpo_row_apply(x, wl, chi_l, d, par);
    auto z = mpo_col_apply(y, wr, chi_r, d, par);
    const int nw2 = static_cast<int>(z.size());
    std::vector<Matrix> partial(nw2);
#pragma omp parallel for schedule(static) if (par)
    for (int w2 = 0; w2 < nw2; ++w2) {
        partial[w2].resize(theta.rows(), theta.cols());
        for (int s = 0; s < d; ++s)
            partial[w2].middleCols(s * chi_r, chi_r).noalias() =
                z[w2].middleCols(s * chi_r, chi_r) * renv[w2].transpose();
    }
    Matrix out = Matrix::Zero(theta.rows(), theta.cols());
    for (int w2 = 0; w2 < nw2; ++w2)
        out += partial[w2];
    return out;
}

} // namespace

Matrix heff_matvec_serial(const std::vector<Matrix>& lenv, const std::vector<Matrix>& renv,
                          const MpoSiteOps& wl, const MpoSiteOps& wr, const Matrix& theta,
                          int chi_l, int chi_r, int d) {
    return heff_matvec_impl(lenv, renv, wl, wr, theta, chi_l, chi_r, d, false);
}

Matrix heff_matvec_parallel(const std::vector<Matrix>& lenv, const std::vector<Matrix>& renv,
                            const MpoSiteOps& wl, const MpoSiteOps& wr, const Matrix& theta,
                            int chi_l, int chi_r, int d) {
    return heff_matvec_impl(lenv, renv, wl, wr, theta, chi_l, chi_r, d, true);
}

Matrix heff_matvec(const std::vector<Matrix>& lenv, const std::vector<Matrix>& renv,
                   const MpoSiteOps& wl, const MpoSiteOps& wr, const Matrix& theta,
                   int chi_l, int chi_r, int d) {
    return parallel_enabled() ? heff_matvec_parallel(lenv, renv, wl, wr, theta, chi_l, chi_r, d)
                              : heff_matvec_serial(lenv, renv, wl, wr, theta, chi_l, chi_r, d);
}

// ---------------------------------------------------------------------------
// env_update
// ---------------------------------------------------------------------------

namespace {

Matrix env_update_one(const std::vector<Matrix>& lenv, const MpoSiteOps& w, const SiteTensor& a,
                      const SiteTensor& b, int wp) {
    const int nw = static_cast<int>(lenv.size());
    const int d = static_cast<int>(a.size());
    Matrix out = Matrix::Zero(a[0].cols(), b[0].cols());
    for (int w0 = 0; w0 < nw; ++w0) {
        const Matrix& op = w[w0][wp];
        if (op.size() == 0) continue;
        for (int sp = 0; sp < d; ++sp) {
            Matrix acc = Matrix::Zero(lenv[w0].rows(), b[0].cols());
            bool any = false;
            for (int s = 0; s < d; ++s) {
                if (op(sp, s) == Complex(0, 0)) continue;
                acc.noalias() += op(sp, s) * (lenv[w0] * b[s]);
                any = true;
            }
            if (any) out.noalias() += a[sp].adjoint() * acc;
        }
    }
    return out;
}

} // namespace

std::vector<Matrix> env_update_serial(const std::vector<Matrix>& lenv, const MpoSiteOps& w,
                                      const SiteTensor& a, const SiteTensor& b) {
    const int nwp = static_cast<int>(w[0].size());
    std::vector<Matrix> out(nwp);
    for (int wp = 0; wp < nwp; ++wp)
        out[wp] = env_update_one(lenv, w, a, b, wp);
    return out;
}

std::vector<Matrix> env_update_parallel(const std::vector<Matrix>& lenv, const MpoSiteOps& w,
                                        const SiteTensor& a, const SiteTensor& b) {
    const int nwp = static_cast<int>(w[0].size());
    std::vector<Matrix> out(nwp);
#pragma omp parallel for schedule(static)
    for (int wp = 0; wp < nwp; ++wp)
        out[wp] = env_update_one(lenv, w, a, b, wp);
    return out;
}

std::vector<Matrix> env_update(const std::vector<Matrix>& lenv, const MpoSiteOps& w,
                               const SiteTensor& a, const SiteTensor& b) {
    return parallel_enabled() ? env_update_parallel(lenv, w, a, b)
                              : env_update_serial(lenv, w, a, b);
}

namespace {

Matrix env_update_right_one(const std::vector<Matrix>& renv, const MpoSiteOps& w,
                            const SiteTensor& a, const SiteTensor& b, int wl) {
    const int d = static_cast<int>(a.size());
    const int nwr = static_cast<int>(w[0].size());
    Matrix out = Matrix::Zero(a[0].rows(), b[0].rows());
    for (int wr = 0; wr < nwr; ++wr) {
        const Matrix& op = w[wl][wr];
        if (op.size() == 0) continue;
        for (int sp = 0; sp < d; ++sp) {
            Matrix acc = Matrix::Zero(renv[wr].rows(), b[0].rows());
            bool any = false;
            for (int s = 0; s < d; ++s) {
                if (op(sp, s) == Complex(0, 0)) continue;
                acc.noalias() += op(sp, s) * (renv[wr] * b[s].transpose());
                any = true;
            }
            if (any) out.noalias() += a[sp].conjugate() * acc;
        }
    }
    return out;
}

} // namespace

std::vector<Matrix> env_update_right_serial(const std::vector<Matrix>& renv, const MpoSiteOps& w,
                                            const SiteTensor& a, const SiteTensor& b) {
    const int nwl = static_cast<int>(w.size());
    std::vector<Matrix> out(nwl);
    for (int wl = 0; wl < nwl; ++wl)
        out[wl] = env_update_right_one(renv, w, a, b, wl);
    return out;
}

std::vector<Matrix> env_update_right_parallel(const std::vector<Matrix>& renv, const MpoSiteOps& w,
                                              const SiteTensor& a, const SiteTensor& b) {
    const int nwl = static_cast<int>(w.size());
    std::vector<Matrix> out(nwl);
#pragma omp parallel for schedule(static)
    for (int wl = 0; wl < nwl; ++wl)
        out[wl] = env_update_right_one(renv, w, a, b, wl);
    return out;
}

std::vector<Matrix> env_update_right(const std::vector<Matrix>& renv, const MpoSiteOps& w,
                                     const SiteTensor& a, const SiteTensor& b) {
    return parallel_enabled() ? env_update_right_parallel(renv, w, a, b)
                              : env_update_right_serial(renv, w, a, b);
}

// ---------------------------------------------------------------------------
// pauli_mix
// ---------------------------------------------------------------------------

namespace {

inline void pauli_mix_row(Matrix& out, const Matrix& rho, const std::vector<int>& perm,
                          const std::vector<Complex>& phase, double w0, double w1,
                          Eigen::Index i) {
    const Eigen::Index n = rho.rows();
    // (P rho P^dag)(pi(i), pi(j)) = phase[i] conj(phase[j]) rho(i, j)
    const int pi = perm[i];
    for (Eigen::Index j = 0; j < n; ++j)
        out(pi, perm[j]) = w0 * rho(pi, perm[j]) + w1 * phase[i] * std::conj(phase[j]) * rho(i, j);
}

} // namespace

Matrix pauli_mix_serial(const Matrix& rho, const std::vector<int>& perm,
                        const std::vector<Complex>& phase, double w0, double w1) {
    Matrix out(rho.rows(), rho.cols());
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        pauli_mix_row(out, rho, perm, phase, w0, w1, i);
    return out;
}

Matrix pauli_mix_parallel(const Matrix& rho, const std::vector<int>& perm,
                          const std::vector<Complex>& phase, double w0, double w1) {
    Matrix out(rho.rows(), rho.cols());
#pragma omp parallel for schedule(static)
    for (Eigen::Index i = 0; i < rho.rows(); ++i)
        pauli_mix_row(out, rho, perm, phase, w0, w1, i);
    return out;
}

Matrix pauli_mix(const Matrix& rho, const std::vector<int>& perm,
                 const std::vector<Complex>& phase, double w0, double w1) {
    return parallel_enabled() ? pauli_mix_parallel(rho, perm, phase, w0, w1)
                              : pauli_mix_serial(rho, perm, phase, w0, w1);
}

// ---------------------------------------------------------------------------
// partial_trace
// ---------------------------------------------------------------------------

namespace {

struct TraceIndexing {
    std::vector<unsigned> keep_bits;  // dense-index bit positions of kept sites
    std::vector<unsigned> sum_bits;   // bit positions of traced-out sites
    unsigned nkeep = 0, nsum = 0;

    TraceIndexing(unsigned keep_mask, int length) {
        for (int site = 0; site < length; ++site) {
            const unsigned bitpos = static_cast<unsigned>(length - 1 - site);
            if (keep_mask & (1u << site))
                keep_bits.push_back(bitpos);
            else
                sum_bits.push_back(bitpos);
        }
        nkeep = static_cast<unsigned>(keep_bits.size());
        nsum = static_cast<unsigned>(sum_bits.size());
    }

    unsigned expand(unsigned packed, const std::vector<unsigned>& bits) const {
        unsigned out = 0;
        for (unsigned k = 0; k < bits.size(); ++k)
            if (packed & (1u << (bits.size() - 1 - k))) out |= 1u << bits[k];
        return out;
    }
};

inline void partial_trace_row(Matrix& out, const Matrix& rho, const TraceIndexing& ix,
                              unsigned a) {
    const unsigned na = 1u << ix.nkeep;
    const unsigned nb = 1u << ix.nsum;
    const unsigned ia = ix.expand(a, ix.keep_bits);
    for (unsigned ap = 0; ap < na; ++ap) {
        const unsigned iap = ix.expand(ap, ix.keep_bits);
        Complex acc(0, 0);
        for (unsigned bsum = 0; bsum < nb; ++bsum) {
            const unsigned ib = ix.expand(bsum, ix.sum_bits);
            acc += rho(ia | ib, iap | ib);
        }
        out(a, ap) = acc;
    }
}

} // namespace

Matrix partial_trace_serial(const Matrix& rho, unsigned keep_mask, int length) {
    TraceIndexing ix(keep_mask, length);
    const unsigned na = 1u << ix.nkeep;
    Matrix out(na, na);
    for (unsigned a = 0; a < na; ++a)
        partial_trace_row(out, rho, ix, a);
    return out;
}

Matrix partial_trace_parallel(const Matrix& rho, unsigned keep_mask, int length) {
    TraceIndexing ix(keep_mask, length);
    const unsigned na = 1u << ix.nkeep;
    Matrix out(na, na);
#pragma omp parallel for schedule(static)
    for (int a = 0; a < static_cast<int>(na); ++a)
        partial_trace_row(out, rho, ix, static_cast<unsigned>(a));
    return out;
}

Matrix partial_trace(const Matrix& rho, unsigned keep_mask, int length) {
    return parallel_enabled() ? partial_trace_parallel(rho, keep_mask, length)
                              : partial_trace_serial(rho, keep_mask, length);
}

} // namespace decocrit::kernels
