#pragma once

#include <vector>
#include <complex>
#include <Eigen/Dense>

#include "decocrit/pauli.hpp"

// Dense compute kernels behind the MPS engine and the exact reference path.
// Every kernel ships in two variants: a plain serial implementation and an
// OpenMP one. The parallel variants split work over independent output
// blocks only, so for fixed inputs both variants produce bit-identical
// results regardless of thread count; the serial versions are kept as the
// reference the tests compare against (see tests/test_kernels.cpp and
// tools/bench_kernels.cpp).

namespace decocrit::kernels {

using decocrit::Complex;
using decocrit::Matrix;

// Site tensor: one chiL x chiR matrix per physical index value.
using SiteTensor = std::vector<Matrix>;

// MPO site: ops[w_left][w_right] is a d x d block (size-0 matrix = zero).
using MpoSiteOps = std::vector<std::vector<Matrix>>;

// Runtime switch between the two variants; defaults to parallel when built
// with OpenMP. The benchmark and the kernel tests drive both explicitly.
bool parallel_enabled();
void set_parallel(bool on);

// --------------------------------------------------------------------------
// Transfer-matrix update: E' = sum_s A_s^dag E B_s
// E is chiA_L x chiB_L; result is chiA_R x chiB_R.
// --------------------------------------------------------------------------
Matrix transfer_update_serial(const Matrix& e, const SiteTensor& a, const SiteTensor& b);
Matrix transfer_update_parallel(const Matrix& e, const SiteTensor& a, const SiteTensor& b);
Matrix transfer_update(const Matrix& e, const SiteTensor& a, const SiteTensor& b);

// Same with a single-site operator inserted: E' = sum_{s',s} M(s',s) A_{s'}^dag E B_s.
Matrix transfer_update_op_serial(const Matrix& e, const SiteTensor& a, const SiteTensor& b,
                                 const Matrix& m);
Matrix transfer_update_op_parallel(const Matrix& e, const SiteTensor& a, const SiteTensor& b,
                                   const Matrix& m);
Matrix transfer_update_op(const Matrix& e, const SiteTensor& a, const SiteTensor& b,
                          const Matrix& m);

// --------------------------------------------------------------------------
// Two-site gate application.
// theta is (d*chiL) x (d*chiR) with row = s_left*chiL + a, col = s_right*chiR + b.
// gate is d^2 x d^2 acting as gate[(s'l*d+s'r), (sl*d+sr)].
// --------------------------------------------------------------------------
Matrix gate_theta_serial(const Matrix& gate, const Matrix& theta, int chi_l, int chi_r, int d);
Matrix gate_theta_parallel(const Matrix& gate, const Matrix& theta, int chi_l, int chi_r, int d);
Matrix gate_theta(const Matrix& gate, const Matrix& theta, int chi_l, int chi_r, int d);

// --------------------------------------------------------------------------
// Two-site effective-Hamiltonian matvec for DMRG.
// lenv[w] is chiL x chiL, renv[w] is chiR x chiR, wl/wr are MPO site blocks,
// theta as above. Returns H_eff theta in the same layout.
// --------------------------------------------------------------------------
Matrix heff_matvec_serial(const std::vector<Matrix>& lenv, const std::vector<Matrix>& renv,
                          const MpoSiteOps& wl, const MpoSiteOps& wr, const Matrix& theta,
                          int chi_l, int chi_r, int d);
Matrix heff_matvec_parallel(const std::vector<Matrix>& lenv, const std::vector<Matrix>& renv,
                            const MpoSiteOps& wl, const MpoSiteOps& wr, const Matrix& theta,
                            int chi_l, int chi_r, int d);
Matrix heff_matvec(const std::vector<Matrix>& lenv, const std::vector<Matrix>& renv,
                   const MpoSiteOps& wl, const MpoSiteOps& wr, const Matrix& theta,
                   int chi_l, int chi_r, int d);

// MPO environment growth: out[w'] = sum_{w,s',s} W[w][w'](s',s) A_{s'}^dag lenv[w] B_s.
std::vector<Matrix> env_update_serial(const std::vector<Matrix>& lenv, const MpoSiteOps& w,
                                      const SiteTensor& a, const SiteTensor& b);
std::vector<Matrix> env_update_parallel(const std::vector<Matrix>& lenv, const MpoSiteOps& w,
                                        const SiteTensor& a, const SiteTensor& b);
std::vector<Matrix> env_update(const std::vector<Matrix>& lenv, const MpoSiteOps& w,
                               const SiteTensor& a, const SiteTensor& b);

// Mirror image growing a right environment one site to the left:
// out[w] = sum_{w',s',s} W[w][w'](s',s) conj(A_{s'}) renv[w'] B_s^T.
std::vector<Matrix> env_update_right_serial(const std::vector<Matrix>& renv, const MpoSiteOps& w,
                                            const SiteTensor& a, const SiteTensor& b);
std::vector<Matrix> env_update_right_parallel(const std::vector<Matrix>& renv, const MpoSiteOps& w,
                                              const SiteTensor& a, const SiteTensor& b);
std::vector<Matrix> env_update_right(const std::vector<Matrix>& renv, const MpoSiteOps& w,
                                     const SiteTensor& a, const SiteTensor& b);

// --------------------------------------------------------------------------
// Dense density-matrix kernels (reference path).
// --------------------------------------------------------------------------

// out = w0*rho + w1 * P rho P^dag where P is a signed basis permutation:
// P |i> = phase[i] |perm[i]>.
Matrix pauli_mix_serial(const Matrix& rho, const std::vector<int>& perm,
                        const std::vector<Complex>& phase, double w0, double w1);
Matrix pauli_mix_parallel(const Matrix& rho, const std::vector<int>& perm,
                          const std::vector<Complex>& phase, double w0, double w1);
Matrix pauli_mix(const Matrix& rho, const std::vector<int>& perm,
                 const std::vector<Complex>& phase, double w0, double w1);

// Partial trace of an L-qubit density matrix onto the sites with keep_mask
// bit set (site 0 = most significant bit, matching the dense index order).
Matrix partial_trace_serial(const Matrix& rho, unsigned keep_mask, int length);
Matrix partial_trace_parallel(const Matrix& rho, unsigned keep_mask, int length);
Matrix partial_trace(const Matrix& rho, unsigned keep_mask, int length);

} // namespace decocrit::kernels
