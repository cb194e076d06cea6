#pragma once

#include <complex>
#include <cstdint>
#include <vector>
#include <Eigen/Dense>

#include "decocrit/kernels.hpp"

// Finite open-chain matrix product states with a tracked canonical center,
// truncated gate application and exact contractions.
//
// Index conventions used throughout:
//   - site tensor = one chiL x chiR matrix per physical index value s,
//   - stacked two-site blocks use row = s_left*chiL + a, col = s_right*chiR + b,
//   - dense vectors order site 0 on the most significant digit,
//     index = sum_j s_j * d^(L-1-j).

namespace decocrit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

struct LocalOperator {
    int span = 1;      // 1 or 2 sites
    Matrix mat;        // d^span x d^span

    static LocalOperator one_site(Matrix m);
    static LocalOperator two_site(Matrix m);
    // swap of two neighboring d-dimensional sites
    static LocalOperator swap_sites(int d);
};

// Deterministic truncation rule: keep singular values >= cutoff * sv[0],
// capped at chi_max, never splitting groups of singular values that agree
// within 1e-12 * sv[0] (whole group kept at the cutoff boundary, whole group
// dropped at the cap). Returns the kept rank and the discarded weight
// (discarded squared sum / total squared sum).
std::pair<int, double> truncation_rank(const Eigen::VectorXd& sv, int chi_max, double cutoff);

class MpsState {
public:
    MpsState() = default;
    MpsState(int local_dim, int length, int chi_max, double sv_cutoff);

    static MpsState product_state(const std::vector<Vector>& site_vectors, int chi_max,
                                  double sv_cutoff);
    static MpsState random_state(int local_dim, int length, int bond_dim, std::uint64_t seed,
                                 int chi_max, double sv_cutoff);
    // exact MPS of a dense vector (test/oracle sizes only)
    static MpsState from_dense(const Vector& amplitudes, int local_dim, int length, int chi_max,
                               double sv_cutoff);

    int length() const { return static_cast<int>(sites_.size()); }
    int local_dim() const { return d_; }
    int center() const { return center_; }
    int chi_max() const { return chi_max_; }
    double sv_cutoff() const { return sv_cutoff_; }
    void set_truncation(int chi_max, double sv_cutoff);

    // left bond dimension of site j (bond 0 and bond L have dimension 1)
    int bond_dim(int bond) const;
    int max_bond() const;
    double discarded_weight() const { return discarded_; }
    void add_discarded(double w) { discarded_ += w; }

    const kernels::SiteTensor& site(int j) const { return sites_[j]; }
    kernels::SiteTensor& site_mutable(int j);

    // bulk replacement for solvers that maintain canonical form themselves
    void adopt(std::vector<kernels::SiteTensor> tensors, int center);

    // Gauge transformations; the represented vector is preserved exactly.
    void canonicalize(int center);

    // Gate application with SVD truncation (span-2). Returns the discarded
    // weight of the single truncation performed (0 for span-1 gates).
    double apply_gate(const LocalOperator& op, int site);
    // Two-site operator on non-adjacent sites i < j via a swap network;
    // returns accumulated discarded weight.
    double apply_gate_longrange(const LocalOperator& op, int site_i, int site_j);

    double norm() const;
    void scale(Complex factor);

    Vector to_dense() const;

private:
    void orthonormalize_left(int j);   // left-orthonormalize site j, push R right
    void orthonormalize_right(int j);  // right-orthonormalize site j, push L left

    std::vector<kernels::SiteTensor> sites_;
    int d_ = 0;
    int center_ = -1;  // -1 = unknown
    int chi_max_ = 0;
    double sv_cutoff_ = 0.0;
    double discarded_ = 0.0;
};

// <a|b>; exact, no truncation.
Complex overlap(const MpsState& a, const MpsState& b);

// <a| prod_k ops[k].second at site ops[k].first |b>; sites must be strictly
// increasing. Exact.
Complex expect_string(const MpsState& a, const std::vector<std::pair<int, Matrix>>& ops,
                      const MpsState& b);

} // namespace decocrit
