#include "decocrit/mps.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace decocrit {

LocalOperator LocalOperator::one_site(Matrix m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("one_site: matrix must be square");
    return LocalOperator{1, std::move(m)};
}

LocalOperator LocalOperator::two_site(Matrix m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("two_site: matrix must be square");
    return LocalOperator{2, std::move(m)};
}

LocalOperator LocalOperator::swap_sites(int d) {
    Matrix m = Matrix::Zero(d * d, d * d);
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            m(a * d + b, b * d + a) = 1.0;
    return LocalOperator{2, std::move(m)};
}

std::pair<int, double> truncation_rank(const Eigen::VectorXd& sv, int chi_max, double cutoff) {
    const int n = static_cast<int>(sv.size());
    if (n == 0) return {0, 0.0};
    const double top = sv(0);
    const double tie = 1e-12 * top;
    double total = 0.0;
    for (int i = 0; i < n; ++i) total += sv(i) * sv(i);

    int k = 0;
    while (k < n && sv(k) >= cutoff * top) ++k;
    if (k == 0) k = 1;
    // keep whole near-degenerate groups straddling the cutoff boundary
    while (k < n && sv(k) > sv(k - 1) - tie) ++k;
    if (k > chi_max) {
        k = chi_max;
        // drop whole groups straddling the cap
        while (k > 1 && sv(k) > sv(k - 1) - tie) --k;
    }

    double kept = 0.0;
    for (int i = 0; i < k; ++i) kept += sv(i) * sv(i);
    const double discarded = total > 0.0 ? std::max(0.0, 1.0 - kept / total) : 0.0;
    return {k, discarded};
}

MpsState::MpsState(int local_dim, int length, int chi_max, double sv_cutoff)
    : d_(local_dim), chi_max_(chi_max), sv_cutoff_(sv_cutoff) {
    if (local_dim < 2) throw std::invalid_argument("MpsState: local_dim must be >= 2");
    if (length < 1) throw std::invalid_argument("MpsState: length must be >= 1");
    sites_.resize(length);
    for (auto& t : sites_) {
        t.assign(local_dim, Matrix::Zero(1, 1));
        t[0](0, 0) = 1.0;
    }
    center_ = 0;
}

MpsState MpsState::product_state(const std::vector<Vector>& site_vectors, int chi_max,
                                 double sv_cutoff) {
    if (site_vectors.empty()) throw std::invalid_argument("product_state: no sites");
    const int d = static_cast<int>(site_vectors[0].size());
    MpsState s(d, static_cast<int>(site_vectors.size()), chi_max, sv_cutoff);
    for (int j = 0; j < s.length(); ++j) {
        if (site_vectors[j].size() != d)
            throw std::invalid_argument("product_state: inconsistent local dimension");
        for (int p = 0; p < d; ++p) s.sites_[j][p](0, 0) = site_vectors[j](p);
    }
    s.center_ = 0;
    return s;
}

MpsState MpsState::random_state(int local_dim, int length, int bond_dim, std::uint64_t seed,
                                int chi_max, double sv_cutoff) {
    MpsState s(local_dim, length, chi_max, sv_cutoff);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, 1.0);
    for (int j = 0; j < length; ++j) {
        const int cl = j == 0 ? 1 : bond_dim;
        const int cr = j == length - 1 ? 1 : bond_dim;
        for (int p = 0; p < local_dim; ++p) {
            Matrix m(cl, cr);
            for (int a = 0; a < cl; ++a)
                for (int b = 0; b < cr; ++b) m(a, b) = Complex(dist(rng), dist(rng));
            s.sites_[j][p] = std::move(m);
        }
    }
    s.center_ = -1;
    s.canonicalize(0);
    const double nrm = s.norm();
    if (nrm > 0) s.scale(1.0 / nrm);
    return s;
}

MpsState MpsState::from_dense(const Vector& amplitudes, int local_dim, int length, int chi_max,
                              double sv_cutoff) {
    std::int64_t dim = 1;
    for (int j = 0; j < length; ++j) dim *= local_dim;
    if (amplitudes.size() != dim)
        throw std::invalid_argument("from_dense: amplitude count does not match d^L");

    MpsState s(local_dim, length, chi_max, sv_cutoff);
    // successive exact SVD splits, site 0 on the slow index
    Matrix m(local_dim, dim / local_dim);
    for (std::int64_t idx = 0; idx < dim; ++idx)
        m(idx / (dim / local_dim), idx % (dim / local_dim)) = amplitudes(idx);

    int chi_l = 1;
    for (int j = 0; j < length - 1; ++j) {
        // rows of m are (bond a, phys s) with row = a*d + s
        Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const int k = static_cast<int>(svd.nonzeroSingularValues());
        const Matrix u = svd.matrixU().leftCols(k);
        for (int p = 0; p < local_dim; ++p) {
            Matrix t(chi_l, k);
            for (int a = 0; a < chi_l; ++a) t.row(a) = u.row(a * local_dim + p);
            s.sites_[j][p] = std::move(t);
        }
        Matrix rest = svd.singularValues().head(k).asDiagonal() *
                      svd.matrixV().leftCols(k).adjoint();
        // regroup: rest is k x (d^(L-1-j)); split the next physical index onto rows
        const std::int64_t ncols = rest.cols() / local_dim;
        Matrix next(k * local_dim, ncols);
        for (int a = 0; a < k; ++a)
            for (int p = 0; p < local_dim; ++p)
                next.row(a * local_dim + p) = rest.row(a).segment(p * ncols, ncols);
        m = std::move(next);
        chi_l = k;
    }
    for (int p = 0; p < local_dim; ++p) {
        Matrix t(chi_l, 1);
        for (int a = 0; a < chi_l; ++a) t(a, 0) = m(a * local_dim + p, 0);
        s.sites_[length - 1][p] = std::move(t);
    }
    s.center_ = length - 1;
    return s;
}

void MpsState::set_truncation(int chi_max, double sv_cutoff) {
    chi_max_ = chi_max;
    sv_cutoff_ = sv_cutoff;
}

int MpsState::bond_dim(int bond) const {
    if (bond <= 0) return 1;
    if (bond >= length()) return 1;
    return static_cast<int>(sites_[bond][0].rows());
}

int MpsState::max_bond() const {
    int m = 1;
    for (int b = 1; b < length(); ++b) m = std::max(m, bond_dim(b));
    return m;
}

kernels::SiteTensor& MpsState::site_mutable(int j) {
    center_ = -1;
    return sites_[j];
}

void MpsState::adopt(std::vector<kernels::SiteTensor> tensors, int center) {
    if (tensors.size() != sites_.size())
        throw std::invalid_argument("adopt: wrong number of sites");
    sites_ = std::move(tensors);
    center_ = center;
}

void MpsState::orthonormalize_left(int j) {
    const int cl = static_cast<int>(sites_[j][0].rows());
    const int cr = static_cast<int>(sites_[j][0].cols());
    Matrix m(d_ * cl, cr);
    for (int p = 0; p < d_; ++p) m.middleRows(p * cl, cl) = sites_[j][p];
    Eigen::HouseholderQR<Matrix> qr(m);
    const int k = static_cast<int>(std::min<Eigen::Index>(m.rows(), m.cols()));
    Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), k);
    Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    for (int p = 0; p < d_; ++p) sites_[j][p] = q.middleRows(p * cl, cl);
    if (j + 1 < length()) {
        for (int p = 0; p < d_; ++p) sites_[j + 1][p] = r * sites_[j + 1][p];
    } else {
        // absorb the leftover scalar so the vector is preserved exactly
        for (int p = 0; p < d_; ++p) sites_[j][p] = sites_[j][p] * r;
    }
}

void MpsState::orthonormalize_right(int j) {
    const int cl = static_cast<int>(sites_[j][0].rows());
    const int cr = static_cast<int>(sites_[j][0].cols());
    Matrix m(cl, d_ * cr);
    for (int p = 0; p < d_; ++p) m.middleCols(p * cr, cr) = sites_[j][p];
    Matrix mh = m.adjoint();
    Eigen::HouseholderQR<Matrix> qr(mh);
    const int k = static_cast<int>(std::min<Eigen::Index>(mh.rows(), mh.cols()));
    Matrix q = qr.householderQ() * Matrix::Identity(mh.rows(), k);
    Matrix r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    Matrix qh = q.adjoint();         // k x (d*cr)
    Matrix lh = r.adjoint();         // cl x k
    for (int p = 0; p < d_; ++p) sites_[j][p] = qh.middleCols(p * cr, cr);
    if (j > 0) {
        for (int p = 0; p < d_; ++p) sites_[j - 1][p] = sites_[j - 1][p] * lh;
    } else {
        for (int p = 0; p < d_; ++p) sites_[j][p] = lh * sites_[j][p];
    }
}

void MpsState::canonicalize(int center) {
    if (center < 0 || center >= length())
        throw std::invalid_argument("canonicalize: center out of range");
    if (center_ == center) return;
    if (center_ >= 0) {
        // incremental move
        while (center_ < center) {
            orthonormalize_left(center_);
            ++center_;
        }
        while (center_ > center) {
            orthonormalize_right(center_);
            --center_;
        }
        return;
    }
    for (int j = 0; j < center; ++j) orthonormalize_left(j);
    for (int j = length() - 1; j > center; --j) orthonormalize_right(j);
    center_ = center;
}

double MpsState::apply_gate(const LocalOperator& op, int site) {
    if (op.span == 1) {
        if (site < 0 || site >= length()) throw std::invalid_argument("apply_gate: site out of range");
        if (op.mat.rows() != d_) throw std::invalid_argument("apply_gate: operator dimension mismatch");
        if (center_ != site && center_ != -1) canonicalize(site);
        kernels::SiteTensor out(d_);
        for (int sp = 0; sp < d_; ++sp) {
            out[sp] = Matrix::Zero(sites_[site][0].rows(), sites_[site][0].cols());
            for (int s = 0; s < d_; ++s) {
                if (op.mat(sp, s) == Complex(0, 0)) continue;
                out[sp] += op.mat(sp, s) * sites_[site][s];
            }
        }
        sites_[site] = std::move(out);
        return 0.0;
    }

    if (op.span != 2) throw std::invalid_argument("apply_gate: span must be 1 or 2");
    if (site < 0 || site + 1 >= length())
        throw std::invalid_argument("apply_gate: two-site gate needs sites (j, j+1) in range");
    if (op.mat.rows() != d_ * d_) throw std::invalid_argument("apply_gate: operator dimension mismatch");

    canonicalize(site);
    const int cl = static_cast<int>(sites_[site][0].rows());
    const int cm = static_cast<int>(sites_[site][0].cols());
    const int cr = static_cast<int>(sites_[site + 1][0].cols());
    (void)cm;

    Matrix theta(d_ * cl, d_ * cr);
    for (int sl = 0; sl < d_; ++sl)
        for (int sr = 0; sr < d_; ++sr)
            theta.block(sl * cl, sr * cr, cl, cr).noalias() =
                sites_[site][sl] * sites_[site + 1][sr];

    Matrix gated = kernels::gate_theta(op.mat, theta, cl, cr, d_);

    Eigen::BDCSVD<Matrix> svd(gated, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto [k, discarded] = truncation_rank(svd.singularValues(), chi_max_, sv_cutoff_);

    const Matrix u = svd.matrixU().leftCols(k);
    const Matrix w = svd.singularValues().head(k).asDiagonal() * svd.matrixV().leftCols(k).adjoint();
    for (int sl = 0; sl < d_; ++sl) sites_[site][sl] = u.middleRows(sl * cl, cl);
    for (int sr = 0; sr < d_; ++sr) sites_[site + 1][sr] = w.middleCols(sr * cr, cr);
    center_ = site + 1;
    discarded_ += discarded;
    return discarded;
}

double MpsState::apply_gate_longrange(const LocalOperator& op, int site_i, int site_j) {
    if (op.span != 2) throw std::invalid_argument("apply_gate_longrange: span-2 operator required");
    if (site_i == site_j) throw std::invalid_argument("apply_gate_longrange: sites must differ");
    if (site_i > site_j) throw std::invalid_argument("apply_gate_longrange: require i < j");
    if (site_i < 0 || site_j >= length())
        throw std::invalid_argument("apply_gate_longrange: site out of range");
    if (site_j == site_i + 1) return apply_gate(op, site_i);

    const LocalOperator swap = LocalOperator::swap_sites(d_);
    double discarded = 0.0;
    // bring site_j's content next to site_i
    for (int k = site_j; k > site_i + 1; --k) discarded += apply_gate(swap, k - 1);
    discarded += apply_gate(op, site_i);
    for (int k = site_i + 1; k < site_j; ++k) discarded += apply_gate(swap, k);
    return discarded;
}

double MpsState::norm() const {
    return std::sqrt(std::abs(overlap(*this, *this)));
}

void MpsState::scale(Complex factor) {
    const int j = center_ >= 0 ? center_ : 0;
    for (int p = 0; p < d_; ++p) sites_[j][p] *= factor;
}

Vector MpsState::to_dense() const {
    std::int64_t dim = 1;
    for (int j = 0; j < length(); ++j) {
        dim *= d_;
        if (dim > (std::int64_t(1) << 26))
            throw std::invalid_argument("to_dense: state too large");
    }
    // rows: accumulated dense prefix index, cols: current bond
    Matrix acc = Matrix::Ones(1, 1);
    for (int j = 0; j < length(); ++j) {
        const int cr = static_cast<int>(sites_[j][0].cols());
        Matrix next(acc.rows() * d_, cr);
        for (Eigen::Index r = 0; r < acc.rows(); ++r)
            for (int p = 0; p < d_; ++p)
                next.row(r * d_ + p) = acc.row(r) * sites_[j][p];
        acc = std::move(next);
    }
    return acc.col(0);
}

Complex overlap(const MpsState& a, const MpsState& b) {
    if (a.length() != b.length() || a.local_dim() != b.local_dim())
        throw std::invalid_argument("overlap: shape mismatch");
    Matrix e = Matrix::Ones(1, 1);
    for (int j = 0; j < a.length(); ++j) e = kernels::transfer_update(e, a.site(j), b.site(j));
    return e(0, 0);
}

Complex expect_string(const MpsState& a, const std::vector<std::pair<int, Matrix>>& ops,
                      const MpsState& b) {
    if (a.length() != b.length() || a.local_dim() != b.local_dim())
        throw std::invalid_argument("expect_string: shape mismatch");
    for (std::size_t k = 0; k + 1 < ops.size(); ++k)
        if (ops[k].first >= ops[k + 1].first)
            throw std::invalid_argument("expect_string: sites must be strictly increasing");
    if (!ops.empty() && (ops.front().first < 0 || ops.back().first >= a.length()))
        throw std::invalid_argument("expect_string: site out of range");

    Matrix e = Matrix::Ones(1, 1);
    std::size_t next = 0;
    for (int j = 0; j < a.length(); ++j) {
        if (next < ops.size() && ops[next].first == j) {
            e = kernels::transfer_update_op(e, a.site(j), b.site(j), ops[next].second);
            ++next;
        } else {
            e = kernels::transfer_update(e, a.site(j), b.site(j));
        }
    }
    return e(0, 0);
}

} // namespace decocrit
