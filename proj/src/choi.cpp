#include "decocrit/choi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace decocrit {

ChoiState::ChoiState(MpsState mps, int chain_length) : mps_(std::move(mps)), length_(chain_length) {
    if (mps_.local_dim() != 4) throw std::invalid_argument("ChoiState: local dimension must be 4");
    if (mps_.length() != chain_length)
        throw std::invalid_argument("ChoiState: length mismatch");
}

MpsState& ChoiState::mps_mutable() {
    invalidate_caches();
    return mps_;
}

void ChoiState::invalidate_caches() {
    self_overlap_.reset();
    identity_overlap_.reset();
}

Complex ChoiState::self_overlap() const {
    if (!self_overlap_) self_overlap_ = overlap(mps_, mps_);
    return *self_overlap_;
}

Complex ChoiState::identity_overlap() const {
    if (!identity_overlap_) identity_overlap_ = overlap(identity_choi(length_).mps(), mps_);
    return *identity_overlap_;
}

double ChoiState::trace() const {
    return std::pow(2.0, 0.5 * length_) * identity_overlap().real();
}

ChoiState double_pure(const MpsState& psi) {
    if (psi.local_dim() != 2) throw std::invalid_argument("double_pure: psi must have local_dim 2");
    const int length = psi.length();
    MpsState out(4, length, psi.chi_max(), psi.sv_cutoff());

    std::vector<kernels::SiteTensor> tensors(length);
    for (int j = 0; j < length; ++j) {
        const auto& a = psi.site(j);
        const int cl = static_cast<int>(a[0].rows());
        const int cr = static_cast<int>(a[0].cols());
        kernels::SiteTensor t(4);
        for (int su = 0; su < 2; ++su)
            for (int sl = 0; sl < 2; ++sl) {
                Matrix m(cl * cl, cr * cr);
                for (int au = 0; au < cl; ++au)
                    for (int al = 0; al < cl; ++al)
                        for (int bu = 0; bu < cr; ++bu)
                            for (int bl = 0; bl < cr; ++bl)
                                m(au * cl + al, bu * cr + bl) =
                                    std::conj(a[su](au, bu)) * a[sl](al, bl);
                t[2 * su + sl] = std::move(m);
            }
        tensors[j] = std::move(t);
    }
    out.adopt(std::move(tensors), -1);
    return ChoiState(std::move(out), length);
}

namespace {

struct VidalForm {
    std::vector<kernels::SiteTensor> left_iso;       // last site holds the center
    std::vector<Eigen::VectorXd> schmidt;            // schmidt[b] at internal bond b = 1..L-1
};

VidalForm left_schmidt_sweep(const MpsState& psi) {
    const int length = psi.length();
    const int d = psi.local_dim();
    MpsState work = psi;
    work.canonicalize(0);

    VidalForm out;
    out.left_iso.resize(length);
    out.schmidt.resize(length);

    kernels::SiteTensor center = work.site(0);
    for (int j = 0; j + 1 < length; ++j) {
        const int cl = static_cast<int>(center[0].rows());
        const int cr = static_cast<int>(center[0].cols());
        Matrix m(d * cl, cr);
        for (int s = 0; s < d; ++s) m.middleRows(s * cl, cl) = center[s];
        Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const int k = static_cast<int>(svd.nonzeroSingularValues());
        const Matrix u = svd.matrixU().leftCols(std::max(k, 1));
        const int kk = static_cast<int>(u.cols());
        kernels::SiteTensor t(d);
        for (int s = 0; s < d; ++s) t[s] = u.middleRows(s * cl, cl);
        out.left_iso[j] = std::move(t);
        out.schmidt[j + 1] = svd.singularValues().head(kk);
        const Matrix rest = svd.singularValues().head(kk).asDiagonal() *
                            svd.matrixV().leftCols(kk).adjoint();
        kernels::SiteTensor next(d);
        for (int s = 0; s < d; ++s) next[s] = rest * work.site(j + 1)[s];
        center = std::move(next);
    }
    out.left_iso[length - 1] = std::move(center);
    return out;
}

struct BondPairs {
    std::vector<std::pair<int, int>> kept;  // (upper index, lower index)
    double discarded = 0.0;
};

BondPairs select_pairs(const Eigen::VectorXd& sv, int chi_max, double cutoff) {
    const int n = static_cast<int>(sv.size());
    std::vector<std::tuple<double, int, int>> prod;
    prod.reserve(static_cast<std::size_t>(n) * n);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k) prod.emplace_back(sv(i) * sv(k), i, k);
    std::sort(prod.begin(), prod.end(), [](const auto& a, const auto& b) {
        if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
        if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
        return std::get<2>(a) < std::get<2>(b);
    });
    Eigen::VectorXd values(prod.size());
    for (std::size_t i = 0; i < prod.size(); ++i) values(static_cast<Eigen::Index>(i)) = std::get<0>(prod[i]);
    const auto [k, discarded] = truncation_rank(values, chi_max, cutoff);

    BondPairs out;
    out.kept.reserve(k);
    for (int i = 0; i < k; ++i) out.kept.emplace_back(std::get<1>(prod[i]), std::get<2>(prod[i]));
    out.discarded = discarded;
    return out;
}

} // namespace

ChoiState double_pure_truncated(const MpsState& psi, int chi_max, double sv_cutoff) {
    if (psi.local_dim() != 2)
        throw std::invalid_argument("double_pure_truncated: psi must have local_dim 2");
    const int length = psi.length();
    const VidalForm vf = left_schmidt_sweep(psi);

    std::vector<BondPairs> bonds(length + 1);
    bonds[0].kept = {{0, 0}};
    bonds[length].kept = {{0, 0}};
    for (int b = 1; b < length; ++b) bonds[b] = select_pairs(vf.schmidt[b], chi_max, sv_cutoff);

    MpsState out(4, length, chi_max, sv_cutoff);
    std::vector<kernels::SiteTensor> tensors(length);
    double discarded = 0.0;
    for (int b = 1; b < length; ++b) discarded += bonds[b].discarded;

    for (int j = 0; j < length; ++j) {
        const auto& a = vf.left_iso[j];
        const auto& lp = bonds[j].kept;
        const auto& rp = bonds[j + 1].kept;
        kernels::SiteTensor t(4);
        for (int su = 0; su < 2; ++su)
            for (int sl = 0; sl < 2; ++sl) {
                Matrix m(lp.size(), rp.size());
                for (std::size_t r = 0; r < lp.size(); ++r)
                    for (std::size_t c = 0; c < rp.size(); ++c)
                        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                            std::conj(a[su](lp[r].first, rp[c].first)) *
                            a[sl](lp[r].second, rp[c].second);
                t[2 * su + sl] = std::move(m);
            }
        tensors[j] = std::move(t);
    }
    out.adopt(std::move(tensors), -1);
    out.add_discarded(discarded);
    return ChoiState(std::move(out), length);
}

ChoiState identity_choi(int length, int chi_max, double sv_cutoff) {
    if (length < 1) throw std::invalid_argument("identity_choi: length must be >= 1");
    Vector rung(4);
    rung << 1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0);
    std::vector<Vector> sites(length, rung);
    return ChoiState(MpsState::product_state(sites, chi_max, sv_cutoff), length);
}

Vector vectorize_dense(const Matrix& rho) {
    if (rho.rows() != rho.cols()) throw std::invalid_argument("vectorize_dense: non-square input");
    const Eigen::Index dim = rho.rows();
    int length = 0;
    while ((Eigen::Index(1) << length) < dim) ++length;
    if ((Eigen::Index(1) << length) != dim || length > 12)
        throw std::invalid_argument("vectorize_dense: dimension must be 2^L with L <= 12");

    Vector out(dim * dim);
    for (Eigen::Index ku = 0; ku < dim; ++ku) {
        for (Eigen::Index kl = 0; kl < dim; ++kl) {
            // rung digit at site j combines the two copies' bits
            std::int64_t idx = 0;
            for (int j = 0; j < length; ++j) {
                const int bu = static_cast<int>((ku >> (length - 1 - j)) & 1);
                const int bl = static_cast<int>((kl >> (length - 1 - j)) & 1);
                idx = idx * 4 + (2 * bu + bl);
            }
            out(idx) = rho(kl, ku);
        }
    }
    return out;
}

ChoiState choi_from_dense(const Matrix& rho, int chi_max, double sv_cutoff) {
    const Vector v = vectorize_dense(rho);
    int length = 0;
    while ((Eigen::Index(1) << length) < rho.rows()) ++length;
    return ChoiState(MpsState::from_dense(v, 4, length, chi_max, sv_cutoff), length);
}

} // namespace decocrit
