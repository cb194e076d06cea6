#include "decocrit/mpo.hpp"

#include <stdexcept>

#include "decocrit/pauli.hpp"

namespace decocrit {

Matrix MpoOperator::to_dense() const {
    const int d = local_dim;
    std::int64_t dim = 1;
    for (int j = 0; j < length(); ++j) dim *= d;
    if (dim > 4096) throw std::invalid_argument("MpoOperator::to_dense: too large");

    // acc[w] is the dense operator accumulated so far for right bond state w
    std::vector<Matrix> acc(1, Matrix::Identity(1, 1));
    for (int j = 0; j < length(); ++j) {
        const MpoSite& site = sites[j];
        std::vector<Matrix> next(site.right_dim());
        for (int wp = 0; wp < site.right_dim(); ++wp) {
            Matrix sum;
            for (int w = 0; w < site.left_dim(); ++w) {
                const Matrix& op = site.ops[w][wp];
                if (op.size() == 0) continue;
                Matrix term = kron(acc[w], op);
                if (sum.size() == 0)
                    sum = std::move(term);
                else
                    sum += term;
            }
            if (sum.size() == 0) sum = Matrix::Zero(acc[0].rows() * d, acc[0].cols() * d);
            next[wp] = std::move(sum);
        }
        acc = std::move(next);
    }
    return acc[0];
}

MpoOperator build_tfim_mpo(int length, double coupling_j, double field_h, bool periodic) {
    if (length < 2) throw std::invalid_argument("build_tfim_mpo: need L >= 2");

    const Matrix id = pauli::id2();
    const Matrix x = pauli::x();
    const Matrix z = pauli::z();
    const Matrix none;

    // bond states: 0 = done, 1 = ZZ open (Z placed at previous site),
    // 2 = start, 3 = wrap carry (Z placed at site 0, closes at site L-1)
    const int w = periodic ? 4 : 3;

    MpoOperator mpo;
    mpo.local_dim = 2;
    mpo.sites.resize(length);

    auto bulk = [&]() {
        kernels::MpoSiteOps ops(w, std::vector<Matrix>(w, none));
        ops[0][0] = id;
        ops[1][0] = -coupling_j * z;
        ops[2][0] = -field_h * x;
        ops[2][1] = z;
        ops[2][2] = id;
        if (periodic) ops[3][3] = id;
        return ops;
    };

    for (int j = 0; j < length; ++j) mpo.sites[j].ops = bulk();

    if (periodic) mpo.sites[0].ops[2][3] = z;

    // trim boundaries: site 0 keeps only the start row, site L-1 only the done column
    {
        kernels::MpoSiteOps first(1, std::vector<Matrix>(w, none));
        for (int wp = 0; wp < w; ++wp) first[0][wp] = mpo.sites[0].ops[2][wp];
        mpo.sites[0].ops = std::move(first);

        kernels::MpoSiteOps last(w, std::vector<Matrix>(1, none));
        for (int wl = 0; wl < w; ++wl) last[wl][0] = mpo.sites[length - 1].ops[wl][0];
        if (periodic) last[3][0] = -coupling_j * z;
        mpo.sites[length - 1].ops = std::move(last);
    }

    return mpo;
}

} // namespace decocrit
