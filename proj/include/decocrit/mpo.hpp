#pragma once

#include <vector>

#include "decocrit/mps.hpp"

namespace decocrit {

// Matrix product operator on an open chain. ops[w_left][w_right] holds the
// d x d block for that bond-state pair (empty matrix = zero block). Boundary
// bonds have dimension 1.
struct MpoSite {
    kernels::MpoSiteOps ops;
    int left_dim() const { return static_cast<int>(ops.size()); }
    int right_dim() const { return ops.empty() ? 0 : static_cast<int>(ops[0].size()); }
};

struct MpoOperator {
    std::vector<MpoSite> sites;
    int local_dim = 2;

    int length() const { return static_cast<int>(sites.size()); }
    // dense matrix of the full operator (small L only; used by tests)
    Matrix to_dense() const;
};

// MPO for H = -sum_j [J Z_j Z_{j+1} + h X_j]; with periodic boundaries the
// wrap term Z_{L-1} Z_0 rides an extra MPO bond channel.
MpoOperator build_tfim_mpo(int length, double coupling_j, double field_h, bool periodic);

} // namespace decocrit
