#include "decocrit/dmrg.hpp"

#include <cmath>
#include <stdexcept>

namespace decocrit {

namespace {

using kernels::SiteTensor;

struct LocalProblem {
    const std::vector<Matrix>* lenv;
    const std::vector<Matrix>* renv;
    const kernels::MpoSiteOps* wl;
    const kernels::MpoSiteOps* wr;
    int chi_l, chi_r, d;

    Matrix apply(const Matrix& theta) const {
        return kernels::heff_matvec(*lenv, *renv, *wl, *wr, theta, chi_l, chi_r, d);
    }
};

Complex dot(const Matrix& a, const Matrix& b) {
    return (a.conjugate().cwiseProduct(b)).sum();
}

// Lanczos with full reorthogonalization and simple restarts; returns the
// lowest Ritz pair. Deterministic for a fixed starting vector.
std::pair<double, Matrix> lanczos_ground(const LocalProblem& h, Matrix guess, double tol,
                                         int max_iter, int max_basis) {
    const double gnorm = std::sqrt(std::abs(dot(guess, guess)));
    if (gnorm < 1e-300) guess.setOnes();
    guess /= std::sqrt(std::abs(dot(guess, guess)));

    const Eigen::Index dim = guess.size();
    max_basis = static_cast<int>(std::min<Eigen::Index>(max_basis, dim));

    double prev_ev = std::numeric_limits<double>::max();
    Matrix v = guess;
    for (int restart = 0; restart < 8; ++restart) {
        std::vector<Matrix> basis;
        std::vector<double> alpha, beta;
        basis.push_back(v);

        for (int it = 0; it < max_basis && static_cast<int>(alpha.size()) < max_iter; ++it) {
            Matrix w = h.apply(basis.back());
            const double a = std::real(dot(basis.back(), w));
            alpha.push_back(a);

            w -= a * basis.back();
            if (basis.size() > 1) w -= beta.back() * basis[basis.size() - 2];
            // full reorthogonalization
            for (const Matrix& u : basis) w -= dot(u, w) * u;

            const int k = static_cast<int>(alpha.size());
            Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(k, k);
            for (int i = 0; i < k; ++i) tri(i, i) = alpha[i];
            for (int i = 0; i + 1 < k; ++i) tri(i, i + 1) = tri(i + 1, i) = beta[i];
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tri);
            const double ev = es.eigenvalues()(0);

            const double b = std::sqrt(std::abs(dot(w, w)));
            const bool ev_converged = std::abs(ev - prev_ev) < tol * (std::abs(ev) + 1.0);
            prev_ev = ev;

            if (ev_converged || b < 1e-13 || static_cast<int>(basis.size()) >= max_basis ||
                static_cast<int>(alpha.size()) >= max_iter) {
                Matrix ritz = Matrix::Zero(basis[0].rows(), basis[0].cols());
                for (int i = 0; i < k; ++i) ritz += es.eigenvectors()(i, 0) * basis[i];
                ritz /= std::sqrt(std::abs(dot(ritz, ritz)));
                if (ev_converged || b < 1e-13 || static_cast<int>(alpha.size()) >= max_iter)
                    return {ev, ritz};
                v = ritz;  // basis full: restart from the best Ritz vector
                break;
            }
            beta.push_back(b);
            basis.push_back(w / b);
        }
    }
    return {prev_ev, v};
}

} // namespace

DmrgResult ground_state(const MpoOperator& mpo, const DmrgSettings& settings) {
    const int length = mpo.length();
    const int d = mpo.local_dim;
    if (length < 2) throw std::invalid_argument("ground_state: need at least two sites");
    if (settings.chi_max < 2) throw std::invalid_argument("ground_state: chi_max must be >= 2");
    if (settings.sweep_tol <= 0) throw std::invalid_argument("ground_state: sweep_tol must be > 0");

    MpsState psi = MpsState::random_state(d, length, settings.init_bond, settings.seed,
                                          settings.chi_max, settings.sv_cutoff);
    psi.canonicalize(0);

    std::vector<SiteTensor> a(length);
    for (int j = 0; j < length; ++j) a[j] = psi.site(j);

    const Matrix boundary = Matrix::Ones(1, 1);
    std::vector<std::vector<Matrix>> lenvs(length), renvs(length);
    lenvs[0] = {boundary};
    renvs[length - 1] = {boundary};
    for (int j = length - 1; j > 1; --j)
        renvs[j - 1] = kernels::env_update_right(renvs[j], mpo.sites[j].ops, a[j], a[j]);

    // Solve bond (j, j+1); afterwards the center sits at j+1 (moving right)
    // or at j (moving left).
    auto solve_bond = [&](int j, bool moving_right) -> double {
        const int chi_l = static_cast<int>(a[j][0].rows());
        const int chi_r = static_cast<int>(a[j + 1][0].cols());
        Matrix theta(d * chi_l, d * chi_r);
        for (int sl = 0; sl < d; ++sl)
            for (int sr = 0; sr < d; ++sr)
                theta.block(sl * chi_l, sr * chi_r, chi_l, chi_r).noalias() = a[j][sl] * a[j + 1][sr];

        LocalProblem prob{&lenvs[j], &renvs[j + 1], &mpo.sites[j].ops, &mpo.sites[j + 1].ops,
                          chi_l, chi_r, d};
        auto [energy, ritz] =
            lanczos_ground(prob, std::move(theta), settings.lanczos_tol, settings.lanczos_max_iter,
                           settings.lanczos_max_basis);

        Eigen::BDCSVD<Matrix> svd(ritz, Eigen::ComputeThinU | Eigen::ComputeThinV);
        const auto [k, discarded] =
            truncation_rank(svd.singularValues(), settings.chi_max, settings.sv_cutoff);
        (void)discarded;
        Eigen::VectorXd sv = svd.singularValues().head(k);
        sv /= sv.norm();  // keep the state normalized after truncation
        Matrix u = svd.matrixU().leftCols(k);
        Matrix w = svd.matrixV().leftCols(k).adjoint();
        if (moving_right)
            w = sv.asDiagonal() * w;
        else
            u = u * sv.asDiagonal();
        for (int sl = 0; sl < d; ++sl) a[j][sl] = u.middleRows(sl * chi_l, chi_l);
        for (int sr = 0; sr < d; ++sr) a[j + 1][sr] = w.middleCols(sr * chi_r, chi_r);
        return energy;
    };

    double e_prev = std::numeric_limits<double>::max();
    double e_sweep = 0.0;
    double delta = std::numeric_limits<double>::max();
    bool converged = false;
    int sweep = 0;
    std::vector<double> sweep_energies;

    for (sweep = 1; sweep <= settings.max_sweeps; ++sweep) {
        // left-to-right
        for (int j = 0; j + 1 < length; ++j) {
            e_sweep = solve_bond(j, true);
            if (j + 1 < length - 1)
                lenvs[j + 1] = kernels::env_update(lenvs[j], mpo.sites[j].ops, a[j], a[j]);
        }
        // right-to-left
        for (int j = length - 2; j >= 0; --j) {
            if (j + 2 < length)
                renvs[j + 1] =
                    kernels::env_update_right(renvs[j + 2], mpo.sites[j + 2].ops, a[j + 2], a[j + 2]);
            e_sweep = solve_bond(j, false);
        }

        sweep_energies.push_back(e_sweep);
        delta = std::abs(e_sweep - e_prev);
        e_prev = e_sweep;
        if (sweep >= settings.min_sweeps && delta < settings.sweep_tol) {
            converged = true;
            break;
        }
    }

    psi.adopt(std::move(a), 0);
    const double nrm = psi.norm();
    if (nrm > 0) psi.scale(1.0 / nrm);

    DmrgResult out;
    out.state = std::move(psi);
    out.energy = e_sweep;
    out.converged = converged;
    out.sweeps = std::min(sweep, settings.max_sweeps);
    out.last_delta_e = delta;
    out.sweep_energies = std::move(sweep_energies);
    return out;
}

} // namespace decocrit
