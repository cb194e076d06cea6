#include "decocrit/fits.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace decocrit {

namespace {

constexpr double kPi = std::numbers::pi;

struct LinearFit {
    Eigen::VectorXd coeffs;
    Eigen::VectorXd stderrs;
    double residual_rms = 0.0;
    bool ok = true;
    std::string message;
};

// ordinary least squares with residual-rescaled standard errors
LinearFit linear_least_squares(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
    LinearFit out;
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
    if (qr.rank() < p) {
        out.ok = false;
        out.message = "degenerate regressors (collinear within tolerance)";
        out.coeffs = Eigen::VectorXd::Zero(p);
        out.stderrs = Eigen::VectorXd::Constant(p, std::numeric_limits<double>::infinity());
        return out;
    }
    out.coeffs = qr.solve(y);
    const Eigen::VectorXd resid = y - x * out.coeffs;
    out.residual_rms = std::sqrt(resid.squaredNorm() / n);
    const double s2 = n > p ? resid.squaredNorm() / (n - p) : 0.0;
    const Eigen::MatrixXd cov = s2 * (x.transpose() * x).inverse();
    out.stderrs = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    return out;
}

FitPoints windowed(const FitPoints& points, double lo, double hi) {
    FitPoints out;
    for (const auto& pt : points)
        if (pt.first >= lo && pt.first <= hi) out.push_back(pt);
    return out;
}

} // namespace

double chord(double x, int length) {
    return (length / kPi) * std::sin(kPi * x / length);
}

FitResult fit_cft_mi(const FitPoints& points, int length,
                     std::optional<std::pair<double, double>> window) {
    FitResult res;
    res.kind = FitKind::cft_mi;
    const auto [lo, hi] = window.value_or(std::pair<double, double>(3.0, length - 3.0));
    res.window = {lo, hi};
    const FitPoints pts = windowed(points, lo, hi);
    res.n_points = static_cast<int>(pts.size());
    if (pts.size() < 3) {
        res.ok = false;
        res.message = "need at least 3 points inside the window";
        return res;
    }
    Eigen::MatrixXd x(pts.size(), 2);
    Eigen::VectorXd y(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        x(i, 0) = std::log(chord(pts[i].first, length));
        x(i, 1) = 1.0;
        y(i) = pts[i].second;
    }
    const LinearFit lf = linear_least_squares(x, y);
    res.ok = lf.ok;
    res.message = lf.message;
    res.residual_rms = lf.residual_rms;
    res.params["c_eff"] = 2.0 * lf.coeffs(0);
    res.params["beta1"] = lf.coeffs(1);
    res.stderrs["c_eff"] = 2.0 * lf.stderrs(0);
    res.stderrs["beta1"] = lf.stderrs(1);
    return res;
}

FitResult fit_cft_s2(const FitPoints& points, int length,
                     std::optional<std::pair<double, double>> window) {
    FitResult res;
    res.kind = FitKind::cft_s2;
    const auto [lo, hi] = window.value_or(std::pair<double, double>(3.0, length - 3.0));
    res.window = {lo, hi};
    const FitPoints pts = windowed(points, lo, hi);
    res.n_points = static_cast<int>(pts.size());
    if (pts.size() < 4) {
        res.ok = false;
        res.message = "need at least 4 points inside the window";
        return res;
    }
    Eigen::MatrixXd x(pts.size(), 3);
    Eigen::VectorXd y(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        x(i, 0) = pts[i].first;
        x(i, 1) = std::log(chord(pts[i].first, length));
        x(i, 2) = 1.0;
        y(i) = pts[i].second;
    }
    const LinearFit lf = linear_least_squares(x, y);
    res.ok = lf.ok;
    res.message = lf.message;
    res.residual_rms = lf.residual_rms;
    res.params["alpha0"] = lf.coeffs(0);
    res.params["c_eff"] = 4.0 * lf.coeffs(1);
    res.params["alpha1"] = lf.coeffs(2);
    res.stderrs["alpha0"] = lf.stderrs(0);
    res.stderrs["c_eff"] = 4.0 * lf.stderrs(1);
    res.stderrs["alpha1"] = lf.stderrs(2);
    return res;
}

FitResult fit_powerlaw_chord(const FitPoints& points, int length,
                             std::optional<std::pair<double, double>> window) {
    FitResult res;
    res.kind = FitKind::powerlaw_chord;
    const auto [lo, hi] = window.value_or(std::pair<double, double>(3.0, length / 2.0));
    res.window = {lo, hi};
    FitPoints pts = windowed(points, lo, hi);
    const std::size_t before = pts.size();
    std::erase_if(pts, [](const auto& pt) { return pt.second <= 0.0; });
    if (pts.size() < before)
        res.message = "dropped " + std::to_string(before - pts.size()) + " non-positive points";
    res.n_points = static_cast<int>(pts.size());
    if (pts.size() < 3) {
        res.ok = false;
        res.message += (res.message.empty() ? "" : "; ");
        res.message += "need at least 3 positive points inside the window";
        return res;
    }
    Eigen::MatrixXd x(pts.size(), 2);
    Eigen::VectorXd y(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        x(i, 0) = std::log(kPi / (length * std::sin(kPi * pts[i].first / length)));
        x(i, 1) = 1.0;
        y(i) = std::log(pts[i].second);
    }
    const LinearFit lf = linear_least_squares(x, y);
    res.ok = lf.ok;
    if (!lf.ok) res.message = lf.message;
    res.residual_rms = lf.residual_rms;
    res.params["eta"] = lf.coeffs(0);
    res.params["gamma0"] = std::exp(lf.coeffs(1));
    res.stderrs["eta"] = lf.stderrs(0);
    res.stderrs["gamma0"] = std::exp(lf.coeffs(1)) * lf.stderrs(1);
    return res;
}

namespace {

struct ExpModel {
    double a0, xi, a1;
};

double exp_residual_norm(const FitPoints& pts, const ExpModel& m) {
    double s = 0.0;
    for (const auto& [r, y] : pts) {
        const double e = y - (m.a0 * std::exp(-r / m.xi) + m.a1);
        s += e * e;
    }
    return s;
}

// damped Gauss-Newton from one starting point
std::pair<ExpModel, bool> exp_gauss_newton(const FitPoints& pts, ExpModel m) {
    double lambda = 1e-3;
    double prev = exp_residual_norm(pts, m);
    bool converged = false;
    for (int it = 0; it < 200; ++it) {
        Eigen::MatrixXd j(pts.size(), 3);
        Eigen::VectorXd e(pts.size());
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double r = pts[i].first;
            const double f = std::exp(-r / m.xi);
            j(i, 0) = f;
            j(i, 1) = m.a0 * r / (m.xi * m.xi) * f;
            j(i, 2) = 1.0;
            e(i) = pts[i].second - (m.a0 * f + m.a1);
        }
        const Eigen::MatrixXd jtj = j.transpose() * j;
        const Eigen::VectorXd jte = j.transpose() * e;
        Eigen::MatrixXd damped = jtj;
        damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
        const Eigen::VectorXd step = damped.ldlt().solve(jte);
        ExpModel trial{m.a0 + step(0), m.xi + step(1), m.a1 + step(2)};
        if (trial.xi <= 0) trial.xi = m.xi * 0.5;
        const double cost = exp_residual_norm(pts, trial);
        if (cost <= prev) {
            const double rel = std::abs(prev - cost) / std::max(prev, 1e-300);
            m = trial;
            prev = cost;
            lambda = std::max(lambda * 0.3, 1e-12);
            if (rel < 1e-12 || step.norm() < 1e-12 * (1.0 + std::abs(m.xi))) {
                converged = true;
                break;
            }
        } else {
            lambda *= 10.0;
            if (lambda > 1e12) break;
        }
    }
    return {m, converged};
}

} // namespace

FitResult fit_exp_decay(const FitPoints& points,
                        std::optional<std::pair<double, double>> window) {
    FitResult res;
    res.kind = FitKind::exp_decay;
    double rmax = 0.0;
    for (const auto& pt : points) rmax = std::max(rmax, pt.first);
    const auto [lo, hi] = window.value_or(std::pair<double, double>(2.0, rmax));
    res.window = {lo, hi};
    const FitPoints pts = windowed(points, lo, hi);
    res.n_points = static_cast<int>(pts.size());
    if (pts.size() < 4) {
        res.ok = false;
        res.message = "need at least 4 points inside the window";
        return res;
    }

    double ymin = pts[0].second, ymax = pts[0].second, ytail = 0.0;
    for (const auto& [r, y] : pts) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    const std::size_t tail = std::max<std::size_t>(1, pts.size() / 4);
    for (std::size_t i = pts.size() - tail; i < pts.size(); ++i) ytail += pts[i].second;
    ytail /= tail;

    if (ymax - ymin < 1e-14 * std::max(1.0, std::abs(ymax))) {
        res.ok = false;
        res.message = "constant data: a0 ~ 0 branch, xi unidentifiable";
        res.params["a0"] = 0.0;
        res.params["a1"] = ymin;
        res.params["xi"] = 0.0;
        return res;
    }

    // starts: a1 from {min, 0, tail mean}, (a0, xi) from a log-linear seed
    ExpModel best{0, 1, 0};
    double best_cost = std::numeric_limits<double>::infinity();
    bool any_converged = false;
    for (const double a1_seed : {ymin, 0.0, ytail}) {
        FitPoints logpts;
        for (const auto& [r, y] : pts)
            if (y - a1_seed > 1e-300) logpts.emplace_back(r, std::log(y - a1_seed));
        ExpModel start{ymax - a1_seed, std::max(1.0, (hi - lo) / 4.0), a1_seed};
        if (logpts.size() >= 2) {
            Eigen::MatrixXd x(logpts.size(), 2);
            Eigen::VectorXd y(logpts.size());
            for (std::size_t i = 0; i < logpts.size(); ++i) {
                x(i, 0) = logpts[i].first;
                x(i, 1) = 1.0;
                y(i) = logpts[i].second;
            }
            const LinearFit lf = linear_least_squares(x, y);
            if (lf.ok && lf.coeffs(0) < -1e-12) {
                start.xi = -1.0 / lf.coeffs(0);
                start.a0 = std::exp(lf.coeffs(1));
            }
        }
        auto [model, converged] = exp_gauss_newton(pts, start);
        const double cost = exp_residual_norm(pts, model);
        any_converged = any_converged || converged;
        if (cost < best_cost) {
            best_cost = cost;
            best = model;
        }
    }

    res.params["a0"] = best.a0;
    res.params["xi"] = best.xi;
    res.params["a1"] = best.a1;
    res.residual_rms = std::sqrt(best_cost / pts.size());
    res.ok = any_converged;
    if (!any_converged) res.message = "no start converged; best attempt reported";

    // residual-rescaled standard errors at the solution
    Eigen::MatrixXd j(pts.size(), 3);
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double r = pts[i].first;
        const double f = std::exp(-r / best.xi);
        j(i, 0) = f;
        j(i, 1) = best.a0 * r / (best.xi * best.xi) * f;
        j(i, 2) = 1.0;
    }
    const int dof = std::max<int>(1, static_cast<int>(pts.size()) - 3);
    const double s2 = best_cost / dof;
    const Eigen::MatrixXd jtj = j.transpose() * j;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    if (lu.isInvertible()) {
        const Eigen::VectorXd se = (s2 * lu.inverse()).diagonal().cwiseMax(0.0).cwiseSqrt();
        res.stderrs["a0"] = se(0);
        res.stderrs["xi"] = se(1);
        res.stderrs["a1"] = se(2);
    }
    return res;
}

FitResult fit_nu(const FitPoints& points) {
    FitResult res;
    res.kind = FitKind::nu_loglog;
    res.n_points = static_cast<int>(points.size());
    if (points.size() < 3) {
        res.ok = false;
        res.message = "need at least 3 points";
        return res;
    }
    double lo = points[0].first, hi = points[0].first;
    for (const auto& [d, xi] : points) {
        if (d <= 0.0 || xi <= 0.0) {
            res.ok = false;
            res.message = "non-positive input";
            return res;
        }
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    res.window = {lo, hi};
    Eigen::MatrixXd x(points.size(), 2);
    Eigen::VectorXd y(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        x(i, 0) = std::log(points[i].first);
        x(i, 1) = 1.0;
        y(i) = std::log(points[i].second);
    }
    const LinearFit lf = linear_least_squares(x, y);
    res.ok = lf.ok;
    res.message = lf.message;
    res.residual_rms = lf.residual_rms;
    res.params["nu"] = std::abs(lf.coeffs(0));
    res.params["slope"] = lf.coeffs(0);
    res.stderrs["nu"] = lf.stderrs(0);
    return res;
}

QatReference qat_reference(double lambda) {
    const double lo = -1.0 / std::sqrt(2.0);
    if (lambda < lo - 1e-12 || lambda > 1.0 + 1e-12)
        throw std::invalid_argument("qat_reference: lambda outside [-1/sqrt(2), 1]");
    const double ac = std::acos(-std::clamp(lambda, lo, 1.0));
    QatReference out;
    out.eta_x = kPi / ac;
    out.nu = 1.0 / (2.0 - (kPi / 2.0) / ac);
    return out;
}

} // namespace decocrit
