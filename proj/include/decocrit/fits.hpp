#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

// Scaling fits: chord-log CFT forms for the entropy and mutual information,
// chord power laws for correlators, offset exponential decay for the
// correlation length, and the closed-form reference exponents of the
// self-dual Ashkin-Teller line.

namespace decocrit {

enum class FitKind { cft_mi, cft_s2, powerlaw_chord, exp_decay, nu_loglog, qat_reference };

struct FitResult {
    FitKind kind = FitKind::cft_mi;
    std::map<std::string, double> params;
    std::map<std::string, double> stderrs;  // residual-rescaled standard errors
    double residual_rms = 0.0;
    std::pair<double, double> window{0.0, 0.0};
    int n_points = 0;
    bool ok = true;
    std::string message;
};

using FitPoints = std::vector<std::pair<double, double>>;

// chord length (L/pi) sin(pi x / L)
double chord(double x, int length);

// MI(L_A) = (c_eff/2) ln chord(L_A) + beta1; default window L_A in [3, L-3]
FitResult fit_cft_mi(const FitPoints& points, int length,
                     std::optional<std::pair<double, double>> window = std::nullopt);

// S2(L_A) = alpha0 L_A + (c_eff/4) ln chord(L_A) + alpha1
FitResult fit_cft_s2(const FitPoints& points, int length,
                     std::optional<std::pair<double, double>> window = std::nullopt);

// C(r) = gamma0 (pi / (L sin(pi r/L)))^eta; default window r in [3, L/2].
// Non-positive values inside the window are dropped (reported in message).
FitResult fit_powerlaw_chord(const FitPoints& points, int length,
                             std::optional<std::pair<double, double>> window = std::nullopt);

// C(r) = a0 exp(-r/xi) + a1, multi-start damped Gauss-Newton;
// default window r in [2, max r].
FitResult fit_exp_decay(const FitPoints& points,
                        std::optional<std::pair<double, double>> window = std::nullopt);

// xi proportional to |J/h - 1|^nu on log-log axes; points are (|J/h-1|, xi),
// all positive. nu = |slope|, raw slope reported alongside.
FitResult fit_nu(const FitPoints& points);

struct QatReference {
    double eta_x = 0.0;
    double nu = 0.0;
};

// eta_X = pi/arccos(-lambda), nu = 1/[2 - (pi/2)/arccos(-lambda)],
// valid for -1/sqrt(2) <= lambda <= 1.
QatReference qat_reference(double lambda);

} // namespace decocrit
