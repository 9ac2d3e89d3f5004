#pragma once

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "sngrav/fourier.hpp"
#include "sngrav/params.hpp"
#include "sngrav/poly.hpp"

namespace sngrav {

enum class FilterMethod { Analytic, Numerical };

// Per-row diagnostics of the fixed-point solve.
struct SolverRowInfo {
    double spectral_radius = 0.0;  // of the linear part of the fixed-point map
    double relaxation = 1.0;       // alpha in r <- (1 - alpha) r + alpha F(r)
    int iterations = 0;
    std::vector<double> trace;  // relative L2 change of the off-diagonal entry per iteration
};

// 2x2 causal filter from the measured ports (+, -) to the quantum part of the displacements.
// Sampled entries are in physical units (m per measured-quadrature unit); `normalized` evaluates
// the dimensionless filter (x~ = sqrt(M/hbar) x per quadrature unit) at any complex frequency.
struct FilterMatrix {
    FrequencyGrid grid;
    std::vector<cd> Kpp, Kpm, Kmp, Kmm;
    FilterMethod method = FilterMethod::Analytic;
    double scale = 1.0;  // sqrt(hbar/M)
    std::function<std::array<cd, 4>(cd)> normalized;  // {pp, pm, mp, mm}
    std::vector<cd> poles;  // in rad/s, all strictly below the real axis for a causal filter
    std::array<SolverRowInfo, 2> info{};
};

// Grid used by default for FFT-based checks: 2^16 points over +-256 max(omega_qB, Lambda).
FrequencyGrid default_filter_grid(const SystemParams& p);

// Closed-form filter for theta_plus == theta_minus. The white force PSD of the quantum thermal
// prescription is folded into the poles automatically.
FilterMatrix wiener_equal_angle(const SystemParams& p, const FrequencyGrid& grid);
// Dimensionless single-arm filter (P + D_I) / (Lambda sin(theta) P) at complex w.
cd arm_filter(const SystemParams& p, Arm arm, double theta, cd w);

struct SolverOptions {
    double tol = 1e-8;
    int max_iter = 500;
    double relaxation = 0.0;  // 0 selects 2/(2 + rho) from a power-iteration estimate of rho
};

// Multichannel Wiener-Hopf solve for arbitrary angles on the exact rational spectra.
FilterMatrix wiener_unequal_angles(const SystemParams& p, const FrequencyGrid& grid, const SolverOptions& opt = {});

struct CausalityReport {
    std::array<double, 4> leakage{};  // max|k(t<0)| / max|k(t)| per entry
    double max_leakage = 0.0;
    double edge_ratio = 0.0;  // regularized |K| at the grid edges over its peak
    bool passed = false;
};

// Inverse-FFTs each entry after multiplying by the causal taper 1/(1 - i w / w_c)^2 with
// w_c = w_max / 16, which removes the 1/w tail without moving anything across t = 0. Passes when
// the leakage is below 1e-3. Throws DomainError if the grid is not FFT-ready or too narrow.
CausalityReport validate_causality(const FilterMatrix& filter, double threshold = 1e-3);

// Spectra of the measured quantum parts and of their cross terms with the displacements, as
// exact polynomials in s = w / w_scale: S_yy = N / |DD|^2, S_xy = X / |DD|^2 on the real axis.
struct RationalSpectra {
    double w_scale = 1.0;
    std::array<std::array<Poly, 2>, 2> N;  // N[i][k] for S_{y_i y_k}
    std::array<std::array<Poly, 2>, 2> X;  // X[i][k] for S_{x_i y_k}
    Factored DD;                           // D_A D_B in s
    // Transfer from the six inputs (a1+, a2+, a1-, a2-, f+, f-) times DD: x~ = Tx u / DD and
    // y_q = Tz u / DD. sigma is the input covariance; the f entries are nonzero only under the
    // quantum thermal prescription.
    std::array<std::array<Poly, 6>, 2> Tx, Tz;
    std::array<std::array<double, 6>, 6> sigma{};
};
RationalSpectra rational_spectra(const SystemParams& p, double w_scale);

// Wiener-Hopf residual test: the causal part of S_xy - K S_yy relative to S_xy, evaluated with
// FFTs on `grid` after an anticausal taper. Only meaningful when the grid resolves gamma_m.
double orthogonality_defect(const SystemParams& p, const FilterMatrix& filter, const FrequencyGrid& grid);

}  // namespace sngrav
