#include "sngrav/fourier.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"
#include "fftw_guard.hpp"

namespace sngrav {

namespace {

// In-place complex DFT of length n; sign is FFTW_FORWARD (e^{-i}) or FFTW_BACKWARD (e^{+i}).
void dft(std::vector<cd>& a, int sign) {
    const int n = static_cast<int>(a.size());
    auto* p = reinterpret_cast<fftw_complex*>(a.data());
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
}

void require_fft_grid(const FrequencyGrid& grid, std::size_t n_values) {
    if (!grid.is_fft_ready()) throw DomainError("operation needs a uniform grid symmetric about zero (FrequencyGrid::symmetric)");
    if (n_values != grid.size()) throw DomainError("sample count does not match the grid");
}

// Samples on the symmetric grid -> time samples indexed by signed m (mod n), unscaled.
std::vector<cd> grid_to_time_raw(const std::vector<cd>& f) {
    const std::size_t n = f.size(), h = n / 2;
    std::vector<cd> a(n);
    for (std::size_t j = 0; j < n; ++j) a[j] = f[(j + h) % n];
    dft(a, FFTW_FORWARD);
    return a;
}

std::vector<cd> time_raw_to_grid(std::vector<cd> b) {
    const std::size_t n = b.size(), h = n / 2;
    dft(b, FFTW_BACKWARD);
    std::vector<cd> f(n);
    for (std::size_t j = 0; j < n; ++j) f[(j + h) % n] = b[j] / static_cast<double>(n);
    return f;
}

void keep_causal(std::vector<cd>& b) {
    const std::size_t n = b.size(), h = n / 2;
    b[0] *= 0.5;
    b[h] *= 0.5;
    for (std::size_t m = h + 1; m < n; ++m) b[m] = 0.0;
}

}  // namespace

FrequencyGrid FrequencyGrid::symmetric(std::size_t n, double half_span) {
    if (n < 4 || n % 2 != 0) throw DomainError("symmetric grid needs an even point count >= 4");
    if (!(half_span > 0.0)) throw DomainError("grid span must be positive");
    FrequencyGrid g;
    g.kind = Kind::Uniform;
    g.spacing = half_span / static_cast<double>(n / 2);
    g.values.resize(n);
    for (std::size_t k = 0; k < n; ++k)
        g.values[k] = (static_cast<double>(k) - static_cast<double>(n / 2)) * g.spacing;
    return g;
}

FrequencyGrid FrequencyGrid::linear(double w_lo, double w_hi, std::size_t n) {
    if (n < 2 || !(w_hi > w_lo)) throw DomainError("linear grid needs n >= 2 and w_hi > w_lo");
    FrequencyGrid g;
    g.kind = Kind::Uniform;
    g.spacing = (w_hi - w_lo) / static_cast<double>(n - 1);
    g.values.resize(n);
    for (std::size_t k = 0; k < n; ++k) g.values[k] = w_lo + static_cast<double>(k) * g.spacing;
    return g;
}

FrequencyGrid FrequencyGrid::logarithmic(double w_lo, double w_hi, std::size_t n) {
    if (n < 2 || !(w_lo > 0.0) || !(w_hi > w_lo)) throw DomainError("log grid needs n >= 2 and 0 < w_lo < w_hi");
    FrequencyGrid g;
    g.kind = Kind::Logarithmic;
    g.values.resize(n);
    const double a = std::log(w_lo), b = std::log(w_hi);
    for (std::size_t k = 0; k < n; ++k)
        g.values[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
    return g;
}

FrequencyGrid FrequencyGrid::from_values(std::vector<double> w) {
    for (std::size_t k = 1; k < w.size(); ++k)
        if (!(w[k] > w[k - 1])) throw DomainError("grid values must be strictly increasing");
    FrequencyGrid g;
    g.values = std::move(w);
    return g;
}

bool FrequencyGrid::is_fft_ready() const {
    const std::size_t n = values.size();
    if (kind != Kind::Uniform || n < 4 || n % 2 != 0) return false;
    const double half_span = spacing * static_cast<double>(n / 2);
    return std::abs(values[n / 2]) <= 1e-12 * half_span && std::abs(values[0] + half_span) <= 1e-12 * half_span;
}

double time_step(const FrequencyGrid& grid) {
    return constants::two_pi / (static_cast<double>(grid.size()) * grid.spacing);
}

std::vector<cd> to_time(const FrequencyGrid& grid, const std::vector<cd>& f) {
    require_fft_grid(grid, f.size());
    const std::size_t n = f.size(), h = n / 2;
    const auto b = grid_to_time_raw(f);
    const double scale = grid.spacing / constants::two_pi;
    std::vector<cd> out(n);
    for (std::size_t m = 0; m < n; ++m) out[m] = b[(m + h) % n] * scale;
    return out;
}

std::vector<cd> from_time(const FrequencyGrid& grid, const std::vector<cd>& ft) {
    require_fft_grid(grid, ft.size());
    const std::size_t n = ft.size(), h = n / 2;
    const double scale = constants::two_pi / grid.spacing;
    std::vector<cd> b(n);
    for (std::size_t m = 0; m < n; ++m) b[(m + h) % n] = ft[m] * scale;
    return time_raw_to_grid(std::move(b));
}

CausalProjection causal_project(const FrequencyGrid& grid, const std::vector<cd>& f) {
    require_fft_grid(grid, f.size());
    CausalProjection out;
    double peak = 0.0;
    for (cd v : f) peak = std::max(peak, std::abs(v));
    if (peak > 0.0) out.edge_ratio = std::max(std::abs(f.front()), std::abs(f.back())) / peak;
    auto b = grid_to_time_raw(f);
    keep_causal(b);
    out.values = time_raw_to_grid(std::move(b));
    return out;
}

SpectralFactorization spectral_factorize(const FrequencyGrid& grid, const std::vector<double>& S, double tol) {
    require_fft_grid(grid, S.size());
    double smax = 0.0;
    std::vector<cd> logS(S.size());
    for (std::size_t k = 0; k < S.size(); ++k) {
        if (!(S[k] > 0.0) || !std::isfinite(S[k]))
            throw DomainError("spectral_factorize: spectrum must be positive, got " + std::to_string(S[k]) +
                              " at w = " + std::to_string(grid[k]));
        smax = std::max(smax, S[k]);
        logS[k] = std::log(S[k]);
    }
    auto b = grid_to_time_raw(logS);
    keep_causal(b);
    auto half = time_raw_to_grid(std::move(b));
    SpectralFactorization out;
    out.phi_plus.resize(S.size());
    out.phi_minus.resize(S.size());
    double worst = 0.0;
    for (std::size_t k = 0; k < S.size(); ++k) {
        out.phi_plus[k] = std::exp(half[k]);
        out.phi_minus[k] = std::conj(out.phi_plus[k]);
        worst = std::max(worst, std::abs(out.phi_plus[k] * out.phi_minus[k] - S[k]));
    }
    out.residual = worst / smax;
    if (!(out.residual < tol))
        throw ConvergenceError("spectral_factorize: residual " + std::to_string(out.residual) + " above tolerance",
                               {out.residual});
    return out;
}

RationalFactor spectral_factorize(const Poly& num, const Poly& den) {
    return {lower_half_plane_factor(num), lower_half_plane_factor(den)};
}

}  // namespace sngrav
