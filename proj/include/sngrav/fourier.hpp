#pragma once

#include <complex>
#include <vector>

#include "sngrav/poly.hpp"

// Fourier convention used throughout: f(w) = \int f(t) e^{+i w t} dt, so a causal response
// (support t >= 0) is analytic in the upper half-plane and its poles lie in the lower one.
namespace sngrav {

struct FrequencyGrid {
    enum class Kind { Uniform, Logarithmic, Irregular };
    std::vector<double> values;  // rad/s, strictly increasing
    Kind kind = Kind::Irregular;
    double spacing = 0.0;  // uniform step; 0 unless kind == Uniform

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t k) const { return values[k]; }

    // n points w_k = (k - n/2) dw with dw = half_span / (n/2); n must be even. This is the
    // layout every FFT-based operation expects.
    static FrequencyGrid symmetric(std::size_t n, double half_span);
    static FrequencyGrid linear(double w_lo, double w_hi, std::size_t n);
    static FrequencyGrid logarithmic(double w_lo, double w_hi, std::size_t n);
    static FrequencyGrid from_values(std::vector<double> w);

    bool is_fft_ready() const;
};

// Inverse transform f(t) = (1/2pi) \int f(w) e^{-i w t} dw of samples on a symmetric grid.
// Output index m holds t_m = (m - n/2) dt with dt = 2pi / (n dw).
std::vector<std::complex<double>> to_time(const FrequencyGrid& grid, const std::vector<std::complex<double>>& f);
std::vector<std::complex<double>> from_time(const FrequencyGrid& grid, const std::vector<std::complex<double>>& ft);
double time_step(const FrequencyGrid& grid);

struct CausalProjection {
    std::vector<std::complex<double>> values;
    // max(|f| at the two grid edges) / max|f|; truncation error grows with it.
    double edge_ratio = 0.0;
};

// The part of f whose inverse transform lives on t >= 0, i.e. the piece with no poles in the
// upper half-plane. The t = 0 sample and the Nyquist sample are split evenly between parts.
CausalProjection causal_project(const FrequencyGrid& grid, const std::vector<std::complex<double>>& f);

struct SpectralFactorization {
    std::vector<std::complex<double>> phi_plus;   // causal, zeros and poles below the axis
    std::vector<std::complex<double>> phi_minus;  // conj(phi_plus) on the real axis
    double residual = 0.0;  // max|phi_plus phi_minus - S| / max S
};

// Cepstral factorization of a sampled spectrum: phi_plus = exp([log S]_causal). Throws
// DomainError for non-positive samples and ConvergenceError when the residual exceeds tol.
SpectralFactorization spectral_factorize(const FrequencyGrid& grid, const std::vector<double>& S, double tol = 1e-8);

// Exact factorization of S = num/den given as polynomials in w that are real and positive on
// the real axis; zeros and poles of phi_plus are the lower half-plane roots.
struct RationalFactor {
    Factored num;
    Factored den;
    std::complex<double> operator()(std::complex<double> w) const { return num(w) / den(w); }
};
RationalFactor spectral_factorize(const Poly& num, const Poly& den);

}  // namespace sngrav
