#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "sngrav/params.hpp"
#include "sngrav/spectra.hpp"
#include "sngrav/stats.hpp"

namespace sngrav {

struct TimeSeriesPair {
    double dt = 0.0;  // s
    std::vector<double> samples_plus, samples_minus;
    std::uint64_t seed = 0;
    std::string generator = "philox4x32-10";

    double duration() const { return dt * static_cast<double>(samples_plus.size()); }
};

// Per-frequency matrix square roots for circulant synthesis, computed once and reused across seeds.
struct SynthesisPlan {
    double dt = 0.0;
    std::size_t n = 0;  // even record length
    std::vector<std::array<std::complex<double>, 4>> root;  // row-major 2x2 per bin k = 0..n/2
};

// Checks dt <= 2pi / (20 max(omega_qB, Lambda)) and duration >= 100 * 2pi / omega_m, then factors
// conj(S) at every DFT bin. DomainError names the first frequency where S is not PSD.
SynthesisPlan plan_synthesis(const SystemParams& p, double duration, double dt);

// DFT bin k takes its two complex normals from Philox streams 0 and 1 at index k, so the seed
// alone fixes every sample and any bin can be regenerated independently.
// The population one-sided cross-spectral matrix equals output_spectra(p).
TimeSeriesPair synthesize(const SynthesisPlan& plan, std::uint64_t seed);
TimeSeriesPair synthesize(const SystemParams& p, double duration, double dt, std::uint64_t seed);

struct WelchEstimate {
    SpectralMatrix estimate;  // one-sided, power per Hz, same cross-spectrum orientation as output_spectra
    std::size_t segment_count = 0;
    std::string window = "hann";
    std::vector<std::string> warnings;
};

// Hann-windowed averaged periodograms; overlap is the fraction shared by consecutive segments.
WelchEstimate welch_estimate(const TimeSeriesPair& ts, std::size_t segment_length, double overlap = 0.5);

struct EmpiricalAggregate {
    std::complex<double> chi_N;
    double snr_empirical = 0.0;  // |chi_N| sqrt(N) / std over bins of the bin indicator
    std::size_t bins = 0;
};

// Force-refers each full-record DFT bin, forms T * (2/T) F+ conj(F-) on bins 0 < w_j <= Gamma and
// averages them, skipping the plan's exclusion window.
EmpiricalAggregate empirical_aggregate(const TimeSeriesPair& ts, const SystemParams& p, const MeasurementPlan& plan);

}  // namespace sngrav
