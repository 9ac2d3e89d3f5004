#include "sngrav/mcsim.hpp"

#include <fftw3.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <string>

#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"
#include "fftw_guard.hpp"
#include "sngrav/philox.hpp"
#include "sngrav/response.hpp"

namespace sngrav {

namespace {

std::vector<cd> real_dft(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    std::vector<double> in(x);
    std::vector<cd> out(x.size() / 2 + 1);
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan);
    return out;
}

std::vector<double> inverse_real_dft(std::vector<cd> half, std::size_t n) {
    std::vector<double> out(n);
    fftw_plan plan;
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        plan = fftw_plan_dft_c2r_1d(static_cast<int>(n), reinterpret_cast<fftw_complex*>(half.data()), out.data(),
                                    FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    for (double& v : out) v /= static_cast<double>(n);
    return out;
}

}  // namespace

SynthesisPlan plan_synthesis(const SystemParams& p, double duration, double dt) {
    validate(p);
    const double dt_max = constants::two_pi / (20.0 * std::max(std::sqrt(p.omega_q2(Arm::B)), p.Lambda));
    if (!(dt > 0.0) || dt > dt_max * (1.0 + 1e-12))
        throw DomainError("synthesize: dt = " + std::to_string(dt) + " s exceeds 2pi/(20 max(omega_qB, Lambda)) = " +
                          std::to_string(dt_max) + " s");
    const double min_duration = 100.0 * constants::two_pi / p.omega_m;
    if (duration < min_duration * (1.0 - 1e-12))
        throw DomainError("synthesize: duration must be at least 100 mechanical periods (" +
                          std::to_string(min_duration) + " s)");
    SynthesisPlan plan;
    plan.dt = dt;
    plan.n = static_cast<std::size_t>(std::llround(duration / dt));
    plan.n += plan.n % 2;
    const std::size_t half = plan.n / 2 + 1;
    std::vector<double> w(half);
    for (std::size_t k = 0; k < half; ++k)
        w[k] = constants::two_pi * static_cast<double>(k) / (static_cast<double>(plan.n) * dt);
    const auto S = output_spectra(p, FrequencyGrid::from_values(w));
    plan.root.resize(half);
    for (std::size_t k = 0; k < half; ++k) {
        // The DFT uses e^{-i w t}, the opposite sign to the model's transform, hence conj(S).
        Eigen::Matrix2cd m;
        m << std::conj(S.Spp[k]), std::conj(S.Spm[k]), std::conj(S.Smp[k]), std::conj(S.Smm[k]);
        m = 0.5 * (m + m.adjoint()).eval();
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(m);
        Eigen::Vector2d lam = eig.eigenvalues();
        const double tol = 1e-12 * std::max(1.0, std::abs(m.trace()));
        if (lam.minCoeff() < -tol)
            throw DomainError("synthesize: spectral matrix is not positive semidefinite at f = " +
                              std::to_string(w[k] / constants::two_pi) + " Hz");
        lam = lam.cwiseMax(0.0).cwiseSqrt();
        const Eigen::Matrix2cd r = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().adjoint();
        plan.root[k] = {r(0, 0), r(0, 1), r(1, 0), r(1, 1)};
    }
    return plan;
}

TimeSeriesPair synthesize(const SynthesisPlan& plan, std::uint64_t seed) {
    const std::size_t n = plan.n, half = n / 2 + 1;
    const Philox4x32 rng0(seed, 0), rng1(seed, 1);
    const double amp = std::sqrt(static_cast<double>(n) / (2.0 * plan.dt));
    std::vector<cd> Xp(half), Xm(half);
    for (std::size_t k = 0; k < half; ++k) {
        const auto g = rng0.normal_pair(k), h = rng1.normal_pair(k);
        cd z0, z1;
        if (k == 0 || k == n / 2) {
            // Real bins carry a real draw and the real part of the root (S is real there).
            z0 = g[0];
            z1 = h[0];
        } else {
            z0 = cd(g[0], g[1]) / std::sqrt(2.0);
            z1 = cd(h[0], h[1]) / std::sqrt(2.0);
        }
        const auto& r = plan.root[k];
        Xp[k] = amp * (r[0] * z0 + r[1] * z1);
        Xm[k] = amp * (r[2] * z0 + r[3] * z1);
        if (k == 0 || k == n / 2) {
            Xp[k] = Xp[k].real();
            Xm[k] = Xm[k].real();
        }
    }
    TimeSeriesPair ts;
    ts.dt = plan.dt;
    ts.seed = seed;
    ts.samples_plus = inverse_real_dft(std::move(Xp), n);
    ts.samples_minus = inverse_real_dft(std::move(Xm), n);
    return ts;
}

TimeSeriesPair synthesize(const SystemParams& p, double duration, double dt, std::uint64_t seed) {
    return synthesize(plan_synthesis(p, duration, dt), seed);
}

WelchEstimate welch_estimate(const TimeSeriesPair& ts, std::size_t segment_length, double overlap) {
    const std::size_t n = ts.samples_plus.size();
    if (ts.samples_minus.size() != n) throw DomainError("welch_estimate: channels differ in length");
    if (segment_length < 8 || segment_length % 2 != 0 || segment_length > n / 4)
        throw DomainError("welch_estimate: segment length must be even, >= 8 and <= n/4 = " + std::to_string(n / 4));
    if (!(overlap >= 0.0 && overlap < 1.0)) throw DomainError("welch_estimate: overlap must be in [0, 1)");
    const std::size_t L = segment_length, half = L / 2 + 1;
    const auto step = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(L * (1.0 - overlap))));
    std::vector<double> win(L);
    double wsum2 = 0.0;
    for (std::size_t j = 0; j < L; ++j) {
        win[j] = 0.5 - 0.5 * std::cos(constants::two_pi * static_cast<double>(j) / static_cast<double>(L));
        wsum2 += win[j] * win[j];
    }
    std::vector<cd> pp(half), mm(half), pm(half);
    WelchEstimate out;
    for (std::size_t start = 0; start + L <= n; start += step) {
        std::vector<double> a(L), b(L);
        for (std::size_t j = 0; j < L; ++j) {
            a[j] = win[j] * ts.samples_plus[start + j];
            b[j] = win[j] * ts.samples_minus[start + j];
        }
        const auto A = real_dft(a), B = real_dft(b);
        for (std::size_t k = 0; k < half; ++k) {
            pp[k] += std::norm(A[k]);
            mm[k] += std::norm(B[k]);
            pm[k] += std::conj(A[k]) * B[k];  // conj of A B*, matching the model's transform sign
        }
        ++out.segment_count;
    }
    if (out.segment_count < 8)
        out.warnings.push_back("welch_estimate: only " + std::to_string(out.segment_count) +
                               " segments; variance of the estimate is large");
    std::vector<double> w(half);
    auto& S = out.estimate;
    for (std::size_t k = 0; k < half; ++k) {
        w[k] = constants::two_pi * static_cast<double>(k) / (static_cast<double>(L) * ts.dt);
        const double one_sided = (k == 0 || k == L / 2) ? 1.0 : 2.0;
        const double scale = one_sided * ts.dt / (wsum2 * static_cast<double>(out.segment_count));
        S.Spp.push_back(pp[k] * scale);
        S.Smm.push_back(mm[k] * scale);
        S.Spm.push_back(pm[k] * scale);
        S.Smp.push_back(std::conj(pm[k]) * scale);
        S.kappa.push_back(0.0);
    }
    S.grid = FrequencyGrid::from_values(std::move(w));
    return out;
}

EmpiricalAggregate empirical_aggregate(const TimeSeriesPair& ts, const SystemParams& p, const MeasurementPlan& plan) {
    const std::size_t n = ts.samples_plus.size();
    if (ts.samples_minus.size() != n || n < 4) throw DomainError("empirical_aggregate: bad time series");
    const double T = ts.duration(), nyquist = constants::pi / ts.dt;
    if (plan.bandwidth_gamma > nyquist) throw DomainError("empirical_aggregate: bandwidth exceeds the Nyquist frequency");
    const auto last = static_cast<std::size_t>(std::floor(plan.bandwidth_gamma * T / constants::two_pi));
    if (last == 0) throw DomainError("empirical_aggregate: record too short for a bin of width 1/T inside the bandwidth");
    const auto Xp = real_dft(ts.samples_plus), Xm = real_dft(ts.samples_minus);
    std::vector<cd> c;
    for (std::size_t j = 1; j <= std::min(last, n / 2); ++j) {
        const double w = constants::two_pi * static_cast<double>(j) / T;
        if (plan.exclusion_window && w >= plan.exclusion_window->first && w <= plan.exclusion_window->second) continue;
        const cd D = mech_denominator(p, w);
        const cd Fp = D * ts.dt * std::conj(Xp[j]), Fm = D * ts.dt * std::conj(Xm[j]);
        c.push_back(2.0 * Fp * std::conj(Fm));  // T * (2/T) F+ F-^*
    }
    if (c.empty()) throw DomainError("empirical_aggregate: no bins left after exclusion");
    EmpiricalAggregate out;
    out.bins = c.size();
    for (cd v : c) out.chi_N += v;
    out.chi_N /= static_cast<double>(c.size());
    double var = 0.0;
    for (cd v : c) var += std::norm(v - out.chi_N);
    var /= std::max<double>(1.0, static_cast<double>(c.size()) - 1.0);
    out.snr_empirical = var > 0.0 ? std::abs(out.chi_N) * std::sqrt(static_cast<double>(c.size()) / var) : 0.0;
    return out;
}

}  // namespace sngrav
