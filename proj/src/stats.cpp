#include "sngrav/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"
#include "sngrav/response.hpp"

namespace sngrav {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double zeta_of(const SystemParams& p) { return input_covariance(p.squeeze).zeta; }

// gamma_m k_B T / hbar, the thermal force scale in x~ units (a quarter of the white PSD).
double thermal_rate(const SystemParams& p) {
    return p.gamma_m() * constants::k_B * p.temperature / constants::hbar;
}

double equal_angle_sin(const SystemParams& p) {
    if (!p.equal_angles()) throw DomainError("closed-form statistics need theta_plus == theta_minus");
    return std::sin(p.theta());
}

SpectralMatrix force_spectra(const SystemParams& p, std::vector<double> omegas) {
    return force_referred(p, output_spectra(p, FrequencyGrid::from_values(std::move(omegas))));
}

double flat_numerator(const SystemParams& p) {
    const double s = equal_angle_sin(p), L2 = p.Lambda * p.Lambda;
    const double th = p.prescription == Prescription::QrpnOnly ? 0.0 : 4.0 * thermal_rate(p);
    return s * s * L2 * L2 * zeta_of(p) + s * s * L2 * th;
}

}  // namespace

std::pair<double, double> exclusion_window(const SystemParams& p) { return {0.5 * p.omega_m, 1.5 * p.omega_m}; }

double indicator_mean(const SystemParams& p, double duration_T) {
    const double s = equal_angle_sin(p), zeta = zeta_of(p), L2 = p.Lambda * p.Lambda;
    const double scale = duration_T * p.delta_omega2() * L2;
    if (p.prescription == Prescription::QuantumThermal)
        return scale * (s * zeta - std::sqrt(s * s * zeta * (zeta + thermal_rate(p) / L2)));
    return scale * zeta * (s - std::abs(s));
}

double indicator_mean_spectral(const SystemParams& p, double duration_T, double omega) {
    return duration_T * force_spectra(p, {omega}).Spm[0].real();
}

double indicator_variance(const SystemParams& p, double duration_T, double omega, double kappa) {
    const auto s = force_spectra(p, {omega});
    return duration_T * duration_T * (1.0 + kappa) * s.Spp[0].real() * s.Smm[0].real();
}

double indicator_variance_flat(const SystemParams& p, double duration_T, double kappa) {
    const double f = flat_numerator(p);
    return duration_T * duration_T * (1.0 + kappa) * f * f;
}

double observation_bandwidth(const SystemParams& p) {
    auto product = [&p](const std::vector<double>& w) {
        const auto s = force_spectra(p, w);
        std::vector<double> v(w.size());
        for (std::size_t k = 0; k < w.size(); ++k) v[k] = s.Spp[k].real() * s.Smm[k].real();
        return v;
    };
    const double var1 = product({0.0})[0];
    // Var1 / Var2(w) = 10  <=>  V(w) = 1.1 V(0).
    auto excess = [&](double w) { return product({w})[0] / var1 - 1.1; };

    const double lo = 1e-3 * p.omega_m, hi = 1e3 * std::max(p.Lambda, std::sqrt(p.omega_q2(Arm::B)));
    const auto scan = FrequencyGrid::logarithmic(lo, hi, 600).values;
    const auto vals = product(scan);
    std::size_t hit = scan.size();
    for (std::size_t k = 0; k < scan.size(); ++k)
        if (vals[k] / var1 - 1.1 >= 0.0) {
            hit = k;
            break;
        }
    if (hit == scan.size() || hit == 0)
        throw DomainError("observation_bandwidth: variance ratio does not cross 10 on [" + std::to_string(lo) + ", " +
                          std::to_string(hi) + "] rad/s; parameters outside the measurement-dominated regime");
    double a = scan[hit - 1], b = scan[hit];
    while (b - a > 1e-7 * b) {
        const double m = std::sqrt(a * b);
        (excess(m) >= 0.0 ? b : a) = m;
    }
    return 0.5 * (a + b);
}

double measurement_time_qrpn(const SystemParams& p, double snr, double gamma) {
    const double s = equal_angle_sin(p), dw2 = p.delta_omega2();
    return s * s * std::pow(p.Lambda, 4) * snr * snr / (4.0 * (gamma / constants::two_pi) * dw2 * dw2);
}

double measurement_time_classical(const SystemParams& p, double snr, double gamma, double kappa) {
    const double s = equal_angle_sin(p), zeta = zeta_of(p), L2 = p.Lambda * p.Lambda;
    const double num = s * s * L2 * zeta + 4.0 * s * s * thermal_rate(p);
    const double den = 2.0 * std::sqrt(gamma / constants::two_pi) * p.delta_omega2() * zeta * s;
    return (1.0 + kappa) * std::pow(num / den, 2) * snr * snr;
}

double measurement_time_quantum(const SystemParams& p, double snr, double gamma, double kappa) {
    const double s = equal_angle_sin(p), zeta = zeta_of(p), L2 = p.Lambda * p.Lambda, tr = thermal_rate(p);
    const double xi = squeeze_factors(p.squeeze, p.theta()).xi;
    const double beta2 = std::sqrt((s * s * L2 * L2 * zeta + s * s * L2 * tr) / xi);
    const double num = zeta * (s * s * L2 * L2 - 2.0 * p.omega_sn2_mean() * beta2) + 4.0 * s * s * L2 * tr;
    const double den = std::sqrt(gamma / constants::two_pi) * p.delta_omega2() * L2 *
                       (s * zeta - std::abs(s) * std::sqrt(zeta * (zeta + tr / L2)));
    return (1.0 + kappa) * std::pow(num / den, 2) * snr * snr;
}

double measurement_time_approx(const SystemParams& p, double snr, double gamma, double kappa) {
    const double s = equal_angle_sin(p), L2 = p.Lambda * p.Lambda, dw2 = p.delta_omega2();
    const double suppression = 4.0 * thermal_occupation(p) * p.omega_m * p.omega_m / std::exp(2.0 * p.squeeze.r);
    const double bracket = 1.0 + suppression / L2;
    return (1.0 + kappa) * s * s * L2 * L2 * bracket * bracket * snr * snr /
           (2.0 * (gamma / constants::two_pi) * dw2 * dw2);
}

double measurement_time_spectral(const SystemParams& p, double snr, double gamma, double kappa) {
    constexpr int n = 256;
    std::vector<double> w(n);
    for (int k = 0; k < n; ++k) w[k] = gamma * (k + 0.5) / n;
    const auto s = force_spectra(p, w);
    double var = 0.0, mean = 0.0;
    for (int k = 0; k < n; ++k) {
        var += s.Spp[k].real() * s.Smm[k].real() / n;
        mean += s.Spm[k].real() / n;
    }
    if (mean == 0.0) return inf;
    return constants::two_pi / gamma * snr * snr * (1.0 + kappa) * var / (mean * mean);
}

MeasurementPlan measurement_time(const SystemParams& p, double snr_target, std::optional<double> gamma, double kappa,
                                 bool exclude_resonance) {
    validate(p);
    if (!(snr_target > 0.0)) throw DomainError("target SNR must be positive");
    MeasurementPlan plan;
    plan.snr = snr_target;
    plan.prescription = p.prescription;
    plan.bandwidth_gamma = gamma ? *gamma : observation_bandwidth(p);
    if (!(plan.bandwidth_gamma > 0.0)) throw DomainError("bandwidth must be positive");
    if (exclude_resonance) plan.exclusion_window = exclusion_window(p);
    const auto at_gamma = output_spectra(p, FrequencyGrid::from_values({plan.bandwidth_gamma}));
    plan.kappa = kappa + at_gamma.kappa[0];

    if (p.delta_omega2() == 0.0 || indicator_mean(p, 1.0) == 0.0) {
        plan.unbounded = true;
        plan.duration_T = plan.duration_approx = plan.duration_spectral = inf;
        plan.bins_N = inf;
        return plan;
    }
    const double G = plan.bandwidth_gamma;
    switch (p.prescription) {
        case Prescription::QrpnOnly: plan.duration_T = measurement_time_qrpn(p, snr_target, G); break;
        case Prescription::ClassicalThermal:
            plan.duration_T = measurement_time_classical(p, snr_target, G, plan.kappa);
            break;
        case Prescription::QuantumThermal: plan.duration_T = measurement_time_quantum(p, snr_target, G, plan.kappa); break;
    }
    plan.duration_approx = measurement_time_approx(p, snr_target, G, plan.kappa);
    plan.duration_spectral = measurement_time_spectral(p, snr_target, G, kappa);
    plan.bins_N = G * plan.duration_T / constants::two_pi;
    return plan;
}

DetectionStatistic empirical_statistic(const std::vector<BinStatistic>& bins, const MeasurementPlan& plan) {
    DetectionStatistic out;
    double var = 0.0;
    for (const auto& b : bins) {
        if (plan.exclusion_window && b.omega >= plan.exclusion_window->first && b.omega <= plan.exclusion_window->second)
            continue;
        out.chi_N_mean += b.mean;
        var += b.variance;
        ++out.bins;
    }
    if (out.bins == 0) throw DomainError("empirical_statistic: no frequency bins left after exclusion");
    const double n = static_cast<double>(out.bins);
    out.chi_N_mean /= n;
    out.chi_N_var = var / n / n;
    out.snr = out.chi_N_var > 0.0 ? std::abs(out.chi_N_mean) / std::sqrt(out.chi_N_var) : inf;
    return out;
}

std::vector<BinStatistic> predicted_bins(const SystemParams& p, double duration_T, double gamma) {
    if (!(duration_T > 0.0) || !(gamma > 0.0)) throw DomainError("duration and bandwidth must be positive");
    const auto count = static_cast<std::size_t>(std::floor(gamma * duration_T / constants::two_pi));
    if (count == 0) throw DomainError("predicted_bins: bandwidth narrower than one bin of width 1/T");
    std::vector<double> w(count);
    for (std::size_t j = 0; j < count; ++j) w[j] = constants::two_pi * static_cast<double>(j + 1) / duration_T;
    const auto s = force_spectra(p, w);
    std::vector<BinStatistic> bins(count);
    for (std::size_t j = 0; j < count; ++j)
        bins[j] = {w[j], duration_T * s.Spm[j],
                   duration_T * duration_T * s.Spp[j].real() * s.Smm[j].real()};
    return bins;
}

ToleranceReport imperfection_tolerances(const SystemParams& p) {
    validate(p);
    const double s = std::abs(equal_angle_sin(p)), tr = thermal_rate(p);
    const double base = tr > 0.0 ? std::abs(p.delta_omega2()) * zeta_of(p) / (4.0 * s * tr) : inf;
    return {base, 4.0 * base, 2.0 * base, 8.0 * base, base};
}

MismatchSpectrum mismatch_cross_spectrum(const SystemParams& p, const MismatchSet& m, const FrequencyGrid& grid) {
    validate(p);
    MismatchSpectrum out;
    out.grid = grid;
    const double values[] = {m.d_eps_omega_m, m.d_eps_Q, m.d_eps_M, m.d_eps_gamma, m.delta_BS};
    const char* names[] = {"d_eps_omega_m", "d_eps_Q", "d_eps_M", "d_eps_gamma", "delta_BS"};
    for (int i = 0; i < 5; ++i)
        if (std::abs(values[i]) > 0.3)
            out.warnings.push_back(std::string(names[i]) + " = " + std::to_string(values[i]) +
                                   " is beyond the leading-order range of the mismatch formulas");

    const double s = equal_angle_sin(p), L2 = p.Lambda * p.Lambda, tr = thermal_rate(p), g = p.gamma_m();
    const double wm2 = p.omega_m * p.omega_m;
    const auto spectra = output_spectra(p, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double w = grid[k], d2 = std::norm(mech_denominator(p, w));
        const double bracket = 2.0 * wm2 * (w * w - wm2) / d2 * m.d_eps_omega_m -
                               (0.5 + g * g * w * w / d2) * m.d_eps_Q - m.d_eps_M;
        const cd tm = 4.0 * s * s * L2 * tr / d2 * bracket;
        const cd cav = -m.d_eps_gamma * L2 * tr / d2 - m.d_eps_gamma * L2 * L2 / (2.0 * d2);
        const cd bs = m.delta_BS * (spectra.Spp[k] + spectra.Smm[k]);
        out.test_mass.push_back(tm);
        out.cavity.push_back(cav);
        out.beam_splitter.push_back(bs);
        out.total.push_back(tm + cav + bs);
    }
    return out;
}

}  // namespace sngrav
