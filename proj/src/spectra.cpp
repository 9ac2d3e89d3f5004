#include "sngrav/spectra.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"
#include "sngrav/response.hpp"

namespace sngrav {

namespace {

void check_prescription(const SystemParams& p) {
    if (p.laser_force_psd < 0.0) throw DomainError("laser_force_psd must be non-negative");
    if (p.prescription == Prescription::QrpnOnly && p.laser_force_psd > 0.0)
        throw DomainError("prescription QRPN_ONLY excludes classical force noise; set laser_force_psd = 0");
    if (p.temperature < 0.0) throw DomainError("temperature must be non-negative");
}

// Classical white force PSD added to the diagonals after the feedback (x~ units).
double classical_thermal_psd(const SystemParams& p) {
    return p.prescription == Prescription::ClassicalThermal ? p.thermal_force_psd() : 0.0;
}

double laser_psd(const SystemParams& p) { return p.laser_force_psd / (p.M * constants::hbar); }

void finish_point(const SystemParams& p, double w, SpectralMatrix& out) {
    const double d2 = std::norm(mech_denominator(p, w)), L2 = p.Lambda * p.Lambda;
    const double sp = std::sin(p.theta_plus), sm = std::sin(p.theta_minus), th = classical_thermal_psd(p);
    const double laser = sp * sp * L2 * laser_psd(p) / d2;
    out.Spp.back() += sp * sp * L2 * th / d2 + laser;
    out.Smm.back() += sm * sm * L2 * th / d2;
    out.kappa.push_back(out.Smm.back().real() > 0.0 ? laser / out.Smm.back().real() : 0.0);
}

}  // namespace

SpectralMatrix output_spectra(const SystemParams& p, const FrequencyGrid& grid) {
    validate(p);
    check_prescription(p);
    if (!p.equal_angles()) return output_spectra(p, grid, wiener_unequal_angles(p, FrequencyGrid::from_values({})));

    const double th = p.theta(), white = quantum_white_force_psd(p);
    const double xi = squeeze_factors(p.squeeze, th).xi;
    const auto pa = filter_poles(p, Arm::A, th, white), pb = filter_poles(p, Arm::B, th, white);
    const double wa2 = p.omega_snA * p.omega_snA, wb2 = p.omega_snB * p.omega_snB;
    SpectralMatrix out;
    out.grid = grid;
    out.prescription = p.prescription;
    for (double w : grid.values) {
        const double d2 = std::norm(mech_denominator(p, w));
        const double fa = f_factor(pa, wa2, w), fb = f_factor(pb, wb2, w);
        const double diag = xi * (fa + fb) / (2 * d2), off = xi * (fa - fb) / (2 * d2);
        out.Spp.push_back(diag);
        out.Smm.push_back(diag);
        out.Spm.push_back(off);
        out.Smp.push_back(off);
        finish_point(p, w, out);
    }
    return out;
}

SpectralMatrix output_spectra(const SystemParams& p, const FrequencyGrid& grid, const FilterMatrix& filter) {
    validate(p);
    check_prescription(p);
    const auto rs = rational_spectra(p, p.Lambda);
    const double wbar2 = p.omega_sn2_mean(), half_dw2 = 0.5 * p.delta_omega2();
    const double ls[2] = {p.Lambda * std::sin(p.theta_plus), p.Lambda * std::sin(p.theta_minus)};
    SpectralMatrix out;
    out.grid = grid;
    out.prescription = p.prescription;
    for (double w : grid.values) {
        const cd s = w / rs.w_scale;
        const double dd2 = std::norm(rs.DD(s));
        cd Sq[2][2];
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k) Sq[i][k] = rs.N[i][k](s) / dd2;
        const auto k = filter.normalized(w);
        const cd K[2][2] = {{k[0], k[1]}, {k[2], k[3]}};
        const cd Dm = mech_denominator(p, w);
        const double Msn[2][2] = {{wbar2, half_dw2}, {half_dw2, wbar2}};
        // A = I + G with G = Lambda diag(sin theta) M_SN K / D_m: the SN feedback of the estimate.
        cd A[2][2];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                cd acc{};
                for (int l = 0; l < 2; ++l) acc += Msn[i][l] * K[l][j];
                A[i][j] = (i == j ? 1.0 : 0.0) + ls[i] * acc / Dm;
            }
        cd S[2][2];
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                cd acc{};
                for (int a = 0; a < 2; ++a)
                    for (int b = 0; b < 2; ++b) acc += A[i][a] * Sq[a][b] * std::conj(A[j][b]);
                S[i][j] = acc;
            }
        out.Spp.push_back(S[0][0].real());
        out.Smm.push_back(S[1][1].real());
        out.Spm.push_back(S[0][1]);
        out.Smp.push_back(S[1][0]);
        finish_point(p, w, out);
    }
    return out;
}

SpectralMatrix force_referred(const SystemParams& p, const SpectralMatrix& s) {
    SpectralMatrix out = s;
    for (std::size_t k = 0; k < s.grid.size(); ++k) {
        const double d2 = std::norm(mech_denominator(p, s.grid[k]));
        out.Spp[k] *= d2;
        out.Smm[k] *= d2;
        out.Spm[k] *= d2;
        out.Smp[k] *= d2;
    }
    return out;
}

std::vector<double> normalized_correlation(const SpectralMatrix& s) {
    std::vector<double> eps(s.grid.size());
    for (std::size_t k = 0; k < eps.size(); ++k) {
        const double d = s.Spp[k].real() * s.Smm[k].real();
        if (!(d > 0.0))
            throw DomainError("normalized_correlation: zero diagonal spectrum at w = " + std::to_string(s.grid[k]));
        eps[k] = std::sqrt(std::abs(s.Spm[k] * s.Smp[k]) / d);
    }
    return eps;
}

cd cross_spectrum_small_theta(const SystemParams& p, double w) {
    const double zeta = input_covariance(p.squeeze).zeta;
    return 2 * p.delta_omega2() * p.Lambda * p.Lambda * zeta * std::sin(p.theta()) /
           std::norm(mech_denominator(p, w));
}

double diagonal_spectrum_small_theta(const SystemParams& p, double w) {
    const double zeta = input_covariance(p.squeeze).zeta, st = std::sin(p.theta());
    return st * st * std::pow(p.Lambda, 4) * zeta / std::norm(mech_denominator(p, w));
}

CorrelationMap correlation_map(const SystemParams& p, const std::vector<double>& theta_plus,
                               const std::vector<double>& theta_minus) {
    CorrelationMap map;
    map.theta_plus = theta_plus;
    map.theta_minus = theta_minus;
    const auto at_wm = FrequencyGrid::from_values({p.omega_m});
    for (double tp : theta_plus) {
        std::vector<double> row;
        for (double tm : theta_minus) {
            SystemParams q = p;
            q.theta_plus = tp;
            q.theta_minus = tm;
            try {
                const auto filter = wiener_unequal_angles(q, FrequencyGrid::from_values({}));
                row.push_back(normalized_correlation(output_spectra(q, at_wm, filter))[0]);
            } catch (const std::exception& e) {
                row.push_back(std::numeric_limits<double>::quiet_NaN());
                map.failures.push_back("theta_plus=" + std::to_string(tp) + " theta_minus=" + std::to_string(tm) +
                                       ": " + e.what());
            }
        }
        map.epsilon.push_back(std::move(row));
    }
    return map;
}

}  // namespace sngrav
