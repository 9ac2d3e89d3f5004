#include "sngrav/wiener.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"
#include "sngrav/response.hpp"

namespace sngrav {

FrequencyGrid default_filter_grid(const SystemParams& p) {
    const double wmax = std::max(std::sqrt(p.omega_q2(Arm::B)), p.Lambda);
    return FrequencyGrid::symmetric(std::size_t{1} << 16, 256.0 * wmax);
}

cd arm_filter(const SystemParams& p, Arm arm, double theta, cd w) {
    const auto poles = filter_poles(p, arm, theta, quantum_white_force_psd(p));
    const cd P = poles.P(w);
    const cd D = mech_denominator(p, w, p.omega_sn(arm) * p.omega_sn(arm));
    return (P + D) / (p.Lambda * std::sin(theta) * P);
}

FilterMatrix wiener_equal_angle(const SystemParams& p, const FrequencyGrid& grid) {
    validate(p);
    if (!p.equal_angles()) throw DomainError("wiener_equal_angle needs theta_plus == theta_minus");
    const double th = p.theta(), white = quantum_white_force_psd(p);
    const auto pa = filter_poles(p, Arm::A, th, white), pb = filter_poles(p, Arm::B, th, white);
    const double wa2 = p.omega_snA * p.omega_snA, wb2 = p.omega_snB * p.omega_snB;
    const double ls = p.Lambda * std::sin(th);
    auto eval = [p, pa, pb, wa2, wb2, ls](cd w) -> std::array<cd, 4> {
        const cd PA = pa.P(w), PB = pb.P(w);
        const cd KA = (PA + mech_denominator(p, w, wa2)) / (ls * PA);
        const cd KB = (PB + mech_denominator(p, w, wb2)) / (ls * PB);
        const cd s = 0.5 * (KA + KB), d = 0.5 * (KA - KB);
        return {s, d, d, s};
    };
    FilterMatrix f;
    f.grid = grid;
    f.method = FilterMethod::Analytic;
    f.scale = std::sqrt(constants::hbar / p.M);
    f.normalized = eval;
    f.poles = {pa.beta, pa.partner, pb.beta, pb.partner};
    for (double w : grid.values) {
        const auto k = eval(w);
        f.Kpp.push_back(f.scale * k[0]);
        f.Kpm.push_back(f.scale * k[1]);
        f.Kmp.push_back(f.scale * k[2]);
        f.Kmm.push_back(f.scale * k[3]);
    }
    return f;
}

CausalityReport validate_causality(const FilterMatrix& filter, double threshold) {
    const auto& grid = filter.grid;
    if (!grid.is_fft_ready())
        throw DomainError("validate_causality needs a uniform grid symmetric about zero; use default_filter_grid()");
    const double wc = grid.values.back() / 16.0;
    CausalityReport rep;
    const std::array<const std::vector<cd>*, 4> entries{&filter.Kpp, &filter.Kpm, &filter.Kmp, &filter.Kmm};
    const std::size_t n = grid.size();
    for (std::size_t e = 0; e < 4; ++e) {
        std::vector<cd> v(n);
        double peak = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const cd taper = 1.0 / std::pow(1.0 - cd(0.0, grid[k] / wc), 2);
            v[k] = (*entries[e])[k] * taper;
            peak = std::max(peak, std::abs(v[k]));
        }
        if (peak == 0.0) continue;
        rep.edge_ratio = std::max(rep.edge_ratio, std::max(std::abs(v.front()), std::abs(v.back())) / peak);
        const auto t = to_time(grid, v);
        double before = 0.0, all = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            all = std::max(all, std::abs(t[m]));
            if (m < n / 2) before = std::max(before, std::abs(t[m]));
        }
        rep.leakage[e] = all > 0.0 ? before / all : 0.0;
        rep.max_leakage = std::max(rep.max_leakage, rep.leakage[e]);
    }
    if (rep.edge_ratio > 1e-4)
        throw DomainError("validate_causality: |K| at the grid edge is " + std::to_string(rep.edge_ratio) +
                          " of its peak (needs < 1e-4); widen the grid span");
    rep.passed = rep.max_leakage < threshold;
    return rep;
}

double orthogonality_defect(const SystemParams& p, const FilterMatrix& filter, const FrequencyGrid& grid) {
    const auto rs = rational_spectra(p, p.Lambda);
    const std::size_t n = grid.size();
    const double wc = grid.values.back() / 8.0;
    double worst = 0.0;
    for (int r = 0; r < 2; ++r) {
        std::array<std::vector<cd>, 2> resid{std::vector<cd>(n), std::vector<cd>(n)};
        double ref = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double w = grid[k];
            const cd s = w / rs.w_scale;
            const double dd2 = std::norm(rs.DD(s));
            const auto K = filter.normalized(w);
            const cd Kr[2] = {K[2 * r], K[2 * r + 1]};
            const cd taper = 1.0 / std::pow(1.0 + cd(0.0, w / wc), 2);
            for (int j = 0; j < 2; ++j) {
                const cd sxy = rs.X[r][j](s) / dd2;
                cd acc = sxy;
                for (int i = 0; i < 2; ++i) acc -= Kr[i] * rs.N[i][j](s) / dd2;
                resid[j][k] = acc * taper;
                ref += std::norm(sxy * taper);
            }
        }
        double num = 0.0;
        for (int j = 0; j < 2; ++j) {
            const auto proj = causal_project(grid, resid[j]).values;
            for (cd v : proj) num += std::norm(v);
        }
        worst = std::max(worst, std::sqrt(num / ref));
    }
    return worst;
}

}  // namespace sngrav
