#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"
#include "sngrav/response.hpp"
#include "sngrav/spectra.hpp"

namespace sngrav {

namespace {

using Quad = std::array<cd, 4>;

Quad add(const Quad& a, const Quad& b, double sb = 1.0) {
    Quad r;
    for (int i = 0; i < 4; ++i) r[i] = a[i] + sb * b[i];
    return r;
}

double norm(const Quad& a) {
    double m = 0.0;
    for (cd v : a) m = std::max(m, std::abs(v));
    return m;
}

struct Simpson {
    std::function<Quad(double)> f;
    double eps = 0.0;
    int max_depth = 48;
    int deepest = 0;

    Quad panel(double a, double b, const Quad& fa, const Quad& fm, const Quad& fb) const {
        Quad r;
        for (int i = 0; i < 4; ++i) r[i] = (b - a) / 6.0 * (fa[i] + 4.0 * fm[i] + fb[i]);
        return r;
    }

    Quad recurse(double a, double b, const Quad& fa, const Quad& fm, const Quad& fb, const Quad& whole, double tol,
                 int depth) {
        const double m = 0.5 * (a + b);
        const Quad flm = f(0.5 * (a + m)), frm = f(0.5 * (m + b));
        const Quad left = panel(a, m, fa, flm, fm), right = panel(m, b, fm, frm, fb);
        const Quad both = add(left, right);
        const Quad diff = add(both, whole, -1.0);
        deepest = std::max(deepest, depth);
        if (norm(diff) <= 15.0 * tol) {
            Quad r;
            for (int i = 0; i < 4; ++i) r[i] = both[i] + diff[i] / 15.0;  // Richardson step
            return r;
        }
        if (depth >= max_depth)
            throw ConvergenceError("conditional_covariance: adaptive quadrature hit depth " + std::to_string(depth) +
                                       " on [" + std::to_string(a) + ", " + std::to_string(b) + "] rad/s",
                                   {a, b, norm(diff)});
        return add(recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth + 1),
                   recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth + 1));
    }

    // Integral over [a, b], split into `panels` equal starting panels.
    Quad integrate(double a, double b, int panels) {
        Quad total{};
        const double h = (b - a) / panels;
        for (int k = 0; k < panels; ++k) {
            const double lo = a + k * h, hi = lo + h;
            const Quad fa = f(lo), fm = f(0.5 * (lo + hi)), fb = f(hi);
            total = add(total, recurse(lo, hi, fa, fm, fb, panel(lo, hi, fa, fm, fb), eps / panels, 0));
        }
        return total;
    }
};

double validity(double V, const MirrorMaterial& m) {
    validate(m);
    return std::sqrt(std::max(V, 0.0)) / m.x_int;
}

void finish(ConditionalState& st, const MirrorMaterial& a, const MirrorMaterial& b) {
    st.validity_ratio_A = validity(st.Vxx_A, a);
    st.validity_ratio_B = validity(st.Vxx_B, b);
    st.flagged = st.validity_ratio_A > 0.1 || st.validity_ratio_B > 0.1;
}

}  // namespace

ConditionalState conditional_covariance(const SystemParams& p, const MirrorMaterial& mirror_A,
                                        const MirrorMaterial& mirror_B) {
    validate(p);
    const FilterMatrix filter = p.equal_angles() ? wiener_equal_angle(p, FrequencyGrid::from_values({}))
                                                 : wiener_unequal_angles(p, FrequencyGrid::from_values({}));
    const auto rs = rational_spectra(p, p.Lambda);

    // Error spectrum of (x~+, x~-) at w: T Sigma T^dagger with T = (Tx - K Tz) / DD.
    auto error_spectrum = [&](double w) {
        const cd s = w / rs.w_scale, dd = rs.DD(s);
        const auto k = filter.normalized(w);
        const cd K[2][2] = {{k[0], k[1]}, {k[2], k[3]}};
        std::array<std::array<cd, 6>, 2> T;
        for (int i = 0; i < 2; ++i)
            for (int a = 0; a < 6; ++a) {
                cd v = rs.Tx[i][a](s);
                for (int j = 0; j < 2; ++j) v -= K[i][j] * rs.Tz[j][a](s);
                T[i][a] = v / dd;
            }
        Quad S{};
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                for (int a = 0; a < 6; ++a)
                    for (int b = 0; b < 6; ++b)
                        if (rs.sigma[a][b] != 0.0) S[2 * i + j] += rs.sigma[a][b] * T[i][a] * std::conj(T[j][b]);
        return S;
    };
    auto folded = [&](double w) { return add(error_spectrum(w), error_spectrum(-w)); };

    const double X = 64.0 * std::max(std::sqrt(p.omega_q2(Arm::B)), p.Lambda);
    Simpson body{folded};
    // Coarse pass fixes the absolute tolerance.
    body.eps = std::numeric_limits<double>::infinity();
    const Quad rough = body.integrate(0.0, X, 256);
    body.eps = 1e-10 * norm(rough);
    const Quad core = body.integrate(0.0, X, 256);
    // Tail w = X / t on t in (0, 1]; the integrand tends to a constant as t -> 0 since S ~ 1/w^2.
    constexpr double t_min = 1e-9;
    Simpson tail{[&](double t) {
        const double tt = std::max(t, t_min);
        Quad v = folded(X / tt);
        for (cd& e : v) e *= X / (tt * tt);
        return v;
    }};
    tail.eps = 1e-10 * norm(rough);
    const Quad rest = tail.integrate(0.0, 1.0, 16);
    Quad V = add(core, rest);
    // The folded integral over w >= 0 already covers the whole real line.
    for (cd& e : V) e *= constants::hbar / p.M / (4.0 * constants::pi);
    const double Vpp = V[0].real(), Vpm = V[1].real(), Vmp = V[2].real(), Vmm = V[3].real();

    ConditionalState st;
    st.Vxx_A = 0.5 * (Vpp + Vpm + Vmp + Vmm);
    st.Vxx_B = 0.5 * (Vpp - Vpm - Vmp + Vmm);
    st.Vx_AB = 0.5 * (Vpp - Vpm + Vmp - Vmm);
    finish(st, mirror_A, mirror_B);
    return st;
}

ConditionalState conditional_covariance_reduced(const SystemParams& p, const MirrorMaterial& mirror_A,
                                                const MirrorMaterial& mirror_B) {
    validate(p);
    if (!p.equal_angles()) throw DomainError("the per-mirror route needs theta_plus == theta_minus");
    const double th = p.theta(), st = std::sin(th), ct = std::cos(th), L = p.Lambda;
    const auto cov = input_covariance(p.squeeze);
    const double sf = quantum_white_force_psd(p);
    auto arm_variance = [&](Arm arm) {
        const auto poles = filter_poles(p, arm, th, sf);
        const Poly P = Poly::from_roots({poles.beta, poles.partner});
        const Poly DI{p.omega_q2(arm), cd(0.0, -p.gamma_m()), -1.0};
        // Error numerators over P for the amplitude, phase and force inputs.
        const Poly e1 = (Poly::constant(L * L * st) + (P + DI) * cd(ct)) * cd(-1.0 / (L * st));
        const Poly e2 = (P + DI) * cd(-1.0 / L);
        const Poly ef = Poly::constant(-1.0);
        const Poly num = e1 * e1.reflected() * cd(cov.zeta) + e2 * e2.reflected() * cd(cov.eta) +
                         (e1 * e2.reflected() + e2 * e1.reflected()) * cd(cov.cross) +
                         ef * ef.reflected() * cd(sf);
        const std::vector<cd> poles4{poles.beta, poles.partner, std::conj(poles.beta), std::conj(poles.partner)};
        return integrate_rational_real_line(num, poles4).real() / (4.0 * constants::pi) * constants::hbar / p.M;
    };
    ConditionalState out;
    out.Vxx_A = arm_variance(Arm::A);
    out.Vxx_B = arm_variance(Arm::B);
    out.Vx_AB = 0.0;
    finish(out, mirror_A, mirror_B);
    return out;
}

}  // namespace sngrav
