#include <doctest.h>

#include <cmath>

#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"
#include "sngrav/response.hpp"
#include "sngrav/wiener.hpp"

using namespace sngrav;
namespace k = sngrav::constants;

namespace {

// Three operating points used for cross-validation: the reference point, an unsqueezed stronger
// angle at lower cooperativity, and the quantum thermal prescription at lower Q.
std::vector<SystemParams> parameter_sets() {
    std::vector<SystemParams> sets{table1()};
    auto b = table1();
    b.theta_plus = b.theta_minus = -0.5;
    b.Lambda = k::two_pi * 0.5;
    b.squeeze = {0.0, 0.0};
    b.temperature = 0.1;
    sets.push_back(b);
    auto c = table1();
    c.prescription = Prescription::QuantumThermal;
    c.Q_m = 1e5;
    c.theta_plus = c.theta_minus = -0.3;
    c.Lambda = k::two_pi * 2.0;
    sets.push_back(c);
    return sets;
}

// max |a - b| / |a| over entries and points where |a| > 1e-3 of the entry's peak.
double max_relative_error(const FilterMatrix& a, const FilterMatrix& b) {
    double worst = 0.0;
    const std::array<std::pair<const std::vector<cd>*, const std::vector<cd>*>, 4> pairs{
        std::pair{&a.Kpp, &b.Kpp}, std::pair{&a.Kpm, &b.Kpm}, std::pair{&a.Kmp, &b.Kmp}, std::pair{&a.Kmm, &b.Kmm}};
    for (const auto& [x, y] : pairs) {
        double peak = 0.0;
        for (cd v : *x) peak = std::max(peak, std::abs(v));
        for (std::size_t k = 0; k < x->size(); ++k)
            if (std::abs((*x)[k]) > 1e-3 * peak) worst = std::max(worst, std::abs((*x)[k] - (*y)[k]) / std::abs((*x)[k]));
    }
    return worst;
}

FrequencyGrid band() { return FrequencyGrid::logarithmic(k::two_pi * 1e-4, k::two_pi * 10.0, 600); }

}  // namespace

TEST_SUITE("wiener") {

TEST_CASE("equal-angle filter has the symmetric block structure") {
    const auto K = wiener_equal_angle(table1(), band());
    CHECK(K.method == FilterMethod::Analytic);
    for (std::size_t k = 0; k < K.grid.size(); ++k) {
        CHECK(K.Kpp[k] == K.Kmm[k]);
        CHECK(K.Kpm[k] == K.Kmp[k]);
    }
    for (cd z : K.poles) CHECK(z.imag() < 0.0);
}

TEST_CASE("equal-angle filter in the QG limit has no cross terms") {
    auto p = table1();
    p.omega_snB = p.omega_snA;
    const auto K = wiener_equal_angle(p, band());
    for (cd v : K.Kpm) CHECK(v == cd(0.0));
}

TEST_CASE("equal-angle filter rejects unequal angles") {
    auto p = table1();
    p.theta_plus = -0.2;
    CHECK_THROWS_AS(wiener_equal_angle(p, band()), DomainError);
}

TEST_CASE("arm filter at zero frequency") {
    const auto p = table1();
    for (Arm arm : {Arm::A, Arm::B}) {
        const cd b = beta_exact(p, arm);
        const double b2 = std::norm(b), wq2 = p.omega_q2(arm);
        const double oracle = (wq2 - b2) / (-p.Lambda * std::sin(p.theta()) * b2);
        CHECK(std::abs(arm_filter(p, arm, p.theta(), 0.0) - oracle) < 1e-9 * std::abs(oracle));
    }
}

TEST_CASE("arm filter equals 1/(Lambda sin theta) at the shifted resonance") {
    const auto p = table1();
    const double target = 1.0 / (p.Lambda * std::sin(p.theta()));
    for (Arm arm : {Arm::A, Arm::B}) {
        const double wq = std::sqrt(p.omega_q2(arm));
        for (double w : {wq, -wq}) {
            const cd at = arm_filter(p, arm, p.theta(), cd(w, -0.5 * p.gamma_m()));
            CHECK(std::abs(at - target) < 1e-6 * std::abs(target));
        }
    }
}

TEST_CASE("filter scales as M^-1/2 at fixed rates") {
    auto p = table1();
    const auto K1 = wiener_equal_angle(p, band());
    p.M *= 4.0;
    const auto K4 = wiener_equal_angle(p, band());
    for (std::size_t k = 0; k < K1.grid.size(); k += 37) {
        CHECK(std::abs(K4.Kpp[k] - 0.5 * K1.Kpp[k]) <= 1e-12 * std::abs(K1.Kpp[k]));
        CHECK(std::abs(K4.Kpm[k] - 0.5 * K1.Kpm[k]) <= 1e-12 * std::abs(K1.Kpm[k]));
    }
}

TEST_CASE("numerical solver reproduces the closed form at equal angles") {
    for (const auto& p : parameter_sets()) {
        const auto analytic = wiener_equal_angle(p, band());
        const auto numerical = wiener_unequal_angles(p, band());
        CHECK(numerical.method == FilterMethod::Numerical);
        CHECK(max_relative_error(analytic, numerical) < 1e-2);
        CHECK(max_relative_error(analytic, numerical) < 1e-8);
    }
}

TEST_CASE("numerical solver output is symmetric at equal angles") {
    const auto K = wiener_unequal_angles(table1(), band());
    for (std::size_t k = 0; k < K.grid.size(); ++k) {
        CHECK(std::abs(K.Kpp[k] - K.Kmm[k]) <= 1e-8 * std::abs(K.Kpp[k]));
        CHECK(std::abs(K.Kpm[k] - K.Kmp[k]) <= 1e-8 * std::abs(K.Kpp[k]));
    }
}

TEST_CASE("numerical solver in the QG limit decouples the channels at any angles") {
    auto p = table1();
    p.omega_snB = p.omega_snA;
    p.theta_plus = -0.3;
    p.theta_minus = -0.1;
    const auto K = wiener_unequal_angles(p, band());
    for (std::size_t k = 0; k < K.grid.size(); ++k) {
        CHECK(std::abs(K.Kpm[k]) <= 1e-10 * std::abs(K.Kpp[k]));
        CHECK(std::abs(K.Kmp[k]) <= 1e-10 * std::abs(K.Kmm[k]));
    }
}

TEST_CASE("numerical solver reports non-convergence with a trace") {
    auto p = table1();
    p.theta_plus = -0.3;
    SolverOptions opt;
    opt.max_iter = 1;
    try {
        wiener_unequal_angles(p, band(), opt);
        FAIL("expected ConvergenceError");
    } catch (const ConvergenceError& e) {
        CHECK(e.trace().size() == 1);
    }
}

TEST_CASE("unequal-angle solve converges and keeps its poles below the axis") {
    auto p = table1();
    p.theta_plus = -0.24;
    p.theta_minus = -0.04;
    const auto K = wiener_unequal_angles(p, band());
    for (cd z : K.poles) CHECK(z.imag() < 0.0);
    for (const auto& info : K.info) {
        CHECK(info.iterations > 0);
        CHECK(info.iterations <= 500);
        CHECK(info.trace.back() < 1e-8);
    }
}

TEST_CASE("causality of the analytic and numerical filters") {
    for (const auto& p : parameter_sets()) {
        const auto grid = default_filter_grid(p);
        CHECK(validate_causality(wiener_equal_angle(p, grid)).passed);
        auto q = p;
        q.theta_plus = p.theta_minus - 0.1;
        const auto rep = validate_causality(wiener_unequal_angles(q, grid));
        CHECK(rep.passed);
        CHECK(rep.max_leakage < 1e-3);
    }
}

TEST_CASE("causality check flags a filter built on the wrong pole branch") {
    const auto p = table1();
    const auto grid = default_filter_grid(p);
    FilterMatrix bad;
    bad.grid = grid;
    const double th = p.theta();
    for (double w : grid.values) {
        cd entry[2];
        for (int a = 0; a < 2; ++a) {
            const Arm arm = a == 0 ? Arm::A : Arm::B;
            const auto poles = filter_poles(p, arm, th);
            // Conjugated poles: both now in the upper half-plane.
            const cd P = (w - std::conj(poles.beta)) * (w - std::conj(poles.partner));
            const cd D = mech_denominator(p, w, p.omega_sn(arm) * p.omega_sn(arm));
            entry[a] = (P + D) / (p.Lambda * std::sin(th) * P);
        }
        bad.Kpp.push_back(0.5 * (entry[0] + entry[1]));
        bad.Kpm.push_back(0.5 * (entry[0] - entry[1]));
    }
    bad.Kmp = bad.Kpm;
    bad.Kmm = bad.Kpp;
    CHECK_FALSE(validate_causality(bad).passed);
}

TEST_CASE("causality check of a zero filter passes trivially") {
    const auto grid = FrequencyGrid::symmetric(1024, 10.0);
    FilterMatrix zero;
    zero.grid = grid;
    zero.Kpp = zero.Kpm = zero.Kmp = zero.Kmm = std::vector<cd>(grid.size());
    CHECK(validate_causality(zero).passed);
}

TEST_CASE("causality check needs an FFT grid") {
    CHECK_THROWS_AS(validate_causality(wiener_equal_angle(table1(), band())), DomainError);
}

TEST_CASE("Wiener-Hopf orthogonality of the solved filter") {
    // A low-Q variant so that an FFT grid resolves the mechanical line; the defect is limited by
    // the grid spacing, not by the solver, and falls below 1e-6 once dw << gamma_m.
    auto p = table1();
    p.Q_m = 20.0;
    p.omega_m = k::two_pi * 0.05;
    p.theta_plus = -0.3;
    p.theta_minus = -0.15;
    const auto grid = FrequencyGrid::symmetric(1 << 18, 50.0 * p.Lambda);
    const auto K = wiener_unequal_angles(p, grid);
    CHECK(orthogonality_defect(p, K, grid) < 1e-6);
    // A perturbed filter is no longer orthogonal.
    auto perturbed = K;
    perturbed.normalized = [f = K.normalized](cd w) {
        auto v = f(w);
        v[1] *= 1.05;
        return v;
    };
    CHECK(orthogonality_defect(p, perturbed, grid) > 1e-4);
}

TEST_CASE("rational spectra are Hermitian and positive on the real axis") {
    const auto p = table1();
    const auto rs = rational_spectra(p, p.Lambda);
    for (double s : {0.001, 0.006, 0.05, 1.0, 7.0}) {
        const cd dd = rs.DD(s);
        const cd Spp = rs.N[0][0](s) / std::norm(dd), Smm = rs.N[1][1](s) / std::norm(dd);
        const cd Spm = rs.N[0][1](s) / std::norm(dd), Smp = rs.N[1][0](s) / std::norm(dd);
        CHECK(Spp.real() > 0.0);
        CHECK(Smm.real() > 0.0);
        CHECK(std::abs(Spp.imag()) < 1e-10 * Spp.real());
        CHECK(std::abs(Spm - std::conj(Smp)) < 1e-10 * Spp.real());
        CHECK(Spp.real() * Smm.real() >= std::norm(Spm));
    }
}

}  // TEST_SUITE
