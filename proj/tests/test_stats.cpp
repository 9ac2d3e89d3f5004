#include <doctest.h>

#include <cmath>
#include <limits>

#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"
#include "sngrav/stats.hpp"

using namespace sngrav;
namespace k = sngrav::constants;

namespace {

SystemParams qrpn_only() {
    auto p = table1();
    p.temperature = 0.0;
    p.prescription = Prescription::QrpnOnly;
    return p;
}

}  // namespace

TEST_SUITE("stats") {

TEST_CASE("indicator mean: reference value and vanishing cases") {
    auto p = table1();
    // 2 T dw^2 Lambda^2 zeta sin(theta) evaluated independently. Mirror A is the lighter-SN mirror, so
    // dw^2 < 0 and the product with sin(theta) < 0 is positive.
    CHECK(indicator_mean(p, 1e4) == doctest::Approx(255246.51909686017).epsilon(1e-12));
    CHECK(indicator_mean(p, 1e4) > 0.0);
    CHECK(indicator_mean(p, 2e4) == doctest::Approx(2.0 * indicator_mean(p, 1e4)).epsilon(1e-14));
    p.theta_plus = p.theta_minus = 0.14;
    CHECK(indicator_mean(p, 1e4) == 0.0);
    p = table1();
    p.omega_snB = p.omega_snA;
    CHECK(indicator_mean(p, 1e4) == 0.0);
    p = table1();
    p.theta_plus = -0.2;
    CHECK_THROWS_AS(indicator_mean(p, 1e4), DomainError);
}

TEST_CASE("indicator mean from the exact spectra is frequency independent") {
    const auto p = table1();
    const double ref = indicator_mean_spectral(p, 1e4, 1e-4);
    for (double w : {1e-3, 0.01, p.omega_m, 0.1, 0.5}) CHECK(indicator_mean_spectral(p, 1e4, w) == doctest::Approx(ref).epsilon(1e-9));
    // The small-angle closed form sits within a few percent of it.
    CHECK(indicator_mean(p, 1e4) == doctest::Approx(ref).epsilon(0.06));
}

TEST_CASE("QRPN-only flat variance and T^2 scaling") {
    const auto p = qrpn_only();
    const double s = std::sin(p.theta()), zeta = std::exp(2.0 * p.squeeze.r);
    CHECK(indicator_variance_flat(p, 1e4) ==
          doctest::Approx(1e8 * std::pow(s, 4) * std::pow(p.Lambda, 8) * zeta * zeta).epsilon(1e-12));
    for (double w : {1e-3, p.omega_m, 0.5})
        CHECK(indicator_variance(p, 2e4, w) == doctest::Approx(4.0 * indicator_variance(p, 1e4, w)).epsilon(1e-14));
    CHECK(indicator_variance(p, 1e4, 0.1, 1.0) == doctest::Approx(2.0 * indicator_variance(p, 1e4, 0.1)).epsilon(1e-14));
}

TEST_CASE("classical-thermal flat variance matches its closed form") {
    const auto p = table1();
    const double s = std::sin(p.theta()), zeta = std::exp(2.0 * p.squeeze.r), L = p.Lambda;
    const double thermal = p.gamma_m() * k::k_B * p.temperature / k::hbar;
    const double inner = s * s * std::pow(L, 4) * zeta + 4.0 * s * s * L * L * thermal;
    CHECK(indicator_variance_flat(p, 1e4, 0.5) == doctest::Approx(1e8 * 1.5 * inner * inner).epsilon(1e-12));
}

TEST_CASE("exact variance stays within the bandwidth rule below Gamma") {
    // Gamma is where the rising part reaches a tenth of the flat part, so the exact integrand grows
    // by at most 10% up to Gamma, and by about a quarter of that at Gamma/2 (quadratic onset).
    const auto p = table1();
    const double G = observation_bandwidth(p), v0 = indicator_variance(p, 1e4, 1e-6 * G);
    CHECK(indicator_variance(p, 1e4, G) / v0 == doctest::Approx(1.1).epsilon(1e-6));
    for (double f : {0.1, 0.25, 0.5}) CHECK(indicator_variance(p, 1e4, f * G) / v0 <= 1.0 + 0.1 * f * f * 1.01);
    // The closed-form flat value is leading order in omega_q / Lambda and lands within 3% here.
    CHECK(indicator_variance_flat(p, 1e4) == doctest::Approx(v0).epsilon(0.03));
}

TEST_CASE("flat-band variance within 2% of the exact value up to Gamma/2" * doctest::should_fail()) {
    // Known miss at the reference point: the deviation reaches 2.7% at low frequency (closed form vs
    // exact) and 2.3% at Gamma/2 (exact vs its own zero-frequency value).
    const auto p = table1();
    const double G = observation_bandwidth(p), flat = indicator_variance_flat(p, 1e4);
    for (double f : {1e-3, 0.1, 0.25, 0.5}) CHECK(indicator_variance(p, 1e4, f * G) == doctest::Approx(flat).epsilon(0.02));
}

TEST_CASE("observation bandwidth trends") {
    auto p = table1();
    const double G = observation_bandwidth(p);
    CHECK(G / k::two_pi == doctest::Approx(0.1381).epsilon(1e-3));
    double prev = 0.0;
    for (double L : {0.5, 1.0, 2.0, 4.0}) {
        p.Lambda = k::two_pi * L;
        const double g = observation_bandwidth(p);
        CHECK(g > prev);
        prev = g;
    }
    // The flat part grows with temperature while the rising part does not, so the crossing moves up.
    p = table1();
    prev = 0.0;
    for (double T : {0.1, 0.5, 1.0, 2.0, 4.0}) {
        p.temperature = T;
        const double g = observation_bandwidth(p);
        CHECK(g > prev);
        prev = g;
    }
}

TEST_CASE("measurement time at the reference point") {
    const auto plan = measurement_time(table1(), 1.0);
    CHECK_FALSE(plan.unbounded);
    CHECK(plan.duration_T >= 1e3);
    CHECK(plan.duration_T <= 1e5);
    CHECK(plan.bins_N == doctest::Approx(plan.bandwidth_gamma * plan.duration_T / k::two_pi).epsilon(1e-14));
    CHECK(plan.bins_N >= 1.0);
    CHECK(plan.duration_approx / plan.duration_T == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(plan.duration_spectral > 0.0);
}

TEST_CASE("measurement time scales as SNR^2 and (1 + kappa)") {
    for (auto pr : {Prescription::ClassicalThermal, Prescription::QuantumThermal}) {
        auto p = table1();
        p.prescription = pr;
        const auto one = measurement_time(p, 1.0);
        const auto three = measurement_time(p, 3.0, one.bandwidth_gamma);
        CHECK(three.duration_T == doctest::Approx(9.0 * one.duration_T).epsilon(1e-14));
        const auto noisy = measurement_time(p, 1.0, one.bandwidth_gamma, 1.0);
        CHECK(noisy.duration_T == doctest::Approx(2.0 * one.duration_T).epsilon(1e-14));
    }
}

TEST_CASE("QRPN-only time is the zero-temperature classical time") {
    auto p = table1();
    p.temperature = 0.0;
    for (double G : {0.1, 0.87, 3.0}) {
        CHECK(measurement_time_qrpn(p, 1.0, G) == doctest::Approx(measurement_time_classical(p, 1.0, G)).epsilon(1e-14));
        CHECK(measurement_time_quantum(p, 1.0, G) == doctest::Approx(measurement_time_classical(p, 1.0, G)).epsilon(0.1));
    }
}

TEST_CASE("compact approximation is twice the classical time") {
    for (double L : {0.5, 1.0, 3.0}) {
        for (double T : {0.1, 1.0, 10.0}) {
            for (double snr : {1.0, 5.0}) {
                auto p = table1();
                p.Lambda = k::two_pi * L;
                p.temperature = T;
                CHECK(measurement_time_approx(p, snr, 0.5) / measurement_time_classical(p, snr, 0.5) ==
                      doctest::Approx(2.0).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("measurement time is unbounded without an SN signal") {
    auto p = table1();
    p.omega_snB = p.omega_snA;
    auto plan = measurement_time(p, 1.0, 0.5);
    CHECK(plan.unbounded);
    CHECK(std::isinf(plan.duration_T));
    p = table1();
    p.theta_plus = p.theta_minus = 0.14;
    CHECK(measurement_time(p, 1.0, 0.5).unbounded);
    CHECK_THROWS_AS(measurement_time(table1(), 0.0), DomainError);
}

TEST_CASE("empirical statistic aggregation") {
    MeasurementPlan plan;
    const BinStatistic one{0.2, {3.0, 0.0}, 4.0};
    const auto single = empirical_statistic({one}, plan);
    CHECK(single.bins == 1);
    CHECK(single.chi_N_mean == cd(3.0, 0.0));
    CHECK(single.chi_N_var == 4.0);
    CHECK(single.snr == doctest::Approx(1.5));

    std::vector<BinStatistic> many(8, one);
    const auto eight = empirical_statistic(many, plan);
    many.resize(16, one);
    const auto sixteen = empirical_statistic(many, plan);
    CHECK(sixteen.chi_N_var == doctest::Approx(0.5 * eight.chi_N_var).epsilon(1e-15));
    CHECK(sixteen.snr == doctest::Approx(std::sqrt(2.0) * eight.snr).epsilon(1e-14));
}

TEST_CASE("exclusion window removes the resonance bins") {
    const auto p = table1();
    const auto window = exclusion_window(p);
    CHECK(window.first == doctest::Approx(0.5 * p.omega_m));
    CHECK(window.second == doctest::Approx(1.5 * p.omega_m));
    MeasurementPlan plan;
    plan.exclusion_window = window;
    const std::vector<BinStatistic> bins{{0.1 * p.omega_m, 1.0, 1.0}, {p.omega_m, 100.0, 1.0}, {2.0 * p.omega_m, 1.0, 1.0}};
    CHECK(empirical_statistic(bins, plan).bins == 2);
    CHECK(empirical_statistic(bins, plan).chi_N_mean == cd(1.0));
    CHECK_THROWS_AS(empirical_statistic({{p.omega_m, 1.0, 1.0}}, plan), DomainError);
    CHECK_THROWS_AS(empirical_statistic({}, MeasurementPlan{}), DomainError);
}

TEST_CASE("predicted bins reproduce the flat-band SNR") {
    const auto p = table1();
    const auto plan = measurement_time(p, 1.0);
    const auto stat = empirical_statistic(predicted_bins(p, plan.duration_T, plan.bandwidth_gamma), plan);
    CHECK(stat.bins == static_cast<std::size_t>(std::floor(plan.bins_N)));
    // Exact per-bin spectra vs leading-order closed forms: agreement to the few-percent level.
    CHECK(stat.snr == doctest::Approx(1.0).epsilon(0.1));
    CHECK_THROWS_AS(predicted_bins(p, 1.0, 1e-3), DomainError);
}

TEST_CASE("imperfection tolerances at the reference point") {
    const auto t = imperfection_tolerances(table1());
    CHECK(t.d_eps_omega_m == doctest::Approx(0.84e-2).epsilon(0.02));
    CHECK(t.d_eps_Q == doctest::Approx(3.35e-2).epsilon(0.02));
    CHECK(t.d_eps_M == doctest::Approx(1.68e-2).epsilon(0.02));
    CHECK(t.d_eps_gamma == doctest::Approx(6.70e-2).epsilon(0.02));
    CHECK(t.delta_BS == doctest::Approx(0.84e-2).epsilon(0.02));
    // Independent evaluation of |dw^2| zeta / (4 |sin theta| gamma_m k_B T / hbar).
    CHECK(t.d_eps_omega_m == doctest::Approx(0.008409206922638635).epsilon(1e-12));
    CHECK(t.d_eps_gamma == doctest::Approx(0.06727365538110908).epsilon(1e-12));
}

TEST_CASE("tolerances scale as zeta / T") {
    auto p = table1();
    const auto ref = imperfection_tolerances(p);
    p.temperature = 2.0;
    CHECK(imperfection_tolerances(p).d_eps_Q == doctest::Approx(0.5 * ref.d_eps_Q).epsilon(1e-14));
    p = table1();
    p.squeeze.r += 0.5 * std::log(10.0);
    CHECK(imperfection_tolerances(p).d_eps_M == doctest::Approx(10.0 * ref.d_eps_M).epsilon(1e-12));
    p = table1();
    p.theta_plus = p.theta_minus = 0.14;
    CHECK(imperfection_tolerances(p).delta_BS == doctest::Approx(ref.delta_BS).epsilon(1e-14));
    p.temperature = 0.0;
    CHECK(std::isinf(imperfection_tolerances(p).d_eps_omega_m));
}

TEST_CASE("mismatch spectrum: zero mismatch and sign change across resonance") {
    const auto p = table1();
    const auto g = FrequencyGrid::from_values({0.5 * p.omega_m, 0.9 * p.omega_m, 1.1 * p.omega_m, 2.0 * p.omega_m});
    const auto none = mismatch_cross_spectrum(p, MismatchSet{}, g);
    for (cd v : none.total) CHECK(v == cd(0.0));
    CHECK(none.warnings.empty());
    MismatchSet m;
    m.d_eps_omega_m = 1e-3;
    const auto s = mismatch_cross_spectrum(p, m, g);
    CHECK(s.total[0].real() * s.total[3].real() < 0.0);
    CHECK(s.total[1].real() * s.total[2].real() < 0.0);
}

TEST_CASE("mismatch contributions are additive") {
    const auto p = table1();
    const auto g = FrequencyGrid::from_values({0.01, 0.1, 0.5});
    MismatchSet a, b, both;
    a.d_eps_Q = 0.01;
    b.d_eps_gamma = 0.02;
    b.delta_BS = 0.003;
    both = b;
    both.d_eps_Q = a.d_eps_Q;
    const auto sa = mismatch_cross_spectrum(p, a, g), sb = mismatch_cross_spectrum(p, b, g), sab = mismatch_cross_spectrum(p, both, g);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(sab.total[k] - sa.total[k] - sb.total[k]) <= 1e-12 * std::abs(sab.total[k]));
}

TEST_CASE("Q mismatch at its bound rivals the SN cross spectrum") {
    const auto p = table1();
    const double G = observation_bandwidth(p);
    MismatchSet m;
    m.d_eps_Q = imperfection_tolerances(p).d_eps_Q;
    const auto g = FrequencyGrid::from_values({0.5 * G, G});
    const auto mis = mismatch_cross_spectrum(p, m, g);
    const auto sn = output_spectra(p, g);
    for (std::size_t k = 0; k < g.size(); ++k) CHECK(std::abs(mis.total[k]) == doctest::Approx(std::abs(sn.Spm[k])).epsilon(0.2));
}

TEST_CASE("large mismatches produce a warning") {
    MismatchSet m;
    m.d_eps_M = 0.4;
    const auto s = mismatch_cross_spectrum(table1(), m, FrequencyGrid::from_values({0.1}));
    REQUIRE(s.warnings.size() == 1);
    CHECK(s.warnings[0].find("d_eps_M") != std::string::npos);
}

}  // TEST_SUITE
