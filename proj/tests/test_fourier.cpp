#include <doctest.h>

#include <cmath>

#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"
#include "sngrav/fourier.hpp"

using namespace sngrav;

namespace {

const cd I(0.0, 1.0);

std::vector<cd> sample(const FrequencyGrid& g, cd (*f)(double)) {
    std::vector<cd> v(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) v[k] = f(g[k]);
    return v;
}

// Max |a - b| over |w| <= band, relative to max |b| there.
double band_error(const FrequencyGrid& g, const std::vector<cd>& a, cd (*b)(double), double band) {
    double err = 0.0, ref = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (std::abs(g[k]) > band) continue;
        err = std::max(err, std::abs(a[k] - b(g[k])));
        ref = std::max(ref, std::abs(b(g[k])));
    }
    return err / ref;
}

}  // namespace

TEST_SUITE("fourier") {

TEST_CASE("grid constructors") {
    const auto g = FrequencyGrid::symmetric(8, 4.0);
    CHECK(g.is_fft_ready());
    CHECK(g[4] == 0.0);
    CHECK(g[0] == -4.0);
    CHECK(time_step(g) == doctest::Approx(constants::two_pi / 8.0));
    CHECK_FALSE(FrequencyGrid::logarithmic(1.0, 10.0, 8).is_fft_ready());
    CHECK_FALSE(FrequencyGrid::linear(0.0, 1.0, 8).is_fft_ready());
    CHECK_THROWS_AS(FrequencyGrid::symmetric(7, 1.0), DomainError);
    CHECK_THROWS_AS(FrequencyGrid::from_values({1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(FrequencyGrid::logarithmic(0.0, 1.0, 4), DomainError);
}

TEST_CASE("transform pair of a causal exponential") {
    // f(t) = e^{-t} for t > 0 has f(w) = \int e^{-t} e^{iwt} dt = 1 / (1 - i w) = i / (w + i).
    // Truncating the 1/w tail at +-W rings like 1/(pi W t), so only t >= 0.5 is compared.
    const auto g = FrequencyGrid::symmetric(1 << 16, 4000.0);
    const auto ft = to_time(g, sample(g, [](double w) { return I / (w + I); }));
    const double dt = time_step(g);
    const std::size_t h = g.size() / 2;
    for (double t_target : {0.5, 1.0, 3.0}) {
        const auto m = static_cast<std::size_t>(std::llround(t_target / dt));
        const double t = static_cast<double>(m) * dt;
        CHECK(std::abs(ft[h + m] - std::exp(-t)) < 2e-3);
        CHECK(std::abs(ft[h - m]) < 2e-3);
    }
    const auto back = from_time(g, ft);
    CHECK(band_error(g, back, [](double w) { return I / (w + I); }, 4000.0) < 1e-12);
}

TEST_CASE("causal projection examples") {
    const auto g = FrequencyGrid::symmetric(1 << 16, 2000.0);
    SUBCASE("lower half-plane pole is kept") {
        const auto p = causal_project(g, sample(g, [](double w) { return 1.0 / (w + I); }));
        CHECK(band_error(g, p.values, [](double w) { return 1.0 / (w + I); }, 10.0) < 1e-3);
    }
    SUBCASE("upper half-plane pole is removed") {
        const auto p = causal_project(g, sample(g, [](double w) { return 1.0 / (w - I); }));
        double worst = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k)
            if (std::abs(g[k]) <= 10.0) worst = std::max(worst, std::abs(p.values[k]));
        CHECK(worst < 1e-3);
    }
    SUBCASE("partial fractions of 1/(w^2 + 1)") {
        const auto p = causal_project(g, sample(g, [](double w) { return cd(1.0 / (w * w + 1.0)); }));
        CHECK(band_error(g, p.values, [](double w) { return (0.5 * I) / (w + I); }, 10.0) < 1e-5);
        CHECK(p.edge_ratio < 1e-6);
    }
}

TEST_CASE("cepstral factorization of a constant") {
    const auto g = FrequencyGrid::symmetric(256, 10.0);
    const auto f = spectral_factorize(g, std::vector<double>(256, 4.0));
    for (std::size_t k = 0; k < 256; ++k) {
        CHECK(std::abs(f.phi_plus[k] - 2.0) < 1e-12);
        CHECK(std::abs(f.phi_minus[k] - 2.0) < 1e-12);
    }
    CHECK(f.residual < 1e-12);
}

TEST_CASE("cepstral factorization of (w^2 + 1)/(w^2 + 4)") {
    const auto g = FrequencyGrid::symmetric(1 << 14, 500.0);
    std::vector<double> S(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) S[k] = (g[k] * g[k] + 1.0) / (g[k] * g[k] + 4.0);
    const auto f = spectral_factorize(g, S);
    CHECK(f.residual < 1e-8);
    // Minimum-phase oracle: zeros and poles in the lower half-plane.
    auto oracle = [](double w) { return (w + I) / (w + 2.0 * I); };
    CHECK(band_error(g, f.phi_plus, oracle, 20.0) < 1e-3);
    for (std::size_t k = 0; k < g.size(); k += 97) CHECK(std::abs(f.phi_minus[k] - std::conj(f.phi_plus[k])) < 1e-12);
}

TEST_CASE("cepstral factorization rejects non-positive spectra") {
    const auto g = FrequencyGrid::symmetric(16, 1.0);
    std::vector<double> S(16, 1.0);
    S[3] = 0.0;
    CHECK_THROWS_AS(spectral_factorize(g, S), DomainError);
    CHECK_THROWS_AS(spectral_factorize(FrequencyGrid::linear(0.1, 1.0, 16), std::vector<double>(16, 1.0)), DomainError);
}

TEST_CASE("rational factorization by root assignment") {
    const Poly num{1.0, 0.0, 1.0}, den{4.0, 0.0, 1.0};
    const auto f = spectral_factorize(num, den);
    for (double w : {-7.0, -0.3, 0.0, 1.0, 12.0}) {
        CHECK(std::norm(f(w)) == doctest::Approx((w * w + 1.0) / (w * w + 4.0)).epsilon(1e-12));
        CHECK(std::abs(f(w) / ((w + I) / (w + 2.0 * I))) == doctest::Approx(1.0).epsilon(1e-12));
    }
    for (cd z : f.num.roots) CHECK(z.imag() < 0.0);
    for (cd z : f.den.roots) CHECK(z.imag() < 0.0);
}

}  // TEST_SUITE
