#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"
#include "sngrav/poly.hpp"

using namespace sngrav;

namespace {

// Distance from z to the nearest element of v.
double nearest(const std::vector<cd>& v, cd z) {
    double best = 1e300;
    for (cd x : v) best = std::min(best, std::abs(x - z));
    return best;
}

}  // namespace

TEST_SUITE("poly") {

TEST_CASE("evaluation, product and derivative") {
    const Poly p{1.0, -3.0, 2.0};  // 2z^2 - 3z + 1
    CHECK(p.degree() == 2);
    CHECK(std::abs(p(2.0) - cd(3.0)) < 1e-15);
    CHECK(std::abs(p.derivative()(1.0) - cd(1.0)) < 1e-15);
    const Poly q = p * Poly{0.0, 1.0};
    CHECK(q.degree() == 3);
    CHECK(std::abs(q(cd(0.5, 1.0)) - cd(0.5, 1.0) * p(cd(0.5, 1.0))) < 1e-14);
    CHECK((p - p).is_zero());
}

TEST_CASE("reflected polynomial conjugates values on the real axis") {
    const Poly p{cd(1.0, 2.0), cd(0.0, -1.0), cd(3.0, 0.5)};
    for (double x : {-2.0, 0.0, 0.7}) CHECK(std::abs(p.reflected()(x) - std::conj(p(x))) < 1e-14);
}

TEST_CASE("roots of a polynomial built from known roots") {
    const std::vector<cd> r = {cd(1.0, -0.5), cd(-2.0, 0.0), cd(0.0, 3.0), cd(0.25, -0.001)};
    const Poly p = Poly::from_roots(r, cd(2.0, 1.0));
    CHECK(std::abs(p.lead() - cd(2.0, 1.0)) < 1e-15);
    const auto found = roots(p);
    REQUIRE(found.size() == r.size());
    for (cd z : r) CHECK(nearest(found, z) < 1e-12);
}

TEST_CASE("Euclidean division") {
    const Poly a{1.0, 2.0, 3.0, 4.0, 5.0};
    const Poly d{cd(1.0, 1.0), 0.0, 1.0};
    Poly q, rem;
    a.divmod(d, q, rem);
    CHECK(rem.degree() < d.degree());
    const Poly back = q * d + rem;
    for (std::size_t k = 0; k < 5; ++k) CHECK(std::abs(back[k] - a[k]) < 1e-13);
}

TEST_CASE("factored form matches the expanded form") {
    Factored f{cd(3.0), {cd(1.0, -1.0), cd(-1.0, -1.0), cd(0.0, -2.0)}};
    const Poly p = Poly::from_roots(f.roots, f.lead);
    for (cd z : {cd(0.3, 0.2), cd(-4.0), cd(0.0, 5.0)}) CHECK(std::abs(f(z) - p(z)) < 1e-12 * std::abs(p(z)));
    CHECK(std::abs(f.without(f.roots[0], 0) - p.derivative()(f.roots[0])) < 1e-12);
    CHECK(std::abs(f.reflected()(cd(0.5, 0.5)) - std::conj(f(cd(0.5, -0.5)))) < 1e-12);
}

TEST_CASE("lower half-plane factor of w^4 + 5 w^2 + 4") {
    // (w^2 + 1)(w^2 + 4): the factor has zeros at -i and -2i.
    const Poly p{4.0, 0.0, 5.0, 0.0, 1.0};
    const auto h = lower_half_plane_factor(p);
    REQUIRE(h.roots.size() == 2);
    CHECK(nearest(h.roots, cd(0.0, -1.0)) < 1e-12);
    CHECK(nearest(h.roots, cd(0.0, -2.0)) < 1e-12);
    for (double w : {0.0, 0.5, -3.0, 10.0}) CHECK(std::norm(h(w)) == doctest::Approx(p(w).real()).epsilon(1e-12));
}

TEST_CASE("lower half-plane factor rejects real-axis zeros") {
    CHECK_THROWS_AS(lower_half_plane_factor(Poly{-1.0, 0.0, 1.0}), DomainError);
}

TEST_CASE("rational integrals over the real line by residues") {
    const double pi = constants::pi;
    // \int dw / (w^2 + 1) = pi
    CHECK(std::abs(integrate_rational_real_line(Poly{1.0}, {cd(0, 1), cd(0, -1)}) - cd(pi)) < 1e-13);
    // \int dw / ((w^2 + 1)(w^2 + 4)) = pi / 6
    CHECK(std::abs(integrate_rational_real_line(Poly{1.0}, {cd(0, 1), cd(0, -1), cd(0, 2), cd(0, -2)}) - cd(pi / 6)) <
          1e-13);
    // \int w^2 dw / ((w^2 + 1)(w^2 + 4)) = pi / 3
    CHECK(std::abs(integrate_rational_real_line(Poly{0.0, 0.0, 1.0}, {cd(0, 1), cd(0, -1), cd(0, 2), cd(0, -2)}) -
                   cd(pi / 3)) < 1e-13);
}

}  // TEST_SUITE
