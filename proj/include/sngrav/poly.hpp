#pragma once

#include <complex>
#include <vector>

namespace sngrav {

using cd = std::complex<double>;

// Dense complex polynomial, coefficients stored lowest degree first.
class Poly {
public:
    Poly() = default;
    explicit Poly(std::vector<cd> coeffs) : c_(std::move(coeffs)) { trim(); }
    Poly(std::initializer_list<cd> coeffs) : c_(coeffs) { trim(); }
    static Poly constant(cd v) { return Poly({v}); }
    // lead * prod (z - r_k)
    static Poly from_roots(const std::vector<cd>& roots, cd lead = 1.0);

    int degree() const { return c_.empty() ? -1 : static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    const std::vector<cd>& coeffs() const { return c_; }
    cd operator[](std::size_t k) const { return k < c_.size() ? c_[k] : cd{}; }
    cd lead() const { return c_.empty() ? cd{} : c_.back(); }

    cd operator()(cd z) const;
    Poly derivative() const;
    // Polynomial whose value at z is conj(p(conj z)); on the real axis it is the complex conjugate.
    Poly reflected() const;
    // Largest coefficient magnitude.
    double norm_inf() const;

    Poly& operator+=(const Poly& o);
    Poly& operator-=(const Poly& o);
    Poly& operator*=(cd s);
    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(const Poly& a, const Poly& b);
    friend Poly operator*(Poly a, cd s) { return a *= s; }
    friend Poly operator*(cd s, Poly a) { return a *= s; }

    // Euclidean division: *this = q * d + r with deg r < deg d.
    void divmod(const Poly& d, Poly& q, Poly& r) const;

private:
    void trim();
    std::vector<cd> c_;
};

// All complex roots via the companion-matrix eigenvalues, each refined by Newton steps
// on the original polynomial.
std::vector<cd> roots(const Poly& p);

// A polynomial held in factored form, lead * prod (z - roots_k). Evaluating the factors
// directly avoids the cancellation that the expanded coefficients suffer near clustered roots.
struct Factored {
    cd lead = 1.0;
    std::vector<cd> roots;

    cd operator()(cd z) const;
    // Same product with factor `skip` omitted; at z = roots[skip] this is the derivative.
    cd without(cd z, std::size_t skip) const;
    // Factors conjugated: value at z equals conj(this(conj z)).
    Factored reflected() const;
};

// Splits the roots of a polynomial that is real and non-negative on the real axis into its
// lower half-plane factor. Returns h with |h(w)|^2 = p(w) on the real line, all zeros of h
// strictly below the axis. Throws DomainError if a root sits on the real axis or the roots do
// not pair up across it.
Factored lower_half_plane_factor(const Poly& p);

// Integral over the real line of num(w) / prod_k (w - poles_k) by residues in the upper
// half-plane. Poles must be simple and off the real axis, and deg num <= #poles - 2.
cd integrate_rational_real_line(const Poly& num, const std::vector<cd>& poles);

}  // namespace sngrav
