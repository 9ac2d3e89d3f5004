#include "sngrav/poly.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"

namespace sngrav {

void Poly::trim() {
    while (!c_.empty() && c_.back() == cd{}) c_.pop_back();
}

Poly Poly::from_roots(const std::vector<cd>& rts, cd lead) {
    std::vector<cd> c{lead};
    for (cd r : rts) {
        std::vector<cd> next(c.size() + 1);
        for (std::size_t k = 0; k < c.size(); ++k) {
            next[k + 1] += c[k];
            next[k] -= r * c[k];
        }
        c = std::move(next);
    }
    return Poly(std::move(c));
}

cd Poly::operator()(cd z) const {
    cd acc{};
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * z + *it;
    return acc;
}

Poly Poly::derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<cd> d(c_.size() - 1);
    for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<double>(k);
    return Poly(std::move(d));
}

Poly Poly::reflected() const {
    std::vector<cd> r(c_.size());
    std::transform(c_.begin(), c_.end(), r.begin(), [](cd v) { return std::conj(v); });
    return Poly(std::move(r));
}

double Poly::norm_inf() const {
    double m = 0.0;
    for (cd v : c_) m = std::max(m, std::abs(v));
    return m;
}

Poly& Poly::operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
    trim();
    return *this;
}

Poly& Poly::operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
    for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
    trim();
    return *this;
}

Poly& Poly::operator*=(cd s) {
    for (cd& v : c_) v *= s;
    trim();
    return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<cd> c(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
        for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Poly(std::move(c));
}

void Poly::divmod(const Poly& d, Poly& q, Poly& r) const {
    if (d.is_zero()) throw DomainError("polynomial division by zero");
    std::vector<cd> rem = c_;
    const int n = degree(), m = d.degree();
    if (n < m) {
        q = {};
        r = *this;
        return;
    }
    std::vector<cd> quo(static_cast<std::size_t>(n - m + 1));
    for (int k = n - m; k >= 0; --k) {
        const cd t = rem[static_cast<std::size_t>(k + m)] / d.lead();
        quo[static_cast<std::size_t>(k)] = t;
        for (int j = 0; j <= m; ++j) rem[static_cast<std::size_t>(k + j)] -= t * d[static_cast<std::size_t>(j)];
    }
    rem.resize(static_cast<std::size_t>(m));
    q = Poly(std::move(quo));
    r = Poly(std::move(rem));
}

std::vector<cd> roots(const Poly& p) {
    const int n = p.degree();
    if (n < 1) return {};
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(n, n);
    for (int k = 0; k < n; ++k) companion(0, k) = -p[static_cast<std::size_t>(n - 1 - k)] / p.lead();
    for (int k = 1; k < n; ++k) companion(k, k - 1) = 1.0;
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(companion, false);
    const Poly dp = p.derivative();
    std::vector<cd> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        cd z = es.eigenvalues()[k];
        // Newton refinement, accepted only while it reduces the residual.
        for (int it = 0; it < 5; ++it) {
            const cd f = p(z), fp = dp(z);
            if (fp == cd{}) break;
            const cd z1 = z - f / fp;
            if (!(std::abs(p(z1)) < std::abs(f))) break;
            z = z1;
        }
        out[static_cast<std::size_t>(k)] = z;
    }
    return out;
}

cd Factored::operator()(cd z) const {
    cd v = lead;
    for (cd r : roots) v *= (z - r);
    return v;
}

cd Factored::without(cd z, std::size_t skip) const {
    cd v = lead;
    for (std::size_t k = 0; k < roots.size(); ++k)
        if (k != skip) v *= (z - roots[k]);
    return v;
}

Factored Factored::reflected() const {
    Factored f{std::conj(lead), {}};
    for (cd r : roots) f.roots.push_back(std::conj(r));
    return f;
}

Factored lower_half_plane_factor(const Poly& p) {
    if (p.degree() < 0) throw DomainError("cannot factor the zero polynomial");
    const double lead = p.lead().real();
    if (!(lead > 0.0) || std::abs(p.lead().imag()) > 1e-9 * std::abs(lead))
        throw DomainError("spectral polynomial must have a positive real leading coefficient");
    Factored h{std::sqrt(lead), {}};
    const auto rts = roots(p);
    double scale = 0.0;
    for (cd r : rts) scale = std::max(scale, std::abs(r));
    for (cd r : rts) {
        if (std::abs(r.imag()) <= 1e-13 * std::max(scale, 1.0))
            throw DomainError("spectral polynomial has a zero on the real axis");
        if (r.imag() < 0.0) h.roots.push_back(r);
    }
    if (2 * h.roots.size() != rts.size()) throw DomainError("spectral polynomial roots do not pair across the real axis");
    return h;
}

cd integrate_rational_real_line(const Poly& num, const std::vector<cd>& poles) {
    if (num.degree() > static_cast<int>(poles.size()) - 2)
        throw DomainError("rational integrand does not decay fast enough for the real-line integral");
    cd acc{};
    for (std::size_t k = 0; k < poles.size(); ++k) {
        const cd pk = poles[k];
        if (pk.imag() == 0.0) throw DomainError("pole on the real axis");
        if (pk.imag() < 0.0) continue;
        cd den = 1.0;
        for (std::size_t j = 0; j < poles.size(); ++j)
            if (j != k) den *= (pk - poles[j]);
        acc += num(pk) / den;
    }
    return cd(0.0, constants::two_pi) * acc;
}

}  // namespace sngrav
