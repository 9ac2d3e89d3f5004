// Multichannel Wiener-Hopf solve on exact rational spectra.
//
// Everything is a polynomial in s = w / W0 with W0 = Lambda. For output row `row` the data are
// reordered as (y_a, y_b) with a = row, b = 1 - row. Factoring the 2x2 data spectrum as
// Phi_+ Phi_+^dagger with Phi_+ lower-triangular gives the diagonal factor phi_N (from N_aa) and
// the Schur-complement factor delta_Q. The off-diagonal filter entry K2 = U / delta_Q has simple
// poles only at the zeros of delta_Q, and U / phi_N has simple poles at the zeros p_k of phi_N,
// so K2 is fixed by the residues r_k. Those residues satisfy r = b1 + T(r) where T is linear;
// the loop below iterates it with under-relaxation.
#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>

#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"
#include "sngrav/response.hpp"
#include "sngrav/wiener.hpp"

namespace sngrav {

namespace {

constexpr int kInputs = 6;  // a1+, a2+, a1-, a2-, f+, f-
using Row = std::array<Poly, kInputs>;

}  // namespace

RationalSpectra rational_spectra(const SystemParams& p, double w_scale) {
    if (!(w_scale > 0.0)) throw DomainError("rational_spectra: frequency scale must be positive");
    const double W0 = w_scale, L = p.Lambda, g = p.gamma_m();
    const double wa2 = p.omega_snA * p.omega_snA, wb2 = p.omega_snB * p.omega_snB;
    const Poly Dm{p.omega_m * p.omega_m, cd(0.0, -g * W0), -W0 * W0};
    const Poly Dq = Dm + Poly::constant(p.omega_sn2_mean());
    const Poly DA = Dm + Poly::constant(wa2), DB = Dm + Poly::constant(wb2);
    const Poly DD = DA * DB;
    // adjugate of diag(D_q) - (delta omega^2 / 2) offdiag, the inverse of the coupled response times DD
    const Poly off = Poly::constant(-0.5 * p.delta_omega2());
    const std::array<std::array<Poly, 2>, 2> adj{{{Dq, off}, {off, Dq}}};
    const std::array<double, 2> st{std::sin(p.theta_plus), std::sin(p.theta_minus)};
    const std::array<double, 2> ct{std::cos(p.theta_plus), std::cos(p.theta_minus)};

    std::array<Row, 2> Tx, Tz;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            Tx[i][2 * j] += adj[i][j] * cd(L);
            Tx[i][4 + j] += adj[i][j];
            Tz[i][2 * j] += adj[i][j] * cd(L * L * st[i]);
            Tz[i][4 + j] += adj[i][j] * cd(L * st[i]);
        }
        Tz[i][2 * i] += DD * cd(ct[i]);
        Tz[i][2 * i + 1] += DD * cd(st[i]);
    }

    const auto cov = input_covariance(p.squeeze);
    std::array<std::array<double, kInputs>, kInputs> sig{};
    for (int j = 0; j < 2; ++j) {
        sig[2 * j][2 * j] = cov.zeta;
        sig[2 * j + 1][2 * j + 1] = cov.eta;
        sig[2 * j][2 * j + 1] = sig[2 * j + 1][2 * j] = cov.cross;
        sig[4 + j][4 + j] = quantum_white_force_psd(p);
    }
    auto cross = [&sig](const std::array<Row, 2>& A, const std::array<Row, 2>& B) {
        std::array<std::array<Poly, 2>, 2> out;
        for (int i = 0; i < 2; ++i)
            for (int k = 0; k < 2; ++k)
                for (int a = 0; a < kInputs; ++a)
                    for (int b = 0; b < kInputs; ++b)
                        if (sig[a][b] != 0.0) out[i][k] += (A[i][a] * B[k][b].reflected()) * cd(sig[a][b]);
        return out;
    };

    RationalSpectra rs;
    rs.w_scale = W0;
    rs.Tx = Tx;
    rs.Tz = Tz;
    rs.sigma = sig;
    rs.N = cross(Tz, Tz);
    rs.X = cross(Tx, Tz);
    // D_I(s) = -W0^2 (s - s1)(s - s2), roots known in closed form.
    rs.DD.lead = W0 * W0 * W0 * W0;
    for (double ws2 : {wa2, wb2}) {
        const cd half_width(0.0, -0.5 * g);
        const cd split = std::sqrt(cd(p.omega_m * p.omega_m + ws2 - 0.25 * g * g));
        rs.DD.roots.push_back((half_width + split) / W0);
        rs.DD.roots.push_back((half_width - split) / W0);
    }
    return rs;
}

namespace {

// State for one output row; kept alive by the returned FilterMatrix's evaluator.
struct RowSolution {
    Factored phiN, phiNb, dQ, DD;
    Poly X1, N21;
    std::vector<cd> r;

    cd u_times_phi(cd s) const {
        cd acc{};
        for (std::size_t k = 0; k < r.size(); ++k) acc += r[k] * phiN.without(s, k);
        return acc;
    }
    cd K2(cd s) const { return u_times_phi(s) / dQ(s); }
    // Causal part of gnum / (DD phiNb dQ), taken as the whole function minus its principal parts at
    // the (simple) upper half-plane roots of phiNb. Summing lower half-plane residues instead would
    // break down when D_A = D_B makes the roots of DD double.
    cd K1(cd s) const {
        auto gnum = [this](cd z) { return X1(z) * dQ(z) - u_times_phi(z) * N21(z); };
        cd anti{};
        for (std::size_t j = 0; j < phiNb.roots.size(); ++j) {
            const cd q = phiNb.roots[j];
            anti += gnum(q) / (DD(q) * phiNb.without(q, j) * dQ(q)) / (s - q);
        }
        return gnum(s) / (phiN(s) * phiNb(s) * dQ(s)) - DD(s) * anti / phiN(s);
    }
};

double l2(const std::vector<cd>& v) {
    double a = 0.0;
    for (cd x : v) a += std::norm(x);
    return std::sqrt(a);
}

std::vector<cd> add_scaled(const std::vector<cd>& a, cd sa, const std::vector<cd>& b, cd sb) {
    std::vector<cd> out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = sa * a[k] + sb * b[k];
    return out;
}

std::shared_ptr<RowSolution> solve_row(const RationalSpectra& rs, int row, const SolverOptions& opt,
                                       const std::function<cd(cd)>& warm, SolverRowInfo& info) {
    const int a = row, b = 1 - row;
    const Poly &N11 = rs.N[a][a], &N12 = rs.N[a][b], &N21 = rs.N[b][a], &N22 = rs.N[b][b];
    const Poly &X1 = rs.X[row][a], &X2 = rs.X[row][b];

    auto sol = std::make_shared<RowSolution>();
    sol->DD = rs.DD;
    sol->X1 = X1;
    sol->N21 = N21;
    sol->phiN = lower_half_plane_factor(N11);
    sol->phiNb = sol->phiN.reflected();

    const Poly DDp = Poly::from_roots(rs.DD.roots, rs.DD.lead);
    const Poly det = N11 * N22 - N12 * N21;
    Poly Q, rem;
    det.divmod(DDp * DDp.reflected(), Q, rem);
    if (rem.norm_inf() > 1e-6 * det.norm_inf())
        throw ConvergenceError("wiener_unequal_angles: data-spectrum determinant is not divisible by |D_A D_B|^2 "
                               "(relative remainder " + std::to_string(rem.norm_inf() / det.norm_inf()) + ")",
                               {});
    sol->dQ = lower_half_plane_factor(Q);
    const Factored dQb = sol->dQ.reflected(), DDb = rs.DD.reflected();
    const auto& pz = sol->phiN.roots;
    const std::vector<cd>& qz = sol->phiNb.roots;
    const std::size_t m = pz.size();

    std::vector<cd> b1(m), n12p(m);
    for (std::size_t k = 0; k < m; ++k) {
        const cd pk = pz[k];
        const cd base = DDb(pk) * sol->phiN.without(pk, k) * dQb(pk);
        b1[k] = (X2(pk) * N11(pk) - X1(pk) * N12(pk)) / (rs.DD(pk) * base);
        n12p[k] = N12(pk) * sol->phiNb(pk) / base;
    }
    std::vector<cd> x1q(m), n21q(m), qden(m);
    for (std::size_t j = 0; j < m; ++j) {
        x1q[j] = X1(qz[j]);
        n21q[j] = N21(qz[j]);
        qden[j] = rs.DD(qz[j]) * sol->phiNb.without(qz[j], j);
    }
    // r -> b1 + T(K2 at q); K2 at q is what the anticausal residues of the error spectrum need.
    auto fmap_from_k2 = [&](const std::vector<cd>& k2q) {
        std::vector<cd> gres(m), out(m);
        for (std::size_t j = 0; j < m; ++j) gres[j] = (x1q[j] - k2q[j] * n21q[j]) / qden[j];
        for (std::size_t k = 0; k < m; ++k) {
            cd gm{};
            for (std::size_t j = 0; j < m; ++j) gm += gres[j] / (pz[k] - qz[j]);
            out[k] = b1[k] + gm * n12p[k];
        }
        return out;
    };
    auto k2_at_q = [&](const std::vector<cd>& r) {
        sol->r = r;
        std::vector<cd> v(m);
        for (std::size_t j = 0; j < m; ++j) v[j] = sol->K2(qz[j]);
        return v;
    };
    auto fmap = [&](const std::vector<cd>& r) { return fmap_from_k2(k2_at_q(r)); };

    const std::vector<cd> zero(m);
    const std::vector<cd> base = fmap_from_k2(zero);
    auto linear = [&](const std::vector<cd>& r) { return add_scaled(fmap(r), 1.0, base, -1.0); };

    // Spectral radius of the linear part by power iteration from a fixed random start.
    std::mt19937_64 rng(1);
    std::normal_distribution<double> nd;
    std::vector<cd> v(m);
    for (auto& x : v) x = nd(rng);
    double rho = 0.0;
    for (int it = 0; it < 30; ++it) {
        const auto wv = linear(v);
        const double nv = l2(v), nw = l2(wv);
        rho = nw / nv;
        if (nw == 0.0) break;  // decoupled channels: the map is constant
        v = add_scaled(wv, 1.0 / nw, zero, 0.0);
    }
    const double alpha = opt.relaxation > 0.0 ? opt.relaxation : 2.0 / (2.0 + rho);
    info.spectral_radius = rho;
    info.relaxation = alpha;

    std::vector<cd> r;
    if (warm) {
        std::vector<cd> k2q(m);
        for (std::size_t j = 0; j < m; ++j) k2q[j] = warm(qz[j] * rs.w_scale);
        r = fmap_from_k2(k2q);
    } else {
        r = base;
    }

    std::vector<cd> check(3201);
    for (std::size_t k = 0; k < check.size(); ++k) check[k] = -8.0 + 16.0 * static_cast<double>(k) / 3200.0;
    auto on_check = [&](const std::vector<cd>& rr) {
        sol->r = rr;
        std::vector<cd> out(check.size());
        for (std::size_t k = 0; k < check.size(); ++k) out[k] = sol->K2(check[k]);
        return out;
    };
    auto prev = on_check(r);
    bool converged = false;
    for (int it = 0; it < opt.max_iter; ++it) {
        r = add_scaled(r, 1.0 - alpha, fmap(r), alpha);
        const auto cur = on_check(r);
        const double nc = l2(cur);
        const double change = nc > 0.0 ? l2(add_scaled(cur, 1.0, prev, -1.0)) / nc : 0.0;
        info.trace.push_back(change);
        prev = cur;
        if (change < opt.tol) {
            converged = true;
            break;
        }
    }
    info.iterations = static_cast<int>(info.trace.size());
    if (!converged)
        throw ConvergenceError("wiener_unequal_angles: row " + std::to_string(row) + " did not converge in " +
                                   std::to_string(opt.max_iter) + " iterations (last change " +
                                   std::to_string(info.trace.empty() ? 0.0 : info.trace.back()) + ")",
                               info.trace);
    sol->r = r;
    return sol;
}

}  // namespace

FilterMatrix wiener_unequal_angles(const SystemParams& p, const FrequencyGrid& grid, const SolverOptions& opt) {
    validate(p);
    const double W0 = p.Lambda;
    const auto rs = rational_spectra(p, W0);

    // Warm start: the closed-form filter at the mean angle, when that angle is admissible.
    std::array<std::function<cd(cd)>, 2> warm;
    const double mean = 0.5 * (p.theta_plus + p.theta_minus);
    if (std::abs(std::sin(mean)) > 1e-3) {
        SystemParams pm = p;
        pm.theta_plus = pm.theta_minus = mean;
        const auto eq = wiener_equal_angle(pm, FrequencyGrid::from_values({}));
        warm[0] = [f = eq.normalized](cd w) { return f(w)[1]; };
        warm[1] = [f = eq.normalized](cd w) { return f(w)[2]; };
    }

    FilterMatrix out;
    const auto row0 = solve_row(rs, 0, opt, warm[0], out.info[0]);
    const auto row1 = solve_row(rs, 1, opt, warm[1], out.info[1]);
    out.grid = grid;
    out.method = FilterMethod::Numerical;
    out.scale = std::sqrt(constants::hbar / p.M);
    out.normalized = [row0, row1, W0](cd w) -> std::array<cd, 4> {
        const cd s = w / W0;
        return {row0->K1(s), row0->K2(s), row1->K2(s), row1->K1(s)};
    };
    for (const auto* row : {row0.get(), row1.get()}) {
        for (cd z : row->phiN.roots) out.poles.push_back(z * W0);
        for (cd z : row->dQ.roots) out.poles.push_back(z * W0);
    }
    for (double w : grid.values) {
        const auto k = out.normalized(w);
        out.Kpp.push_back(out.scale * k[0]);
        out.Kpm.push_back(out.scale * k[1]);
        out.Kmp.push_back(out.scale * k[2]);
        out.Kmm.push_back(out.scale * k[3]);
    }
    return out;
}

}  // namespace sngrav
