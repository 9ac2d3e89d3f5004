#include "sngrav/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "sngrav/config.hpp"
#include "sngrav/constants.hpp"
#include "sngrav/errors.hpp"
#include "sngrav/mcsim.hpp"
#include "sngrav/spectra.hpp"
#include "sngrav/stats.hpp"
#include "sngrav/wiener.hpp"

namespace sngrav::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12e", v);
    return buf;
}

std::string short_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> split_doubles(const std::string& s, char sep, const std::string& what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, sep)) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(tok, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != tok.size()) throw DomainError(what + ": '" + tok + "' is not a number");
        out.push_back(v);
    }
    return out;
}

std::vector<double> spaced(double lo, double hi, std::size_t n, bool log) {
    if (n == 1) return {lo};
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(n - 1);
        v[i] = log ? lo * std::pow(hi / lo, t) : lo + (hi - lo) * t;
    }
    v.front() = lo;
    v.back() = hi;
    return v;
}

// `lo:hi:n`, linear.
std::vector<double> parse_range(const std::string& spec, const std::string& what) {
    const auto first = spec.find(':'), second = spec.rfind(':');
    if (first == std::string::npos || first == second) throw DomainError(what + ": expected lo:hi:n");
    const auto bounds = split_doubles(spec.substr(0, second), ':', what);
    const auto n = split_doubles(spec.substr(second + 1), ':', what);
    if (bounds.size() != 2 || n.size() != 1 || n[0] < 1 || n[0] != std::floor(n[0]))
        throw DomainError(what + ": expected lo:hi:n with integer n >= 1");
    return spaced(bounds[0], bounds[1], static_cast<std::size_t>(n[0]), false);
}

// Runs fn(0..n-1) on up to `workers` threads. Each index writes only its own slot, so the output
// order never depends on scheduling. The first exception is rethrown after all threads join.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) failure = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

FrequencyGrid grid_from(const GridControls& g) {
    const double lo = constants::two_pi * g.f_min_hz, hi = constants::two_pi * g.f_max_hz;
    return g.log ? FrequencyGrid::logarithmic(lo, hi, g.n_points) : FrequencyGrid::linear(lo, hi, g.n_points);
}

struct Common {
    std::string config_path;
    std::vector<std::string> sets;
    std::string out_path;
    unsigned workers = 1;
};

// Output sink: the --out file when given, otherwise the caller's stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw DomainError("cannot write output file '" + path + "'");
            stream_ = &file_;
        }
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

struct Context {
    RunConfig cfg;
    SystemParams params;
    std::ostream& out;
    std::ostream& err;
    std::string subcommand;
    std::vector<std::pair<std::string, std::string>> options;  // recorded in the CSV header

    void warn(const std::string& msg) const { err << "warning: " << msg << "\n"; }

    // '#' header: version, subcommand options, conventions, and the resolved config as `#cfg` lines
    // that load_config reads back.
    std::string header() const {
        std::string h = std::string("# sngrav ") + kVersion + " " + subcommand + "\n";
        if (!options.empty()) {
            h += "# options:";
            for (const auto& [k, v] : options) h += " --" + k + " " + v;
            h += "\n";
        }
        h += "# convention: f(w) = int f(t) exp(+i w t) dt; spectra one-sided per Hz in measured-quadrature units "
             "(vacuum = 1); frequencies in Hz\n";
        h += cfg.serialize("#cfg ");
        return h;
    }
};

RunConfig resolve_config(const Common& c) {
    std::vector<std::pair<std::string, std::string>> overrides;
    for (const auto& s : c.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw DomainError("--set expects key=value, got '" + s + "'");
        overrides.emplace_back(s.substr(0, eq), s.substr(eq + 1));
    }
    const std::string text = c.config_path.empty() ? std::string() : read_config_text(c.config_path);
    return parse_config(text, overrides);
}

double epsilon_at(const SystemParams& p, double omega) {
    const auto s = output_spectra(p, FrequencyGrid::from_values({omega}));
    return normalized_correlation(s)[0];
}

void apply_key(SystemParams& p, RunConfig& cfg, const std::string& key, double v) {
    if (key == "theta") {
        cfg.set("theta_plus", short_num(v));
        cfg.set("theta_minus", short_num(v));
    } else {
        cfg.set(key, short_num(v));
    }
    p = cfg.params();
}

// ---------------------------------------------------------------------------------------------

int cmd_spectra(Context& ctx, const std::string& out_path) {
    const auto grid = grid_from(ctx.cfg.grid());
    for (const auto& w : validate(ctx.params)) ctx.warn(w);
    const auto S = output_spectra(ctx.params, grid);
    const auto eps = normalized_correlation(S);
    const bool approx = ctx.cfg.approximation();
    Sink sink(out_path, ctx.out);
    auto& o = *sink;
    o << ctx.header();
    o << "omega_hz,S_pp,S_mm,re_S_pm,im_S_pm,epsilon";
    if (approx) o << ",re_S_pm_small_theta,S_pp_small_theta";
    o << "\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
        o << num(grid[k] / constants::two_pi) << "," << num(S.Spp[k].real()) << "," << num(S.Smm[k].real()) << ","
          << num(S.Spm[k].real()) << "," << num(S.Spm[k].imag()) << "," << num(eps[k]);
        if (approx)
            o << "," << num(cross_spectrum_small_theta(ctx.params, grid[k]).real()) << ","
              << num(diagonal_spectrum_small_theta(ctx.params, grid[k]));
        o << "\n";
    }
    return 0;
}

int cmd_filter(Context& ctx, const std::string& out_path, const std::string& method, const SolverOptions& solver) {
    const auto grid = grid_from(ctx.cfg.grid());
    const auto& p = ctx.params;
    FilterMethod m = p.equal_angles() ? FilterMethod::Analytic : FilterMethod::Numerical;
    if (method == "analytic") m = FilterMethod::Analytic;
    if (method == "numerical") m = FilterMethod::Numerical;
    if (m == FilterMethod::Analytic && !p.equal_angles())
        throw DomainError("filter: the analytic filter needs theta_plus == theta_minus");
    const auto K = m == FilterMethod::Analytic ? wiener_equal_angle(p, grid) : wiener_unequal_angles(p, grid, solver);
    const char* tag = m == FilterMethod::Analytic ? "analytic" : "numerical";
    Sink sink(out_path, ctx.out);
    auto& o = *sink;
    o << ctx.header();
    o << "# filter entries in m per measured-quadrature unit\n";
    o << "omega_hz,reK_pp,imK_pp,reK_pm,imK_pm,reK_mp,imK_mp,reK_mm,imK_mm,method\n";
    for (std::size_t k = 0; k < grid.size(); ++k)
        o << num(grid[k] / constants::two_pi) << "," << num(K.Kpp[k].real()) << "," << num(K.Kpp[k].imag()) << ","
          << num(K.Kpm[k].real()) << "," << num(K.Kpm[k].imag()) << "," << num(K.Kmp[k].real()) << ","
          << num(K.Kmp[k].imag()) << "," << num(K.Kmm[k].real()) << "," << num(K.Kmm[k].imag()) << "," << tag << "\n";
    return 0;
}

struct SnrOptions {
    double snr = 1.0;
    std::optional<double> gamma_hz;
    double kappa = 0.0;
};

const char* snr_columns = "prescription,gamma_hz,duration_s,bins_N,snr,kappa,duration_approx_s,duration_spectral_s,unbounded";

std::string snr_row(const MeasurementPlan& m) {
    return std::string(to_string(m.prescription)) + "," + num(m.bandwidth_gamma / constants::two_pi) + "," +
           num(m.duration_T) + "," + num(m.bins_N) + "," + num(m.snr) + "," + num(m.kappa) + "," +
           num(m.duration_approx) + "," + num(m.duration_spectral) + "," + (m.unbounded ? "true" : "false");
}

MeasurementPlan plan_for(const Context& ctx, const SystemParams& p, const SnrOptions& s) {
    std::optional<double> gamma;
    if (s.gamma_hz) gamma = constants::two_pi * *s.gamma_hz;
    return measurement_time(p, s.snr, gamma, s.kappa, ctx.cfg.exclusion_window());
}

int cmd_snr(Context& ctx, const std::string& out_path, const SnrOptions& s) {
    for (const auto& w : validate(ctx.params)) ctx.warn(w);
    const auto plan = plan_for(ctx, ctx.params, s);
    if (plan.unbounded) ctx.warn("no SN signal for these parameters; the measurement time is unbounded");
    Sink sink(out_path, ctx.out);
    *sink << ctx.header() << snr_columns << "\n" << snr_row(plan) << "\n";
    return 0;
}

int cmd_sweep(Context& ctx, const std::string& out_path, const std::vector<std::string>& vary, const SnrOptions& s,
              unsigned workers) {
    if (vary.empty()) throw DomainError("sweep: give at least one --vary name=lo:hi:lin|log:n");
    std::vector<SweepAxis> axes;
    for (const auto& v : vary) axes.push_back(parse_vary(v));
    std::size_t cells = 1;
    for (const auto& a : axes) cells *= a.values.size();

    struct Cell {
        std::vector<double> inputs;
        std::string row;
        std::string warning;
    };
    std::vector<Cell> result(cells);
    parallel_for(cells, workers, [&](std::size_t idx) {
        RunConfig cfg = ctx.cfg;
        SystemParams p = ctx.params;
        Cell& c = result[idx];
        // Last axis varies fastest.
        std::size_t rest = idx;
        c.inputs.resize(axes.size());
        for (std::size_t a = axes.size(); a-- > 0;) {
            c.inputs[a] = axes[a].values[rest % axes[a].values.size()];
            rest /= axes[a].values.size();
        }
        try {
            for (std::size_t a = 0; a < axes.size(); ++a) apply_key(p, cfg, axes[a].key, c.inputs[a]);
            validate(p);
            const auto plan = measurement_time(p, s.snr, s.gamma_hz ? std::optional(constants::two_pi * *s.gamma_hz)
                                                                    : std::nullopt,
                                               s.kappa, cfg.exclusion_window());
            c.row = snr_row(plan) + "," + num(epsilon_at(p, p.omega_m));
        } catch (const std::exception& e) {
            c.row = std::string(to_string(p.prescription)) + ",nan,nan,nan,nan,nan,nan,nan,false,nan";
            c.warning = e.what();
        }
    });
    Sink sink(out_path, ctx.out);
    auto& o = *sink;
    o << ctx.header();
    for (const auto& a : axes) o << a.key << ",";
    o << snr_columns << ",epsilon_at_omega_m\n";
    for (std::size_t i = 0; i < cells; ++i) {
        for (double v : result[i].inputs) o << num(v) << ",";
        o << result[i].row << "\n";
        if (!result[i].warning.empty()) ctx.warn("sweep cell " + std::to_string(i) + ": " + result[i].warning);
    }
    return 0;
}

struct SimOptions {
    double duration = 0.0;  // 0 selects 100 mechanical periods
    double dt = 0.0;        // 0 selects the largest admissible step
    std::size_t segment_length = 0;  // 0 selects the longest giving >= 64 half-overlapping segments
    std::size_t replicas = 1;
    std::string series_path;
};

int cmd_simulate(Context& ctx, const std::string& out_path, const SimOptions& so, unsigned workers) {
    const auto& p = ctx.params;
    for (const auto& w : validate(p)) ctx.warn(w);
    const double dt = so.dt > 0 ? so.dt : constants::two_pi / (20.0 * std::max(std::sqrt(p.omega_q2(Arm::B)), p.Lambda));
    const double duration = so.duration > 0 ? so.duration : 100.0 * constants::two_pi / p.omega_m;
    if (so.replicas == 0) throw DomainError("simulate: --replicas must be at least 1");
    const auto plan = plan_synthesis(p, duration, dt);
    std::size_t L = so.segment_length;
    if (L == 0) {
        L = 2 * plan.n / 65;
        L -= L % 2;
    }
    const std::uint64_t seed = ctx.cfg.seed();
    std::vector<WelchEstimate> est(so.replicas);
    std::optional<TimeSeriesPair> first;
    parallel_for(so.replicas, workers, [&](std::size_t r) {
        auto ts = synthesize(plan, seed + r);
        est[r] = welch_estimate(ts, L);
        if (r == 0 && !so.series_path.empty()) first = std::move(ts);
    });
    for (const auto& w : est[0].warnings) ctx.warn(w);

    SpectralMatrix avg = est[0].estimate;
    for (std::size_t r = 1; r < so.replicas; ++r)
        for (std::size_t k = 0; k < avg.grid.size(); ++k) {
            avg.Spp[k] += est[r].estimate.Spp[k];
            avg.Smm[k] += est[r].estimate.Smm[k];
            avg.Spm[k] += est[r].estimate.Spm[k];
            avg.Smp[k] += est[r].estimate.Smp[k];
        }
    const double inv = 1.0 / static_cast<double>(so.replicas);
    for (std::size_t k = 0; k < avg.grid.size(); ++k) {
        avg.Spp[k] *= inv;
        avg.Smm[k] *= inv;
        avg.Spm[k] *= inv;
        avg.Smp[k] *= inv;
    }
    const auto eps = normalized_correlation(avg);
    const auto exact = output_spectra(p, avg.grid);
    const std::size_t segments = est[0].segment_count * so.replicas;

    ctx.options = {{"duration", short_num(duration)},
                   {"dt", short_num(dt)},
                   {"segment-length", std::to_string(L)},
                   {"replicas", std::to_string(so.replicas)}};
    if (first) {
        std::ofstream f(so.series_path, std::ios::binary);
        if (!f) throw DomainError("cannot write time-series file '" + so.series_path + "'");
        f << ctx.header() << "# generator " << first->generator << ", seed " << seed << "\n";
        f << "t_s,y_plus,y_minus\n";
        for (std::size_t j = 0; j < first->samples_plus.size(); ++j)
            f << num(static_cast<double>(j) * dt) << "," << num(first->samples_plus[j]) << ","
              << num(first->samples_minus[j]) << "\n";
    }
    Sink sink(out_path, ctx.out);
    auto& o = *sink;
    o << ctx.header() << "# window hann, overlap 0.5, generator philox4x32-10\n";
    o << "omega_hz,S_pp,S_mm,re_S_pm,im_S_pm,epsilon,segment_count,seed,exact_S_pp,exact_re_S_pm\n";
    for (std::size_t k = 0; k < avg.grid.size(); ++k)
        o << num(avg.grid[k] / constants::two_pi) << "," << num(avg.Spp[k].real()) << "," << num(avg.Smm[k].real())
          << "," << num(avg.Spm[k].real()) << "," << num(avg.Spm[k].imag()) << "," << num(eps[k]) << "," << segments
          << "," << seed << "," << num(exact.Spp[k].real()) << "," << num(exact.Spm[k].real()) << "\n";
    return 0;
}

int cmd_tolerances(Context& ctx, const std::string& out_path) {
    const auto t = imperfection_tolerances(ctx.params);
    auto two_sig = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.1e", v);
        return std::string(buf);
    };
    Sink sink(out_path, ctx.out);
    auto& o = *sink;
    o << ctx.header() << "quantity,bound\n";
    o << "d_eps_omega_m," << two_sig(t.d_eps_omega_m) << "\n";
    o << "d_eps_Q," << two_sig(t.d_eps_Q) << "\n";
    o << "d_eps_M," << two_sig(t.d_eps_M) << "\n";
    o << "d_eps_gamma," << two_sig(t.d_eps_gamma) << "\n";
    o << "delta_BS," << two_sig(t.delta_BS) << "\n";
    return 0;
}

int cmd_correlation_map(Context& ctx, const std::string& out_path, const std::string& tp_spec,
                        const std::string& tm_spec, unsigned workers) {
    const auto& p = ctx.params;
    const auto tp = tp_spec.empty() ? spaced(p.theta_plus - 0.1, p.theta_plus + 0.1, 21, false)
                                    : parse_range(tp_spec, "--theta-plus");
    const auto tm = tm_spec.empty() ? spaced(p.theta_minus - 0.1, p.theta_minus + 0.1, 21, false)
                                    : parse_range(tm_spec, "--theta-minus");
    std::vector<CorrelationMap> rows(tp.size());
    parallel_for(tp.size(), workers, [&](std::size_t i) { rows[i] = correlation_map(p, {tp[i]}, tm); });
    ctx.options = {{"theta-plus", short_num(tp.front()) + ":" + short_num(tp.back()) + ":" + std::to_string(tp.size())},
                   {"theta-minus", short_num(tm.front()) + ":" + short_num(tm.back()) + ":" + std::to_string(tm.size())}};
    Sink sink(out_path, ctx.out);
    auto& o = *sink;
    o << ctx.header() << "theta_plus,theta_minus,epsilon_at_omega_m\n";
    for (std::size_t i = 0; i < tp.size(); ++i) {
        for (const auto& f : rows[i].failures) ctx.warn("correlation-map: " + f);
        for (std::size_t j = 0; j < tm.size(); ++j)
            o << num(tp[i]) << "," << num(tm[j]) << "," << num(rows[i].epsilon[0][j]) << "\n";
    }
    return 0;
}

int cmd_validate(Context& ctx, const std::string& out_path) {
    const auto& p = ctx.params;
    for (const auto& w : validate(p)) ctx.warn(w);
    struct Check {
        std::string name;
        double value, threshold;
        std::string status;
    };
    std::vector<Check> checks;
    auto add = [&](const std::string& name, double v, double thr) {
        checks.push_back({name, v, thr, v < thr ? "PASS" : "FAIL"});
    };

    const auto fgrid = default_filter_grid(p);
    const auto numerical = wiener_unequal_angles(p, fgrid);
    add("causality_leakage", validate_causality(numerical).max_leakage, 1e-3);

    const auto grid = grid_from(ctx.cfg.grid());
    {
        SystemParams q = p;
        q.omega_snB = q.omega_snA;
        const auto S = output_spectra(q, grid);
        double cross = 0.0, diag = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            cross = std::max(cross, std::abs(S.Spm[k]));
            diag = std::max(diag, S.Spp[k].real());
        }
        add("qg_null_cross_ratio", cross / diag, 1e-12);
    }
    {
        const auto S = p.equal_angles() ? output_spectra(p, fgrid) : output_spectra(p, fgrid, numerical);
        std::vector<double> smm(fgrid.size());
        for (std::size_t k = 0; k < fgrid.size(); ++k) smm[k] = S.Smm[k].real();
        add("factorization_residual", spectral_factorize(fgrid, smm, 1.0).residual, 1e-8);
    }
    {
        const auto S = output_spectra(p, grid);
        double herm = 0.0, neg = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const double scale = std::max(S.Spp[k].real(), S.Smm[k].real());
            herm = std::max(herm, std::abs(S.Spm[k] - std::conj(S.Smp[k])) / scale);
            const double det = S.Spp[k].real() * S.Smm[k].real() - std::norm(S.Spm[k]);
            neg = std::max({neg, -S.Spp[k].real() / scale, -S.Smm[k].real() / scale, -det / (scale * scale)});
        }
        add("hermitian_defect", herm, 1e-12);
        add("positivity_defect", neg, 1e-12);
    }
    if (p.equal_angles()) {
        const auto analytic = wiener_equal_angle(p, grid);
        const auto numeric = wiener_unequal_angles(p, grid);
        double worst = 0.0;
        for (int e = 0; e < 4; ++e) {
            const auto& a = e == 0 ? analytic.Kpp : e == 1 ? analytic.Kpm : e == 2 ? analytic.Kmp : analytic.Kmm;
            const auto& b = e == 0 ? numeric.Kpp : e == 1 ? numeric.Kpm : e == 2 ? numeric.Kmp : numeric.Kmm;
            double peak = 0.0;
            for (cd v : a) peak = std::max(peak, std::abs(v));
            for (std::size_t k = 0; k < a.size(); ++k)
                if (std::abs(a[k]) > 1e-3 * peak) worst = std::max(worst, std::abs(a[k] - b[k]) / std::abs(a[k]));
        }
        add("filter_analytic_vs_numerical", worst, 1e-2);
    } else {
        checks.push_back({"filter_analytic_vs_numerical", kNaN, 1e-2, "SKIPPED"});
        ctx.warn("validate: analytic filter comparison skipped for unequal angles");
    }

    Sink sink(out_path, ctx.out);
    auto& o = *sink;
    o << ctx.header() << "check,value,threshold,status\n";
    bool ok = true;
    for (const auto& c : checks) {
        o << c.name << "," << num(c.value) << "," << num(c.threshold) << "," << c.status << "\n";
        ok = ok && c.status != "FAIL";
    }
    if (!ok) ctx.err << "error: validate: at least one check failed\n";
    return ok ? 0 : 1;
}

}  // namespace

SweepAxis parse_vary(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw DomainError("--vary expects name=lo:hi:lin|log:n, got '" + spec + "'");
    SweepAxis axis;
    axis.key = spec.substr(0, eq);
    const auto& keys = config_keys();
    if (axis.key != "theta" && std::find(keys.begin(), keys.end(), axis.key) == keys.end())
        throw DomainError("--vary: unknown key '" + axis.key + "'");
    std::vector<std::string> parts;
    std::stringstream ss(spec.substr(eq + 1));
    for (std::string tok; std::getline(ss, tok, ':');) parts.push_back(tok);
    if (parts.size() != 4 || (parts[2] != "lin" && parts[2] != "log"))
        throw DomainError("--vary '" + spec + "': expected name=lo:hi:lin|log:n");
    const auto lo = split_doubles(parts[0], ',', "--vary"), hi = split_doubles(parts[1], ',', "--vary"),
               n = split_doubles(parts[3], ',', "--vary");
    if (n[0] < 1 || n[0] != std::floor(n[0])) throw DomainError("--vary '" + spec + "': n must be an integer >= 1");
    const bool log = parts[2] == "log";
    if (log && !(lo[0] > 0.0 && hi[0] > 0.0)) throw DomainError("--vary '" + spec + "': log spacing needs positive bounds");
    axis.values = spaced(lo[0], hi[0], static_cast<std::size_t>(n[0]), log);
    return axis;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Semi-classical gravity interferometer analysis: spectra, filters, detection statistics", "sngrav"};
    app.require_subcommand(1);
    Common common;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config_path, "Config file (key = value), or a CSV written by this tool");
        sub->add_option("--set", common.sets, "Override a config key, key=value (repeatable)");
        sub->add_option("--out", common.out_path, "Output CSV path (default: standard output)");
        sub->add_option("--workers", common.workers, "Worker threads for sweeps and replicas")->check(CLI::Range(1u, 1024u));
    };

    auto* spectra = app.add_subcommand("spectra", "Output and cross spectra with the correlation epsilon");
    auto* filter = app.add_subcommand("filter", "Causal Wiener filter on the config grid");
    std::string method = "auto";
    filter->add_option("--method", method, "analytic, numerical or auto")
        ->check(CLI::IsMember({"auto", "analytic", "numerical"}));
    SolverOptions solver;
    filter->add_option("--max-iter", solver.max_iter, "Iteration cap of the numerical solver")->check(CLI::PositiveNumber);
    filter->add_option("--tol", solver.tol, "Relative L2 step tolerance of the numerical solver")->check(CLI::PositiveNumber);
    auto* snr = app.add_subcommand("snr", "Measurement time for a target SNR");
    auto* sweep = app.add_subcommand("sweep", "Measurement time over a Cartesian parameter grid");
    SnrOptions snr_opts;
    for (auto* sub : {snr, sweep}) {
        sub->add_option("--snr", snr_opts.snr, "Target SNR")->check(CLI::PositiveNumber);
        sub->add_option("--gamma-hz", snr_opts.gamma_hz, "Observation bandwidth override, Hz");
        sub->add_option("--kappa", snr_opts.kappa, "Extra common-mode noise ratio")->check(CLI::NonNegativeNumber);
    }
    std::vector<std::string> vary;
    sweep->add_option("--vary", vary, "name=lo:hi:lin|log:n (repeatable; theta sets both angles)");
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo time series and Welch estimate");
    SimOptions sim;
    simulate->add_option("--duration", sim.duration, "Record length, s");
    simulate->add_option("--dt", sim.dt, "Sample step, s");
    simulate->add_option("--segment-length", sim.segment_length, "Welch segment length, samples");
    simulate->add_option("--replicas", sim.replicas, "Independent records with seeds seed, seed+1, ...");
    simulate->add_option("--series", sim.series_path, "Also write the first record's time series here");
    auto* tolerances = app.add_subcommand("tolerances", "Imperfection tolerance bounds");
    auto* cmap = app.add_subcommand("correlation-map", "epsilon(omega_m) over a (theta+, theta-) grid");
    std::string tp_spec, tm_spec;
    cmap->add_option("--theta-plus", tp_spec, "lo:hi:n (default: config angle +-0.1, 21 points)");
    cmap->add_option("--theta-minus", tm_spec, "lo:hi:n (default: config angle +-0.1, 21 points)");
    auto* validate_cmd = app.add_subcommand("validate", "Run the invariant checks and report pass/fail");
    for (auto* sub : {spectra, filter, snr, sweep, simulate, tolerances, cmap, validate_cmd}) add_common(sub);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    try {
        RunConfig cfg = resolve_config(common);
        Context ctx{cfg, cfg.params(), out, err, app.get_subcommands().front()->get_name(), {}};
        if (spectra->parsed()) return cmd_spectra(ctx, common.out_path);
        if (filter->parsed()) {
            ctx.options = {{"method", method}, {"max-iter", std::to_string(solver.max_iter)}, {"tol", short_num(solver.tol)}};
            return cmd_filter(ctx, common.out_path, method, solver);
        }
        if (snr->parsed() || sweep->parsed()) {
            ctx.options = {{"snr", short_num(snr_opts.snr)}, {"kappa", short_num(snr_opts.kappa)}};
            if (snr_opts.gamma_hz) ctx.options.emplace_back("gamma-hz", short_num(*snr_opts.gamma_hz));
            if (snr->parsed()) return cmd_snr(ctx, common.out_path, snr_opts);
            for (const auto& v : vary) ctx.options.emplace_back("vary", v);
            return cmd_sweep(ctx, common.out_path, vary, snr_opts, common.workers);
        }
        if (simulate->parsed()) return cmd_simulate(ctx, common.out_path, sim, common.workers);
        if (tolerances->parsed()) return cmd_tolerances(ctx, common.out_path);
        if (cmap->parsed()) return cmd_correlation_map(ctx, common.out_path, tp_spec, tm_spec, common.workers);
        return cmd_validate(ctx, common.out_path);
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << "\n";
        if (!e.trace().empty()) {
            err << "trace:";
            for (double v : e.trace()) err << " " << v;
            err << "\n";
        }
        return 2;
    }
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace sngrav::cli
