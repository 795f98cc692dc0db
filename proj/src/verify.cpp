#include "fpuwave/verify.hpp"

#include <chrono>
#include <cmath>
#include <numbers>
#include <optional>

#include "fpuwave/bvp.hpp"
#include "fpuwave/errors.hpp"
#include "fpuwave/lattice.hpp"
#include "fpuwave/waves.hpp"

namespace fpuwave {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string g(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", x);
    return buf;
}

CriterionResult start(int id, const char* name) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    return r;
}

struct Context {
    const ExperimentConfig& cfg;
    std::optional<CriticalData> critical;
    std::optional<NormalFormCoeffs> coeffs;
    std::vector<ProfileSolution> family;
};

CriterionResult critical_point(Context& ctx) {
    CriterionResult r = start(1, "critical point");
    const auto t0 = clock_type::now();
    const CriticalData cr = find_critical();
    r.seconds = seconds_since(t0);
    ctx.critical = cr;
    const double c2 = cr.c_star * cr.c_star;
    r.passed = std::abs(c2 - 2.743) <= 5e-3 && std::abs(cr.c_star - 1.656) <= 0.01 && r.seconds < 1.0;
    r.metrics = to_json(cr);
    r.metrics["c_star_sq"] = c2;
    r.detail = "c*^2=" + format_double(c2) + " c*=" + format_double(cr.c_star) + " k0=" + g(cr.k0);
    return r;
}

CriterionResult spectral_counts(Context& ctx) {
    CriterionResult r = start(2, "spectral counts");
    const SearchBox box{ctx.cfg.spectrum.re_max, ctx.cfg.spectrum.im_max};
    const int grid = ctx.cfg.spectrum.grid;
    bool ok = true;
    double worst_time = 0.0;
    std::string detail;

    auto panel = [&](double c2) {
        const auto t0 = clock_type::now();
        EigenvalueSet set = neutral_eigenvalues(std::sqrt(c2), box, grid);
        const double dt = seconds_since(t0);
        worst_time = std::max(worst_time, dt);
        const bool counts_agree = set.count_with_multiplicity() == set.winding_number;
        ok = ok && counts_agree && dt < 10.0;
        return std::make_pair(set, counts_agree);
    };

    {
        auto [set, agree] = panel(2.9);
        const auto imag = set.purely_imaginary_nonzero();
        ok = ok && imag.empty();
        detail += "c^2=2.9: imaginary=" + std::to_string(imag.size()) + " roots=" +
                  std::to_string(set.count_with_multiplicity()) + " winding=" + std::to_string(set.winding_number) +
                  (agree ? "" : " (count mismatch)") + "; ";
        r.metrics["c2_2.9"] = {{"imaginary_nonzero", imag.size()}, {"count", set.count_with_multiplicity()},
                               {"winding", set.winding_number}};
    }
    {
        auto [set, agree] = panel(2.743);
        const double k0 = ctx.critical->k0;
        const double gap = std::max(pair_gap_near(set, cplx(0.0, k0)), pair_gap_near(set, cplx(0.0, -k0)));
        ok = ok && gap < 1e-3;
        detail += "c^2=2.743: pair gap=" + g(gap) + " winding=" + std::to_string(set.winding_number) +
                  (agree ? "" : " (count mismatch)") + "; ";
        r.metrics["c2_2.743"] = {{"pair_gap", gap}, {"count", set.count_with_multiplicity()},
                                 {"winding", set.winding_number}};
        // Same measurement at the computed critical speed, for reference.
        const EigenvalueSet at_crit = neutral_eigenvalues(ctx.critical->c_star, box, grid);
        const double gap_crit =
            std::max(pair_gap_near(at_crit, cplx(0.0, k0)), pair_gap_near(at_crit, cplx(0.0, -k0)));
        r.metrics["c_star_pair_gap"] = gap_crit;
        detail += "(at computed c*^2: gap=" + g(gap_crit) + ") ";
    }
    {
        auto [set, agree] = panel(2.5);
        const auto imag = set.purely_imaginary_nonzero();
        ok = ok && imag.size() == 4;
        detail += "c^2=2.5: imaginary=" + std::to_string(imag.size()) + " winding=" +
                  std::to_string(set.winding_number) + (agree ? "" : " (count mismatch)") + ";";
        r.metrics["c2_2.5"] = {{"imaginary_nonzero", imag.size()}, {"count", set.count_with_multiplicity()},
                               {"winding", set.winding_number}};
    }
    r.seconds = worst_time;
    r.passed = ok;
    r.detail = detail;
    return r;
}

CriterionResult sign_facts(Context& ctx) {
    CriterionResult r = start(3, "sign facts");
    const CriticalData& cr = *ctx.critical;
    r.passed = cr.d2_sigma > 1e-6 && cr.sigma_2ik0 < -1e-6 && cr.s0_prime > 1e-6;
    r.metrics = {{"d2_sigma", cr.d2_sigma}, {"sigma_2ik0", cr.sigma_2ik0}, {"s0_prime", cr.s0_prime}};
    r.detail = "d2_sigma=" + g(cr.d2_sigma) + " sigma_2ik0=" + g(cr.sigma_2ik0) + " s0'=" + g(cr.s0_prime);
    return r;
}

CriterionResult projection_duality(Context& ctx) {
    CriterionResult r = start(4, "projection duality");
    const double c = ctx.critical->c_star;
    const WindowSamples U0 = WindowSamples::from(64, [](double) { return 1.0; });
    const WindowSamples U1 = WindowSamples::from(64, [](double p) { return p; });
    const double m[2][2] = {{chi0(1.0, 0.0, U0, c), chi0(0.0, 1.0, U1, c)},
                            {chi1(1.0, 0.0, U0, c), chi1(0.0, 1.0, U1, c)}};
    double worst = 0.0;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) worst = std::max(worst, std::abs(m[i][j] - (i == j ? 1.0 : 0.0)));
    r.passed = worst < 1e-10;
    r.metrics = {{"max_deviation", worst}};
    r.detail = "max |chi_i(V_j) - delta_ij| = " + g(worst);
    return r;
}

CriterionResult normal_form_identity(Context& ctx) {
    CriterionResult r = start(5, "normal-form identity");
    double worst = 0.0;
    for (int i = 1; i <= 8; ++i) {
        for (double theta : {0.0, std::numbers::pi}) {
            const WaveAnsatz a = make_ansatz(0.01 * i, *ctx.critical, *ctx.coeffs, theta);
            std::vector<double> xs;
            for (int j = -1000; j <= 1000; ++j) xs.push_back(j * 0.04 / a.width);
            worst = std::max(worst, truncated_nf_residual(a, xs) / a.amplitude_scale);
        }
    }
    r.passed = worst < 1e-12;
    r.metrics = {{"max_scaled_residual", worst}};
    r.detail = "max residual/scale = " + g(worst);
    return r;
}

CriterionResult bvp_family(Context& ctx) {
    CriterionResult r = start(6, "profile family");
    const auto t0 = clock_type::now();
    ctx.family = continuation(ctx.cfg.epsilon_list, *ctx.critical, *ctx.coeffs, ctx.cfg.potential, ctx.cfg.solver);
    r.seconds = seconds_since(t0);
    bool ok = r.seconds < 120.0;
    std::string detail;
    r.metrics["members"] = json::array();
    for (const auto& s : ctx.family) {
        const bool good = s.residual_norm < 1e-10 && s.first_integral_drift < 1e-8 && s.symmetry_defect < 1e-6 &&
                          s.tail_ratio < 1e-8;
        ok = ok && good;
        detail += "eps=" + g(s.epsilon) + "[N=" + std::to_string(s.n_modes) + " res=" + g(s.residual_norm) +
                  " I1=" + g(s.first_integral_drift) + " sym=" + g(s.symmetry_defect) + " tail=" + g(s.tail_ratio) +
                  " it=" + std::to_string(s.newton_iterations) + "] ";
        r.metrics["members"].push_back({{"epsilon", s.epsilon},
                                        {"n_modes", s.n_modes},
                                        {"residual", s.residual_norm},
                                        {"first_integral_drift", s.first_integral_drift},
                                        {"symmetry_defect", s.symmetry_defect},
                                        {"tail_ratio", s.tail_ratio},
                                        {"newton_iterations", s.newton_iterations}});
    }
    r.passed = ok;
    r.detail = detail;
    return r;
}

CriterionResult nls_estimate(Context& ctx) {
    CriterionResult r = start(7, "NLS estimate");
    if (ctx.family.empty()) throw Error(ErrorKind::InvalidArgument, "no solved profiles available");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    std::string detail;
    r.metrics["ratios"] = json::array();
    for (const auto& s : ctx.family) {
        const double e = nls_error(s, *ctx.critical, *ctx.coeffs);
        const double q = e / (s.epsilon * s.epsilon * std::abs(std::log(s.epsilon)));
        lo = std::min(lo, q);
        hi = std::max(hi, q);
        detail += "eps=" + g(s.epsilon) + ":" + g(q) + " ";
        r.metrics["ratios"].push_back({{"epsilon", s.epsilon}, {"nls_error", e}, {"ratio", q}});
    }
    r.passed = hi / lo < 3.0;
    r.metrics["spread"] = hi / lo;
    r.detail = detail + "spread=" + g(hi / lo);
    return r;
}

CriterionResult permanence(Context& ctx) {
    CriterionResult r = start(8, "permanence of form");
    const LatticeConfig& lc = ctx.cfg.lattice;
    const ProfileSolution* prof = nullptr;
    for (const auto& s : ctx.family)
        if (std::abs(s.epsilon - lc.epsilon) < 1e-12) prof = &s;
    std::optional<ProfileSolution> own;
    if (!prof) {
        own = solve(lc.epsilon, *ctx.critical, *ctx.coeffs, ctx.cfg.potential, ctx.cfg.solver);
        prof = &*own;
    }
    const auto t0 = clock_type::now();
    const LatticeState s0 = lattice_initial_data(*prof, lc.n_sites, lc.x0);
    RunOptions opt;
    opt.stride = lc.stride;
    opt.profile = prof;
    opt.initial_shift = lc.x0;
    const RunResult run1 = run(s0, lc.T, lc.dt, ctx.cfg.potential, opt);
    const double shape = run1.records.back().shape_error;
    const double speed = fitted_speed(run1.records);
    const double drift = relative_energy_drift(run1.records);

    RunOptions opt2;
    opt2.stride = 2 * lc.stride;
    const RunResult run2 = run(s0, lc.T, 0.5 * lc.dt, ctx.cfg.potential, opt2);
    const double drift2 = relative_energy_drift(run2.records);
    const double ratio = drift / drift2;
    r.seconds = seconds_since(t0);

    const double speed_err = std::abs(speed - prof->c) / prof->c;
    const bool shape_ok = shape < 1e-3, speed_ok = speed_err < 0.01, drift_ok = drift < 1e-6;
    const bool ratio_ok = ratio >= 3.2 && ratio <= 4.8;
    r.passed = shape_ok && speed_ok && drift_ok && ratio_ok && lc.n_sites >= 2048 && r.seconds < 60.0;
    r.metrics = {{"shape_error", shape},   {"fitted_speed", speed}, {"c", prof->c},
                 {"energy_drift", drift},  {"energy_drift_half_dt", drift2},
                 {"refinement_ratio", ratio}, {"n_sites", lc.n_sites}, {"T", lc.T}, {"dt", lc.dt}};
    r.detail = "shape=" + g(shape) + (shape_ok ? "" : "(!)") + " speed=" + g(speed) + " vs c=" + g(prof->c) +
               (speed_ok ? "" : "(!)") + " drift=" + g(drift) + (drift_ok ? "" : "(!)") + " ratio=" + g(ratio) +
               (ratio_ok ? "" : "(!)");
    return r;
}

CriterionResult linear_dispersion(Context& ctx) {
    CriterionResult r = start(9, "linear dispersion");
    const std::size_t n = 256;
    const double dt = ctx.cfg.lattice.dt;
    bool ok = true;
    std::string detail;
    r.metrics["modes"] = json::array();
    for (int j : {8, 40, 72, 104, 120}) {
        const double k = 2.0 * std::numbers::pi * j / static_cast<double>(n);
        const double omega = std::sqrt(omega_sq(k));
        LatticeState s;
        s.q.resize(n);
        s.p.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) s.q[i] = 1e-6 * std::cos(k * static_cast<double>(i));
        const double T = 20.0 * 2.0 * std::numbers::pi / omega;
        std::vector<double> ts, xs;
        RunOptions opt;
        opt.stride = 1;
        opt.observer = [&](const LatticeState& st) {
            ts.push_back(st.t);
            xs.push_back(st.q[0]);
        };
        run(s, T, dt, ctx.cfg.potential, opt);
        const double measured = zero_crossing_frequency(ts, xs);
        const double rel = std::abs(measured - omega) / omega;
        ok = ok && rel < 0.01;
        detail += "k=" + g(k) + ":" + g(rel) + " ";
        r.metrics["modes"].push_back({{"k", k}, {"omega", omega}, {"measured", measured}, {"rel_error", rel}});
    }
    r.passed = ok;
    r.detail = "relative frequency errors " + detail;
    return r;
}

CriterionResult negative_control(Context& ctx) {
    CriterionResult r = start(10, "negative control");
    const PotentialSpec bad{0.0, 0.0, -1.0, -1.0};
    bool rejected = false;
    std::string what;
    try {
        nls_params(*ctx.critical, bad);
    } catch (const Error& e) {
        rejected = e.kind() == ErrorKind::ExistenceConditionViolated;
        what = e.what();
    }
    bool solve_rejected = false;
    try {
        solve(0.04, *ctx.critical, compute_normal_form(*ctx.critical, bad), bad, ctx.cfg.solver);
    } catch (const Error& e) {
        solve_rejected = e.kind() == ErrorKind::ExistenceConditionViolated;
    }
    r.passed = rejected && solve_rejected && !sign_condition(*ctx.critical, bad);
    r.metrics = {{"rejected", rejected}, {"solve_rejected", solve_rejected}};
    r.detail = rejected ? "b1=b2=-1 rejected: " + what : "b1=b2=-1 was not rejected";
    return r;
}

}  // namespace

bool VerifyReport::all_passed() const {
    for (const auto& c : criteria)
        if (!c.passed) return false;
    return !criteria.empty();
}

std::string format_line(const CriterionResult& r) {
    std::string line =
        std::string(r.passed ? "[PASS] " : "[FAIL] ") + std::to_string(r.id) + " " + r.name + ": " + r.detail;
    if (r.seconds > 0.0) line += " (" + g(r.seconds) + " s)";
    return line;
}

json to_json(const VerifyReport& rep) {
    json j;
    j["config_hash"] = rep.config_hash;
    j["all_passed"] = rep.all_passed();
    j["criteria"] = json::array();
    for (const auto& c : rep.criteria)
        j["criteria"].push_back({{"id", c.id},
                                 {"name", c.name},
                                 {"passed", c.passed},
                                 {"detail", c.detail},
                                 {"metrics", c.metrics}});
    return j;
}

double zero_crossing_frequency(const std::vector<double>& t, const std::vector<double>& x) {
    std::vector<double> cross;
    for (std::size_t i = 1; i < x.size(); ++i) {
        if ((x[i - 1] < 0.0 && x[i] >= 0.0) || (x[i - 1] > 0.0 && x[i] <= 0.0)) {
            const double f = x[i - 1] / (x[i - 1] - x[i]);
            cross.push_back(t[i - 1] + f * (t[i] - t[i - 1]));
        }
    }
    if (cross.size() < 3) return std::numeric_limits<double>::quiet_NaN();
    // Successive crossings are half a period apart.
    return std::numbers::pi * static_cast<double>(cross.size() - 1) / (cross.back() - cross.front());
}

VerifyReport run_verification(const ExperimentConfig& cfg, const VerifyOptions& opt) {
    cfg.validate();
    VerifyReport rep;
    rep.config_hash = config_hash(cfg);
    Context ctx{cfg, std::nullopt, std::nullopt, {}};

    using Stage = CriterionResult (*)(Context&);
    const std::pair<int, Stage> stages[] = {
        {1, critical_point},   {2, spectral_counts}, {3, sign_facts},  {4, projection_duality},
        {5, normal_form_identity}, {6, bvp_family},  {7, nls_estimate}, {8, permanence},
        {9, linear_dispersion}, {10, negative_control}};
    static const char* names[] = {"",
                                  "critical point",
                                  "spectral counts",
                                  "sign facts",
                                  "projection duality",
                                  "normal-form identity",
                                  "profile family",
                                  "NLS estimate",
                                  "permanence of form",
                                  "linear dispersion",
                                  "negative control"};

    for (const auto& [id, stage] : stages) {
        CriterionResult res;
        try {
            if (id >= 5 && !ctx.coeffs) {
                if (!ctx.critical) throw Error(ErrorKind::InvalidArgument, "critical point unavailable");
                NormalFormCoeffs nf = compute_normal_form(*ctx.critical, cfg.potential);
                nls_params(*ctx.critical, cfg.potential);
                ctx.coeffs = nf;
            }
            if (!ctx.critical && id > 1) throw Error(ErrorKind::InvalidArgument, "critical point unavailable");
            res = stage(ctx);
        } catch (const Error& e) {
            if (opt.stop_on_error)
                throw Error(e.kind(), std::string("stage '") + names[id] + "': " + e.what());
            res.id = id;
            res.name = names[id];
            res.passed = false;
            res.detail = std::string("error: ") + e.what();
        }
        if (opt.on_result) opt.on_result(res);
        rep.criteria.push_back(std::move(res));
    }
    return rep;
}

}  // namespace fpuwave
