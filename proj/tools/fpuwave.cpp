#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "fpuwave/bvp.hpp"
#include "fpuwave/dispersion.hpp"
#include "fpuwave/errors.hpp"
#include "fpuwave/io.hpp"
#include "fpuwave/lattice.hpp"
#include "fpuwave/normal_form.hpp"
#include "fpuwave/verify.hpp"
#include "fpuwave/waves.hpp"

namespace fs = std::filesystem;
using namespace fpuwave;

namespace {

constexpr int kNumericalFailure = 2;
constexpr int kUsage = 64;

struct Globals {
    std::string config_path;
    std::string out_dir;
    bool as_json = false;
    bool gnuplot = false;
};

struct Env {
    ExperimentConfig cfg;
    std::string hash;
    fs::path out;
};

Env load(const Globals& g) {
    Env e;
    if (!g.config_path.empty()) e.cfg = load_config(g.config_path);
    apply_env_overrides(e.cfg, [](const char* name) { return std::getenv(name); });
    if (!g.out_dir.empty()) e.cfg.output_dir = g.out_dir;
    e.cfg.validate();
    e.hash = config_hash(e.cfg);
    e.out = e.cfg.output_dir;
    return e;
}

std::string tag(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", x);
    return buf;
}

void print_table(const json& j) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        std::string val;
        if (it.value().is_number_float()) val = format_double(it.value().get<double>());
        else if (it.value().is_string()) val = it.value().get<std::string>();
        else val = it.value().dump();
        std::printf("%-22s %s\n", it.key().c_str(), val.c_str());
    }
}

int cmd_critical(const Globals& g) {
    const Env e = load(g);
    json j = to_json(find_critical());
    j["config_hash"] = e.hash;
    write_text(e.out / "critical.json", dump_json(j));
    if (g.as_json) std::fputs(dump_json(j).c_str(), stdout);
    else print_table(j);
    return 0;
}

int cmd_spectrum(const Globals& g, double c2, std::optional<double> re_max, std::optional<double> im_max,
                 std::optional<int> grid) {
    Env e = load(g);
    if (re_max) e.cfg.spectrum.re_max = *re_max;
    if (im_max) e.cfg.spectrum.im_max = *im_max;
    if (grid) e.cfg.spectrum.grid = *grid;
    if (!(c2 > 0.0) || !std::isfinite(c2)) throw Error(ErrorKind::InvalidArgument, "--c2 must be positive");
    if (!(e.cfg.spectrum.re_max > 0.0) || !(e.cfg.spectrum.im_max > 0.0) || !std::isfinite(e.cfg.spectrum.re_max) ||
        !std::isfinite(e.cfg.spectrum.im_max) || e.cfg.spectrum.grid < 2)
        throw Error(ErrorKind::InvalidArgument, "malformed search box");
    e.hash = config_hash(e.cfg);
    const EigenvalueSet set =
        neutral_eigenvalues(std::sqrt(c2), {e.cfg.spectrum.re_max, e.cfg.spectrum.im_max}, e.cfg.spectrum.grid);
    const std::string name = "spectrum_c2_" + tag(c2) + ".csv";
    write_text(e.out / name, eigenvalues_csv(set, e.hash));
    if (g.gnuplot) write_text(e.out / ("spectrum_c2_" + tag(c2) + ".gp"), gnuplot_spectrum(name, e.hash));
    json s = {{"c2", c2},
              {"roots_with_multiplicity", set.count_with_multiplicity()},
              {"winding_number", set.winding_number},
              {"imaginary_nonzero", set.purely_imaginary_nonzero().size()},
              {"clustered_pairs", clustered_pairs(set, 1e-4).size()},
              {"csv", name},
              {"config_hash", e.hash}};
    if (g.as_json) std::fputs(dump_json(s).c_str(), stdout);
    else print_table(s);
    return set.count_with_multiplicity() == set.winding_number ? 0 : kNumericalFailure;
}

int cmd_coeffs(const Globals& g) {
    const Env e = load(g);
    const CriticalData cr = find_critical();
    const NormalFormCoeffs nf = compute_normal_form(cr, e.cfg.potential);
    json j = to_json(nf);
    j["config_hash"] = e.hash;
    j["verdict"] = nf.sign_condition_ok ? "sign condition holds" : "sign condition fails";
    write_text(e.out / "coeffs.json", dump_json(j));
    if (g.as_json) std::fputs(dump_json(j).c_str(), stdout);
    else print_table(j);
    return 0;
}

int cmd_solve(const Globals& g) {
    const Env e = load(g);
    const CriticalData cr = find_critical();
    nls_params(cr, e.cfg.potential);
    const NormalFormCoeffs nf = compute_normal_form(cr, e.cfg.potential);
    const auto family = continuation(e.cfg.epsilon_list, cr, nf, e.cfg.potential, e.cfg.solver);
    json summary = json::array();
    for (const auto& s : family) {
        const std::string base = "profile_eps" + tag(s.epsilon);
        write_text(e.out / (base + ".csv"), profile_csv(s, e.hash));
        write_text(e.out / (base + ".json"), dump_json(profile_header(s, base + ".csv", e.hash)));
        if (g.gnuplot) write_text(e.out / (base + ".gp"), gnuplot_profile(base + ".csv", e.hash));
        summary.push_back({{"epsilon", s.epsilon},
                           {"n_modes", s.n_modes},
                           {"residual_norm", s.residual_norm},
                           {"first_integral_drift", s.first_integral_drift},
                           {"symmetry_defect", s.symmetry_defect},
                           {"newton_iterations", s.newton_iterations},
                           {"header", base + ".json"}});
    }
    if (g.as_json) {
        std::fputs(dump_json(summary).c_str(), stdout);
    } else {
        std::printf("%-8s %-6s %-12s %-12s %-12s %s\n", "epsilon", "N", "residual", "I1 drift", "sym defect", "iters");
        for (const auto& s : family)
            std::printf("%-8g %-6zu %-12.3e %-12.3e %-12.3e %d\n", s.epsilon, s.n_modes, s.residual_norm,
                        s.first_integral_drift, s.symmetry_defect, s.newton_iterations);
    }
    return 0;
}

int cmd_simulate(const Globals& g, std::string profile_path, std::size_t snapshot_stride) {
    const Env e = load(g);
    if (profile_path.empty())
        profile_path = (e.out / ("profile_eps" + tag(e.cfg.lattice.epsilon) + ".json")).string();
    const ProfileSolution prof = read_profile(profile_path);
    const LatticeConfig& lc = e.cfg.lattice;
    const LatticeState s0 = lattice_initial_data(prof, lc.n_sites, lc.x0);
    RunOptions opt;
    opt.stride = lc.stride;
    opt.profile = &prof;
    opt.initial_shift = lc.x0;
    std::size_t record_index = 0;
    if (snapshot_stride > 0) {
        opt.observer = [&](const LatticeState& st) {
            if (record_index % snapshot_stride == 0) {
                char name[64];
                std::snprintf(name, sizeof name, "snapshot_%06zu.bin", record_index);
                write_snapshot(e.out / name, st, e.hash);
            }
            ++record_index;
        };
    }
    const RunResult res = run(s0, lc.T, lc.dt, prof.potential, opt);
    write_text(e.out / "trajectory.csv", trajectory_csv(res.records, e.hash));
    if (g.gnuplot) write_text(e.out / "trajectory.gp", gnuplot_trajectory("trajectory.csv", e.hash));
    json s = {{"final_shape_error", res.records.back().shape_error},
              {"fitted_speed", fitted_speed(res.records)},
              {"c", prof.c},
              {"energy_drift", relative_energy_drift(res.records)},
              {"steps", res.steps},
              {"csv", "trajectory.csv"},
              {"config_hash", e.hash}};
    if (g.as_json) std::fputs(dump_json(s).c_str(), stdout);
    else print_table(s);
    return 0;
}

int cmd_verify(const Globals& g) {
    const Env e = load(g);
    VerifyOptions opt;
    opt.stop_on_error = true;
    if (!g.as_json) opt.on_result = [](const CriterionResult& r) { std::printf("%s\n", format_line(r).c_str()); };
    const VerifyReport rep = run_verification(e.cfg, opt);
    const json j = to_json(rep);
    write_text(e.out / "verify_report.json", dump_json(j));
    if (g.as_json) std::fputs(dump_json(j).c_str(), stdout);
    return rep.all_passed() ? 0 : kNumericalFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Traveling waves in FPU chains with competing nearest and next-nearest neighbour forces"};
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_path, "JSON experiment configuration")->check(CLI::ExistingFile);
    app.add_option("--out", g.out_dir, "output directory (overrides the config)");
    app.add_flag("--json", g.as_json, "machine-readable output on stdout");
    app.add_flag("--gnuplot", g.gnuplot, "also write gnuplot scripts next to CSV files");

    auto* crit = app.add_subcommand("critical", "critical speed and carrier wavenumber");
    auto* spec = app.add_subcommand("spectrum", "roots of the dispersion function in a box");
    double c2 = 0.0;
    std::optional<double> re_max, im_max;
    std::optional<int> grid;
    spec->add_option("--c2", c2, "squared wave speed")->required();
    spec->add_option("--re-max", re_max, "half width of the box along Re");
    spec->add_option("--im-max", im_max, "half height of the box along Im");
    spec->add_option("--grid", grid, "Newton seeds per box side");
    auto* coeffs = app.add_subcommand("coeffs", "normal-form coefficients and sign condition");
    auto* solvec = app.add_subcommand("solve", "continuation of traveling-wave profiles");
    auto* sim = app.add_subcommand("simulate", "lattice run seeded with a solved profile");
    std::string profile_path;
    std::size_t snapshot_stride = 0;
    sim->add_option("--profile", profile_path, "profile JSON header written by 'solve'");
    sim->add_option("--snapshot-every", snapshot_stride, "write a binary snapshot every n records (0: never)");
    auto* ver = app.add_subcommand("verify", "run every acceptance check and write a report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (*crit) return cmd_critical(g);
        if (*spec) return cmd_spectrum(g, c2, re_max, im_max, grid);
        if (*coeffs) return cmd_coeffs(g);
        if (*solvec) return cmd_solve(g);
        if (*sim) return cmd_simulate(g, profile_path, snapshot_stride);
        if (*ver) return cmd_verify(g);
    } catch (const Error& e) {
        std::fprintf(stderr, "fpuwave: %s\n", e.what());
        return is_usage_error(e.kind()) ? kUsage : kNumericalFailure;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fpuwave: %s\n", e.what());
        return kNumericalFailure;
    }
    return kUsage;
}
