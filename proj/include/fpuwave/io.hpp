#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fpuwave/bvp.hpp"
#include "fpuwave/dispersion.hpp"
#include "fpuwave/lattice.hpp"
#include "fpuwave/normal_form.hpp"
#include "fpuwave/potentials.hpp"

namespace fpuwave {

using json = nlohmann::json;

struct LatticeConfig {
    std::size_t n_sites = 2048;
    double dt = 0.005;
    double T = 50.0;
    double epsilon = 0.04;  // which continuation member seeds the chain
    double x0 = 600.0;      // initial profile centre on the chain
    std::size_t stride = 200;
};

struct SpectrumConfig {
    double re_max = 0.5;
    double im_max = 3.0;
    int grid = 64;
};

struct ExperimentConfig {
    PotentialSpec potential{0.0, 0.0, 1.0, 1.0};
    std::vector<double> epsilon_list{0.02, 0.04, 0.06, 0.08};
    SolverConfig solver;
    LatticeConfig lattice;
    SpectrumConfig spectrum;
    std::string output_dir = "out";
    std::uint64_t seed = 20240611;

    void validate() const;
};

// Numbers are written with 17 significant digits, object keys sorted.
std::string format_double(double x);
std::string dump_json(const json& j);

json to_json(const PotentialSpec& s);
PotentialSpec potential_from_json(const json& j);
json to_json(const CriticalData& c);
CriticalData critical_from_json(const json& j);
json to_json(const NormalFormCoeffs& n);
json to_json(const WaveAnsatz& a);
json to_json(const SolverConfig& s);
json to_json(const ExperimentConfig& c);

ExperimentConfig parse_config(const json& j);
ExperimentConfig load_config(const std::filesystem::path& path);

using EnvLookup = std::function<const char*(const char*)>;
// FPUWAVE_SOLVER_<KEY>, FPUWAVE_LATTICE_<KEY>, FPUWAVE_SPECTRUM_<KEY> with KEY
// the upper-cased config key, e.g. FPUWAVE_SOLVER_NEWTON_TOL.
void apply_env_overrides(ExperimentConfig& cfg, const EnvLookup& lookup);

// FNV-1a of the canonical JSON form, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

std::string eigenvalues_csv(const EigenvalueSet& set, const std::string& hash);
std::string profile_csv(const ProfileSolution& sol, const std::string& hash);
std::string trajectory_csv(std::span<const TrajectoryRecord> recs, const std::string& hash);
json profile_header(const ProfileSolution& sol, const std::string& payload, const std::string& hash);

// Reads a profile from its JSON header and the CSV payload it names.
ProfileSolution read_profile(const std::filesystem::path& header);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

// Binary (q, p) snapshot: "FPUSNAP1", uint64 n_sites, float64 t, 16-byte
// config hash, then q and p; all little-endian.
void write_snapshot(const std::filesystem::path& path, const LatticeState& s, const std::string& hash);
LatticeState read_snapshot(const std::filesystem::path& path, std::string* hash = nullptr);

std::string gnuplot_spectrum(const std::string& csv_name, const std::string& config_hash);
std::string gnuplot_profile(const std::string& csv_name, const std::string& config_hash);
std::string gnuplot_trajectory(const std::string& csv_name, const std::string& config_hash);

}  // namespace fpuwave
