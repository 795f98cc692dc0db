#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "fpuwave/potentials.hpp"

namespace fpuwave {

struct ProfileSolution;

struct LatticeState {
    std::vector<double> q;
    std::vector<double> p;
    double t = 0.0;

    std::size_t n_sites() const { return q.size(); }
    void validate() const;
};

// Periodic ring, interaction range two.
void forces(std::span<const double> q, const PotentialSpec& spec, std::span<double> out);
std::vector<double> forces(std::span<const double> q, const PotentialSpec& spec);

// Velocity Verlet; negative dt integrates backwards.
LatticeState step_verlet(const LatticeState& state, double dt, const PotentialSpec& spec);

double energy(const LatticeState& state, const PotentialSpec& spec);
double momentum(const LatticeState& state);

struct ShapeFit {
    double error = 0.0;  // max_n |q_n - v(n - shift)| / max|v|
    double shift = 0.0;
};

// Compares a chain state against a solved profile translated by a continuous
// shift. With a hint, only shifts within `search` sites of it are scanned.
ShapeFit shape_error(const LatticeState& state, const ProfileSolution& profile, double c,
                     std::optional<double> hint = std::nullopt, double search = 8.0);

struct TrajectoryRecord {
    double t = 0.0;
    double energy = 0.0;
    double momentum = 0.0;
    double shape_error = 0.0;  // NaN when no profile is tracked
    double shift = 0.0;        // unwrapped, NaN when no profile is tracked
};

struct RunOptions {
    std::size_t stride = 200;  // steps between records
    const ProfileSolution* profile = nullptr;
    double initial_shift = 0.0;  // where the profile centre sits at t = 0
    double blowup = 1e6;
    std::function<void(const LatticeState&)> observer;  // called at each record
};

struct RunResult {
    LatticeState final_state;
    std::vector<TrajectoryRecord> records;
    std::size_t steps = 0;
};

RunResult run(const LatticeState& initial, double T, double dt, const PotentialSpec& spec,
              const RunOptions& options = {});

// Least-squares slope of shift against time.
double fitted_speed(std::span<const TrajectoryRecord> records);

// max_t |H(t) - H(0)| / |H(0)| over the records.
double relative_energy_drift(std::span<const TrajectoryRecord> records);

}  // namespace fpuwave
