#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "fpuwave/dispersion.hpp"
#include "fpuwave/normal_form.hpp"
#include "fpuwave/potentials.hpp"
#include "fpuwave/waves.hpp"

namespace fpuwave {

struct SolverConfig {
    double newton_tol = 1e-10;
    int max_newton = 25;
    int max_halvings = 8;
    // Grid spacing is 1/points_per_unit so lattice shifts are index rolls.
    int points_per_unit = 4;
    double tail_factor = 60.0;  // L >= tail_factor / width
    double min_window = 64.0;
    std::size_t n_modes = 0;  // 0 selects from the window policy
    std::size_t dense_max = 1024;
    double gmres_rtol = 1e-12;
    int gmres_restart = 120;
    int gmres_max_restarts = 20;
    double cond_limit = 1e12;
    double tail_ratio = 1e-8;
    double theta = 0.0;
    bool seeded_continuation = true;
    bool parallel = false;  // only honoured when seeding is off
};

struct ProfileSolution {
    double epsilon = 0.0;
    double c = 0.0;
    double domain_length = 0.0;
    std::size_t n_modes = 0;
    std::vector<double> v;
    double residual_norm = 0.0;
    double first_integral_drift = 0.0;
    double symmetry_defect = 0.0;
    int newton_iterations = 0;
    std::vector<double> residual_history;
    double tail_ratio = 0.0;
    bool least_squares_used = false;
    WaveAnsatz ansatz;
    PotentialSpec potential;

    double dx() const { return domain_length / static_cast<double>(n_modes); }
    double xi(std::size_t j) const { return -0.5 * domain_length + static_cast<double>(j) * dx(); }
    std::vector<double> grid() const;
};

struct WindowPlan {
    double length = 0.0;
    std::size_t n_modes = 0;
};

WindowPlan plan_window(double width, const SolverConfig& config);

// c^2 v'' - [W1'(v(.+1)-v) - W1'(v-v(.-1)) + W2'(v(.+2)-v) - W2'(v-v(.-2))]
std::vector<double> residual(std::span<const double> v, double c, double L, const PotentialSpec& spec);

ProfileSolution solve(double epsilon, const CriticalData& critical, const NormalFormCoeffs& coeffs,
                      const PotentialSpec& spec, const SolverConfig& config = {});

// Newton from an explicit initial guess on the grid implied by its length.
// The translation phase condition is taken against `reference` (the guess
// itself when empty).
ProfileSolution solve_from(std::vector<double> guess, double epsilon, const CriticalData& critical,
                           const NormalFormCoeffs& coeffs, const PotentialSpec& spec, double L,
                           const SolverConfig& config = {}, std::span<const double> reference = {});

std::vector<ProfileSolution> continuation(std::span<const double> eps_list, const CriticalData& critical,
                                          const NormalFormCoeffs& coeffs, const PotentialSpec& spec,
                                          const SolverConfig& config = {});

struct FirstIntegral {
    std::vector<double> values;
    double drift = 0.0;
};

FirstIntegral first_integral(const ProfileSolution& sol, std::span<const double> xi_samples);
// Samples spread over the pulse core and the interior of the window.
std::vector<double> default_integral_samples(const ProfileSolution& sol);

double symmetry_defect(const ProfileSolution& sol);
double tail_ratio(const ProfileSolution& sol);

std::pair<double, double> chi_diagnostics(const ProfileSolution& sol, double xi);

}  // namespace fpuwave
