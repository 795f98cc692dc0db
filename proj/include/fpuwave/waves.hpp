#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fpuwave/dispersion.hpp"
#include "fpuwave/lattice.hpp"
#include "fpuwave/normal_form.hpp"

namespace fpuwave {

struct ProfileSolution;

struct WaveAnsatz {
    double epsilon = 0.0;
    double c = 0.0;
    double theta = 0.0;
    double r_coeff = 0.0;
    double amplitude_scale = 0.0;  // sqrt(2 s0 / -s)
    double width = 0.0;            // sqrt(s0)
    // Carried along so the profile can be evaluated on its own.
    double k0 = 0.0;
    double s0 = 0.0;
    double p0 = 0.0;
    double s_effective = 0.0;

    void validate() const;
};

// c = c* + epsilon^2, with s0 and p0 from the root unfolding.
WaveAnsatz make_ansatz(double epsilon, const CriticalData& critical, const NormalFormCoeffs& coeffs,
                       double theta = 0.0, double r_coeff = 0.0);

double nls_soliton(double X, double gamma, double nu1, double nu2);

struct EnvelopePhase {
    double r0 = 0.0;
    double psi0 = 0.0;
};

EnvelopePhase r0_psi0(double xi, const WaveAnsatz& ansatz);
double truncated_nf_residual(const WaveAnsatz& ansatz, std::span<const double> grid);

double leading_profile(double xi, const WaveAnsatz& ansatz);
double leading_profile_derivative(double xi, const WaveAnsatz& ansatz);

struct ProfileFunction {
    std::function<double(double)> value;
    std::function<double(double)> derivative;
};

ProfileFunction ansatz_profile(const WaveAnsatz& ansatz);

// q_n = v(n - x0), p_n = -c v'(n - x0).
LatticeState lattice_initial_data(const ProfileFunction& profile, double c, std::size_t n_sites, double x0);
// Solved profiles: offsets n - x0 are wrapped on the ring and sites farther
// than L/2 from the centre sit at the tail level. DomainTooSmall when the part
// of the pulse cut off by the window or by the ring is not negligible.
LatticeState lattice_initial_data(const ProfileSolution& profile, std::size_t n_sites, double x0);

double nls_error(std::span<const double> xi, std::span<const double> v, double epsilon,
                 const CriticalData& critical, const NormalFormCoeffs& coeffs);
double nls_error(const ProfileSolution& profile, const CriticalData& critical, const NormalFormCoeffs& coeffs);

}  // namespace fpuwave
