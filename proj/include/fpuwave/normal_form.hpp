#pragma once

#include "fpuwave/dispersion.hpp"
#include "fpuwave/potentials.hpp"

namespace fpuwave {

struct NormalFormCoeffs {
    double m2_v1v2 = 0.0;
    double m2_v2v2_im = 0.0;  // M2(V2,V2) = i * m2_v2v2_im
    double m3 = 0.0;
    double s_closed_form = 0.0;
    double s_effective = 0.0;
    bool sign_condition_ok = false;
    double nu1 = 1.0;
    double nu2 = 0.0;
    double gamma = 0.0;
};

double m2_v1v2(double k0, const PotentialSpec& spec);
double m2_v2v2_im(double k0, const PotentialSpec& spec);
double m3(double k0, const PotentialSpec& spec);

struct SCoefficient {
    double closed_form = 0.0;
    // Same expression with +3 M3, the sign for which s < 0 is the existence
    // condition and which matches the amplitude of the solved profiles.
    double effective = 0.0;
};

SCoefficient coefficient_s(const CriticalData& critical, const PotentialSpec& spec);
bool sign_condition(const CriticalData& critical, const PotentialSpec& spec);

struct NlsParams {
    double nu1 = 1.0;
    double nu2 = 0.0;
    double gamma = 0.0;
};

// Throws ExistenceConditionViolated when the sign condition fails.
NlsParams nls_params(const CriticalData& critical, const PotentialSpec& spec);

// All of the above in one record; never throws on the sign condition.
NormalFormCoeffs compute_normal_form(const CriticalData& critical, const PotentialSpec& spec);

}  // namespace fpuwave
