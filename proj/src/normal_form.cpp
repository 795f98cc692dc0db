#include "fpuwave/normal_form.hpp"

#include <cmath>

#include "fpuwave/errors.hpp"

namespace fpuwave {

namespace {

double pow4(double x) { return x * x * x * x; }

// The two quadratic contributions to s; both are <= 0 for any a1, a2.
double quadratic_part(const CriticalData& cr, const PotentialSpec& spec) {
    const double mv = m2_v1v2(cr.k0, spec);
    const double mi = m2_v2v2_im(cr.k0, spec);
    const double c2 = cr.c_star * cr.c_star;
    // M2(V2,V2)^2 = (i mi)^2 = -mi^2
    return 4.0 * mv * mv / (1.0 - c2) - 2.0 * (-mi * mi) / cr.sigma_2ik0;
}

}  // namespace

double m2_v1v2(double k0, const PotentialSpec& s) {
    return 2.0 * (s.a1 * (std::cos(k0) - 1.0) + 2.0 * s.a2 * (std::cos(2.0 * k0) - 1.0)) + 0.0;
}

double m2_v2v2_im(double k0, const PotentialSpec& s) {
    return 4.0 * (s.a1 * std::sin(k0) * (std::cos(k0) - 1.0) +
                  s.a2 * std::sin(2.0 * k0) * (std::cos(2.0 * k0) - 1.0));
}

double m3(double k0, const PotentialSpec& s) {
    return -16.0 * (s.b1 * pow4(std::sin(0.5 * k0)) + s.b2 * pow4(std::sin(k0)));
}

SCoefficient coefficient_s(const CriticalData& cr, const PotentialSpec& spec) {
    const double q = quadratic_part(cr, spec);
    const double c3 = 3.0 * m3(cr.k0, spec);
    return {2.0 / cr.d2_sigma * (q - c3), 2.0 / cr.d2_sigma * (q + c3)};
}

bool sign_condition(const CriticalData& cr, const PotentialSpec& spec) {
    const double rhs = 48.0 * (spec.b1 * pow4(std::sin(0.5 * cr.k0)) + spec.b2 * pow4(std::sin(cr.k0)));
    return quadratic_part(cr, spec) < rhs;
}

NlsParams nls_params(const CriticalData& cr, const PotentialSpec& spec) {
    if (!sign_condition(cr, spec))
        throw Error(ErrorKind::ExistenceConditionViolated,
                    "sign condition fails: the cubic normal-form coefficient is not negative");
    return {1.0, -coefficient_s(cr, spec).effective, cr.s0_prime};
}

NormalFormCoeffs compute_normal_form(const CriticalData& cr, const PotentialSpec& spec) {
    NormalFormCoeffs n;
    n.m2_v1v2 = m2_v1v2(cr.k0, spec);
    n.m2_v2v2_im = m2_v2v2_im(cr.k0, spec);
    n.m3 = m3(cr.k0, spec);
    const SCoefficient s = coefficient_s(cr, spec);
    n.s_closed_form = s.closed_form;
    n.s_effective = s.effective;
    n.sign_condition_ok = sign_condition(cr, spec);
    n.nu1 = 1.0;
    n.nu2 = -s.effective;
    n.gamma = cr.s0_prime;
    return n;
}

}  // namespace fpuwave
