#pragma once

#include "fpuwave/dispersion.hpp"
#include "fpuwave/normal_form.hpp"
#include "fpuwave/potentials.hpp"

namespace testing {

inline const fpuwave::CriticalData& critical() {
    static const fpuwave::CriticalData cr = fpuwave::find_critical();
    return cr;
}

inline const fpuwave::PotentialSpec& hardening() {
    static const fpuwave::PotentialSpec s{0.0, 0.0, 1.0, 1.0};
    return s;
}

inline const fpuwave::NormalFormCoeffs& coeffs() {
    static const fpuwave::NormalFormCoeffs nf = fpuwave::compute_normal_form(critical(), hardening());
    return nf;
}

}  // namespace testing
