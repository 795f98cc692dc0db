#include "fpuwave/potentials.hpp"

#include <cmath>

#include "fpuwave/errors.hpp"

namespace fpuwave {

void PotentialSpec::validate() const {
    if (!std::isfinite(a1) || !std::isfinite(a2) || !std::isfinite(b1) || !std::isfinite(b2))
        throw Error(ErrorKind::InvalidArgument, "potential coefficients must be finite");
}


double w1(double r, const PotentialSpec& s) {
    return r * r * (2.5 + r * (s.a1 / 3.0 + r * s.b1 / 4.0));
}
double w2(double r, const PotentialSpec& s) {
    return r * r * (-0.5 + r * (s.a2 / 3.0 + r * s.b2 / 4.0));
}

double n1(double r, const PotentialSpec& s) { return r * r * (s.a1 + r * s.b1); }
double n2(double r, const PotentialSpec& s) { return r * r * (s.a2 + r * s.b2); }

// Written as linear part plus remainder so the n1/n2 identity holds bitwise.
double w1_prime(double r, const PotentialSpec& s) { return 5.0 * r + n1(r, s); }
double w2_prime(double r, const PotentialSpec& s) { return -r + n2(r, s); }

double w1_second(double r, const PotentialSpec& s) { return 5.0 + r * (2.0 * s.a1 + 3.0 * r * s.b1); }
double w2_second(double r, const PotentialSpec& s) { return -1.0 + r * (2.0 * s.a2 + 3.0 * r * s.b2); }

}  // namespace fpuwave
