#pragma once

namespace fpuwave {

// W1'(r) = 5r + a1 r^2 + b1 r^3 (attracting nearest neighbours),
// W2'(r) = -r + a2 r^2 + b2 r^3 (repelling next-nearest neighbours).
struct PotentialSpec {
    double a1 = 0.0;
    double a2 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;

    bool is_even() const { return a1 == 0.0 && a2 == 0.0; }
    void validate() const;
    bool operator==(const PotentialSpec&) const = default;
};

double w1_prime(double r, const PotentialSpec& spec);
double w2_prime(double r, const PotentialSpec& spec);
double w1(double r, const PotentialSpec& spec);
double w2(double r, const PotentialSpec& spec);
double n1(double r, const PotentialSpec& spec);
double n2(double r, const PotentialSpec& spec);

// Derivatives of the force laws, used by the Newton Jacobian.
double w1_second(double r, const PotentialSpec& spec);
double w2_second(double r, const PotentialSpec& spec);

}  // namespace fpuwave
