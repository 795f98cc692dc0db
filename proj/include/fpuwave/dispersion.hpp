#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace fpuwave {

using cplx = std::complex<double>;

struct CriticalData {
    double c_star = 0.0;
    double k0 = 0.0;
    double d2_sigma = 0.0;
    double sigma_2ik0 = 0.0;
    double s0_prime = 0.0;
    double p0_prime = 0.0;

    void validate(double tol = 1e-10) const;
};

double omega_sq(double k);
cplx sigma(cplx lambda, double c);
cplx sigma_dlambda(cplx lambda, double c);
double f_c(double k, double c);
double f_c_dk(double k, double c);
double f_c_dkk(double k, double c);

struct CriticalOptions {
    double c2_min = 2.0;
    double c2_max = 3.5;
    double c2_step = 0.01;
    double k_min = 0.5;
    double k_step = 1e-3;
    double newton_tol = 1e-12;
    int max_iter = 50;
};

CriticalData find_critical(const CriticalOptions& opt = {});

struct UnfoldOptions {
    // Newton from the Cor.-style predictor is trusted for |c - c*| below this.
    double radius = 0.05;
    double tol = 1e-13;
    int max_iter = 60;
};

struct Unfolding {
    double s0 = 0.0;
    double p0 = 0.0;
    cplx lambda_plus;
};

Unfolding unfold(double c, const CriticalData& critical, const UnfoldOptions& opt = {});

struct SearchBox {
    double re_max = 0.5;
    double im_max = 3.0;
};

struct Root {
    cplx value;
    int multiplicity = 1;
    double residual = 0.0;
};

struct RootOptions {
    double dedup_tol = 1e-8;
    double residual_tol = 1e-10;
    double pair_tol = 1e-4;
    double contour_clearance = 1e-6;
    int max_iter = 60;
};

struct EigenvalueSet {
    double c = 0.0;
    SearchBox box;
    std::vector<Root> roots;  // sorted by (Im, Re)
    int winding_number = 0;   // argument-principle count inside the box

    int count_with_multiplicity() const;
    std::vector<Root> purely_imaginary_nonzero(double tol = 1e-8) const;
};

EigenvalueSet neutral_eigenvalues(double c, SearchBox box, int grid = 64,
                                  const RootOptions& opt = {});

// Number of zeros (with multiplicity) of sigma(.;c) inside the box, from the
// winding number of sigma along the boundary.
int argument_principle_count(double c, SearchBox box, double clearance = 1e-6);

// Pairs of distinct roots closer than tol.
std::vector<std::pair<Root, Root>> clustered_pairs(const EigenvalueSet& set, double tol);

// Gap between the two roots nearest to target (infinity if fewer than two).
double pair_gap_near(const EigenvalueSet& set, cplx target);

// Samples of U on [-2, 2]: values[j] = U(-2 + j/m), j = 0..4m.
struct WindowSamples {
    std::vector<double> values;
    int per_unit = 0;

    static WindowSamples from(int per_unit, auto&& fn) {
        WindowSamples w;
        w.per_unit = per_unit;
        w.values.resize(4 * per_unit + 1);
        for (int j = 0; j <= 4 * per_unit; ++j)
            w.values[j] = fn(-2.0 + static_cast<double>(j) / per_unit);
        return w;
    }
};

double chi0(double z, double y, const WindowSamples& U, double c);
double chi1(double z, double y, const WindowSamples& U, double c);

// Composite Simpson on uniform samples; the sample count must be odd.
double simpson(std::span<const double> f, double h);

}  // namespace fpuwave
