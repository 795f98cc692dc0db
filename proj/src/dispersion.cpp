#include "fpuwave/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "fpuwave/errors.hpp"

namespace fpuwave {

namespace {

constexpr double pi = std::numbers::pi;

// sigma(lambda)/lambda^2, regular at 0 where it equals c^2 - 1. Used for the
// root search so the permanent double root at the origin does not attract
// Newton iterates.
cplx sigma_reduced(cplx l, double c) {
    if (std::abs(l) < 1e-3) {
        // Taylor: -10(cosh l - 1) + 2(cosh 2l - 1) = l^2 + (6/24) l^4 + (54/720) l^6 + (246/40320) l^8
        const cplx l2 = l * l;
        return c * c - 1.0 + l2 * (6.0 / 24.0 + l2 * (54.0 / 720.0 + l2 * (246.0 / 40320.0)));
    }
    return sigma(l, c) / (l * l);
}

cplx sigma_reduced_d(cplx l, double c) {
    if (std::abs(l) < 1e-3) {
        const cplx l2 = l * l;
        return l * (12.0 / 24.0 + l2 * (4.0 * 54.0 / 720.0 + l2 * (6.0 * 246.0 / 40320.0)));
    }
    return (sigma_dlambda(l, c) * l - 2.0 * sigma(l, c)) / (l * l * l);
}

std::string fmt_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

double max_over_k(double c, double k_min, double k_step, double* argmax) {
    double best = -std::numeric_limits<double>::infinity();
    for (double k = k_min; k <= pi; k += k_step) {
        const double f = f_c(k, c);
        if (f > best) {
            best = f;
            if (argmax) *argmax = k;
        }
    }
    return best;
}

}  // namespace

double omega_sq(double k) { return 10.0 * (1.0 - std::cos(k)) - 2.0 * (1.0 - std::cos(2.0 * k)); }

cplx sigma(cplx l, double c) {
    return c * c * l * l - 10.0 * (std::cosh(l) - 1.0) + 2.0 * (std::cosh(2.0 * l) - 1.0);
}

cplx sigma_dlambda(cplx l, double c) {
    return 2.0 * c * c * l - 10.0 * std::sinh(l) + 4.0 * std::sinh(2.0 * l);
}

double f_c(double k, double c) { return -c * c * k * k + 8.0 - 10.0 * std::cos(k) + 2.0 * std::cos(2.0 * k); }
double f_c_dk(double k, double c) { return -2.0 * c * c * k + 10.0 * std::sin(k) - 4.0 * std::sin(2.0 * k); }
double f_c_dkk(double k, double c) { return -2.0 * c * c + 10.0 * std::cos(k) - 8.0 * std::cos(2.0 * k); }

void CriticalData::validate(double tol) const {
    auto fail = [](const std::string& m) { throw Error(ErrorKind::InvalidArgument, "critical data: " + m); };
    if (!(c_star > 1.0)) fail("c_star must exceed 1");
    if (!(k0 > 0.0 && k0 < pi)) fail("k0 must lie in (0, pi)");
    if (!(d2_sigma > 0.0)) fail("d2_sigma must be positive");
    if (!(sigma_2ik0 < 0.0)) fail("sigma_2ik0 must be negative");
    if (!(s0_prime > 0.0)) fail("s0_prime must be positive");
    if (std::abs(f_c(k0, c_star)) > tol || std::abs(f_c_dk(k0, c_star)) > tol)
        fail("(c_star, k0) is not a tangency point");
}

CriticalData find_critical(const CriticalOptions& opt) {
    // Coarse scan: the largest local value of f_c on (k_min, pi) changes sign
    // from positive to negative as c^2 crosses c*^2.
    double prev_c2 = opt.c2_min;
    double prev_max = max_over_k(std::sqrt(prev_c2), opt.k_min, opt.k_step, nullptr);
    double c2_guess = std::numeric_limits<double>::quiet_NaN();
    for (double c2 = opt.c2_min + opt.c2_step; c2 <= opt.c2_max + 1e-12; c2 += opt.c2_step) {
        const double m = max_over_k(std::sqrt(c2), opt.k_min, opt.k_step, nullptr);
        if (prev_max > 0.0 && m <= 0.0) {
            c2_guess = prev_c2 + (c2 - prev_c2) * prev_max / (prev_max - m);
            break;
        }
        prev_c2 = c2;
        prev_max = m;
    }
    if (std::isnan(c2_guess))
        throw Error(ErrorKind::BracketFailure, "no sign change of max f_c on the c^2 scan");

    double c = std::sqrt(c2_guess);
    double k = 0.0;
    max_over_k(c, opt.k_min, opt.k_step, &k);

    double res = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opt.max_iter; ++it) {
        const double F1 = f_c(k, c), F2 = f_c_dk(k, c);
        res = std::max(std::abs(F1), std::abs(F2));
        const double J11 = -2.0 * c * k * k, J12 = F2;
        const double J21 = -4.0 * c * k, J22 = f_c_dkk(k, c);
        const double det = J11 * J22 - J12 * J21;
        if (det == 0.0) break;
        const double dc = (F1 * J22 - F2 * J12) / det;
        const double dk = (J11 * F2 - J21 * F1) / det;
        c -= dc;
        k -= dk;
        if (std::abs(dc) + std::abs(dk) < 1e-15 && res < opt.newton_tol) break;
    }
    res = std::max(std::abs(f_c(k, c)), std::abs(f_c_dk(k, c)));
    if (!(res <= opt.newton_tol))
        throw Error(ErrorKind::NoConvergence, "tangency Newton residual " + fmt_num(res));

    CriticalData out;
    out.c_star = c;
    out.k0 = k;
    out.d2_sigma = 2.0 * c * c - 10.0 * std::cos(k) + 8.0 * std::cos(2.0 * k);
    out.sigma_2ik0 = f_c(2.0 * k, c);
    out.s0_prime = 4.0 * c * k * k / out.d2_sigma;
    out.p0_prime = -4.0 * c * k / out.d2_sigma;
    return out;
}

Unfolding unfold(double c, const CriticalData& cr, const UnfoldOptions& opt) {
    const double dc = c - cr.c_star;
    if (std::abs(dc) > opt.radius)
        throw Error(ErrorKind::InvalidArgument, "unfold: |c - c*| = " + fmt_num(std::abs(dc)) +
                                                    " exceeds the configured radius");
    // Drift of Im(lambda) along the root locus. The third lambda-derivative of
    // sigma enters at the same order as the mixed one and nearly cancels it,
    // so p0_prime alone overshoots the drift by three orders of magnitude.
    const double k0 = cr.k0;
    const double d3 = -10.0 * std::sin(k0) + 16.0 * std::sin(2.0 * k0);
    const double drift = -(4.0 * cr.c_star * k0 + cr.s0_prime * d3 / 6.0) / cr.d2_sigma;
    Unfolding u;
    if (dc == 0.0) {
        u.lambda_plus = cplx(0.0, cr.k0);
        return u;
    }
    if (dc > 0.0) {
        cplx l(std::sqrt(cr.s0_prime * dc), cr.k0 + drift * dc);
        bool done = false;
        for (int it = 0; it < opt.max_iter; ++it) {
            const cplx step = sigma(l, c) / sigma_dlambda(l, c);
            l -= step;
            if (std::abs(step) < opt.tol * std::abs(l)) {
                done = true;
                break;
            }
        }
        if (!done || std::abs(sigma(l, c)) > 1e-10)
            throw Error(ErrorKind::NoConvergence, "unfold: complex Newton failed at c = " + fmt_num(c));
        if (l.real() < 0.0) l = -std::conj(l);
        u.lambda_plus = l;
        u.s0 = l.real() * l.real();
        u.p0 = l.imag() - cr.k0;
        return u;
    }
    // Subsonic side: two simple imaginary roots i(k0 + p0 +- offset).
    const double off = std::sqrt(-cr.s0_prime * dc);
    double ks[2];
    for (int side = 0; side < 2; ++side) {
        double k = cr.k0 + drift * dc + (side == 0 ? off : -off);
        bool done = false;
        for (int it = 0; it < opt.max_iter; ++it) {
            const double step = f_c(k, c) / f_c_dk(k, c);
            k -= step;
            if (std::abs(step) < opt.tol * std::abs(k)) {
                done = true;
                break;
            }
        }
        if (!done) throw Error(ErrorKind::NoConvergence, "unfold: real Newton failed at c = " + fmt_num(c));
        ks[side] = k;
    }
    const double hi = std::max(ks[0], ks[1]), lo = std::min(ks[0], ks[1]);
    if (hi - lo < 1e-14)
        throw Error(ErrorKind::NoConvergence, "unfold: imaginary roots merged at c = " + fmt_num(c));
    const double half = 0.5 * (hi - lo);
    u.s0 = -half * half;
    u.p0 = 0.5 * (hi + lo) - cr.k0;
    u.lambda_plus = cplx(0.0, hi);
    return u;
}

int EigenvalueSet::count_with_multiplicity() const {
    int n = 0;
    for (const auto& r : roots) n += r.multiplicity;
    return n;
}

std::vector<Root> EigenvalueSet::purely_imaginary_nonzero(double tol) const {
    std::vector<Root> out;
    for (const auto& r : roots)
        if (std::abs(r.value.real()) < tol && std::abs(r.value) > tol) out.push_back(r);
    return out;
}

namespace {

// Winding number of sigma along a closed polygon, with adaptive refinement so
// no single step turns the argument by more than pi/4.
double winding(const std::vector<cplx>& corners, double c, double clearance) {
    double total = 0.0;
    for (std::size_t e = 0; e < corners.size(); ++e) {
        const cplx a = corners[e], b = corners[(e + 1) % corners.size()];
        struct Seg { double t0, t1; cplx f0, f1; };
        std::vector<Seg> stack;
        auto at = [&](double t) { return a + (b - a) * t; };
        auto value = [&](double t) {
            const cplx l = at(t);
            const cplx f = sigma(l, c);
            const cplx df = sigma_dlambda(l, c);
            if (std::abs(f) <= clearance * std::abs(df))
                throw Error(ErrorKind::ContourThroughRoot,
                            "contour passes within clearance of a root near (" + fmt_num(l.real()) +
                                ", " + fmt_num(l.imag()) + ")");
            return f;
        };
        const int n0 = 64;
        std::vector<cplx> f(n0 + 1);
        for (int i = 0; i <= n0; ++i) f[i] = value(static_cast<double>(i) / n0);
        for (int i = n0 - 1; i >= 0; --i)
            stack.push_back({static_cast<double>(i) / n0, static_cast<double>(i + 1) / n0, f[i], f[i + 1]});
        while (!stack.empty()) {
            Seg s = stack.back();
            stack.pop_back();
            const double d = std::arg(s.f1 / s.f0);
            if (std::abs(d) > pi / 4.0 && s.t1 - s.t0 > 1e-12) {
                const double tm = 0.5 * (s.t0 + s.t1);
                const cplx fm = value(tm);
                stack.push_back({tm, s.t1, fm, s.f1});
                stack.push_back({s.t0, tm, s.f0, fm});
                continue;
            }
            total += d;
        }
    }
    return total / (2.0 * pi);
}

int count_in_circle(cplx center, double radius, double c) {
    std::vector<cplx> poly;
    const int n = 64;
    for (int i = 0; i < n; ++i) poly.push_back(center + std::polar(radius, 2.0 * pi * i / n));
    return static_cast<int>(std::lround(winding(poly, c, 0.0)));
}

bool inside(cplx l, const SearchBox& b) {
    return std::abs(l.real()) <= b.re_max && std::abs(l.imag()) <= b.im_max;
}

}  // namespace

int argument_principle_count(double c, SearchBox box, double clearance) {
    if (!(box.re_max > 0.0) || !(box.im_max > 0.0))
        throw Error(ErrorKind::InvalidArgument, "search box dimensions must be positive");
    const std::vector<cplx> corners = {{-box.re_max, -box.im_max},
                                       {box.re_max, -box.im_max},
                                       {box.re_max, box.im_max},
                                       {-box.re_max, box.im_max}};
    const double w = winding(corners, c, clearance);
    const long n = std::lround(w);
    if (std::abs(w - static_cast<double>(n)) > 0.1)
        throw Error(ErrorKind::NoConvergence, "argument principle: non-integer winding " + fmt_num(w));
    return static_cast<int>(n);
}

EigenvalueSet neutral_eigenvalues(double c, SearchBox box, int grid, const RootOptions& opt) {
    if (!(box.re_max > 0.0) || !(box.im_max > 0.0) || !std::isfinite(box.re_max) ||
        !std::isfinite(box.im_max))
        throw Error(ErrorKind::InvalidArgument, "search box dimensions must be positive");
    if (grid < 2) throw Error(ErrorKind::InvalidArgument, "seed grid must be at least 2");

    // Seeds cover a slightly enlarged box so roots near the edges are reached.
    std::vector<cplx> found;
    const double re_span = 1.2 * box.re_max, im_span = 1.05 * box.im_max;
    for (int i = 0; i < grid; ++i) {
        for (int j = 0; j < grid; ++j) {
            cplx l(-re_span + 2.0 * re_span * (i + 0.5) / grid, -im_span + 2.0 * im_span * (j + 0.5) / grid);
            bool ok = false;
            for (int it = 0; it < opt.max_iter; ++it) {
                const cplx d = sigma_reduced_d(l, c);
                if (d == 0.0) break;
                const cplx step = sigma_reduced(l, c) / d;
                l -= step;
                if (!std::isfinite(l.real()) || !std::isfinite(l.imag()) || std::abs(l) > 50.0) break;
                if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(l))) {
                    ok = true;
                    break;
                }
            }
            if (!ok) {
                // Double roots converge linearly; accept if the residual is small.
                ok = std::isfinite(l.real()) && std::abs(sigma(l, c)) < opt.residual_tol;
            }
            if (ok && inside(l, box) && std::abs(sigma(l, c)) < opt.residual_tol) found.push_back(l);
        }
    }

    // Snap roots that sit on the imaginary axis onto it exactly.
    for (auto& l : found) {
        if (std::abs(l.real()) < 1e-6) {
            double k = l.imag();
            for (int it = 0; it < opt.max_iter; ++it) {
                const double d = f_c_dk(k, c);
                if (d == 0.0) break;
                const double step = f_c(k, c) / d;
                k -= step;
                if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(k))) break;
            }
            if (std::abs(f_c(k, c)) < opt.residual_tol && std::abs(k - l.imag()) < 1e-6) l = cplx(0.0, k);
        }
    }

    std::sort(found.begin(), found.end(), [](cplx a, cplx b) {
        return a.imag() != b.imag() ? a.imag() < b.imag() : a.real() < b.real();
    });
    std::vector<cplx> uniq;
    for (const auto& l : found) {
        bool dup = false;
        for (const auto& u : uniq)
            if (std::abs(u - l) < opt.dedup_tol) {
                dup = true;
                break;
            }
        if (!dup) uniq.push_back(l);
    }

    EigenvalueSet set;
    set.c = c;
    set.box = box;
    set.roots.push_back({cplx(0.0, 0.0), 2, 0.0});
    for (const auto& l : uniq) {
        if (std::abs(l) < 1e-6) continue;
        double nearest = std::abs(l);
        for (const auto& u : uniq)
            if (u != l) nearest = std::min(nearest, std::abs(u - l));
        const double radius = std::max(1e-7, std::min(1e-3, 0.4 * nearest));
        int m = 1;
        try {
            m = std::max(1, count_in_circle(l, radius, c));
        } catch (const Error&) {
            m = 1;
        }
        set.roots.push_back({l, m, std::abs(sigma(l, c))});
    }
    std::sort(set.roots.begin(), set.roots.end(), [](const Root& a, const Root& b) {
        return a.value.imag() != b.value.imag() ? a.value.imag() < b.value.imag()
                                                : a.value.real() < b.value.real();
    });
    set.winding_number = argument_principle_count(c, box, opt.contour_clearance);
    return set;
}

std::vector<std::pair<Root, Root>> clustered_pairs(const EigenvalueSet& set, double tol) {
    std::vector<std::pair<Root, Root>> out;
    for (std::size_t i = 0; i < set.roots.size(); ++i) {
        if (set.roots[i].multiplicity >= 2 && std::abs(set.roots[i].value) > tol)
            out.emplace_back(set.roots[i], set.roots[i]);
        for (std::size_t j = i + 1; j < set.roots.size(); ++j)
            if (std::abs(set.roots[i].value - set.roots[j].value) < tol)
                out.emplace_back(set.roots[i], set.roots[j]);
    }
    return out;
}

double pair_gap_near(const EigenvalueSet& set, cplx target) {
    std::vector<Root> r = set.roots;
    std::sort(r.begin(), r.end(), [&](const Root& a, const Root& b) {
        return std::abs(a.value - target) < std::abs(b.value - target);
    });
    if (r.empty()) return std::numeric_limits<double>::infinity();
    if (r[0].multiplicity >= 2) return 0.0;
    if (r.size() < 2) return std::numeric_limits<double>::infinity();
    return std::abs(r[0].value - r[1].value);
}

double simpson(std::span<const double> f, double h) {
    if (f.size() < 3 || f.size() % 2 == 0)
        throw Error(ErrorKind::InvalidArgument, "simpson needs an odd number of samples >= 3");
    double s = f.front() + f.back();
    for (std::size_t i = 1; i + 1 < f.size(); ++i) s += (i % 2 ? 4.0 : 2.0) * f[i];
    return s * h / 3.0;
}

namespace {

void check_window(const WindowSamples& U) {
    if (U.per_unit < 8)
        throw Error(ErrorKind::GridTooCoarse, "chi functionals need at least 9 nodes per unit interval");
    if (U.per_unit % 2 != 0)
        throw Error(ErrorKind::InvalidArgument, "chi functionals need an even number of intervals per unit");
    if (U.values.size() != static_cast<std::size_t>(4 * U.per_unit + 1))
        throw Error(ErrorKind::InvalidArgument, "window samples must cover [-2, 2]");
}

// Integral of weight(p) U(p) over [lo, hi] (integers in [-2, 2]), one Simpson
// panel set per unit interval so kinks at integers sit on nodes.
template <class Weight>
double weighted(const WindowSamples& U, int lo, int hi, Weight w) {
    const int m = U.per_unit;
    const double h = 1.0 / m;
    std::vector<double> g(m + 1);
    double total = 0.0;
    for (int a = lo; a < hi; ++a) {
        const double mid = a + 0.5;
        for (int j = 0; j <= m; ++j) {
            const double p = a + j * h;
            g[j] = w(p, mid) * U.values[(a + 2) * m + j];
        }
        total += simpson(g, h);
    }
    return total;
}

}  // namespace

double chi0(double z, double y, const WindowSamples& U, double c) {
    (void)y;
    check_window(U);
    const double i1 = weighted(U, -1, 1, [](double p, double) { return 1.0 - std::abs(p); });
    const double i2 = weighted(U, -2, 2, [](double p, double) { return 2.0 - std::abs(p); });
    return (c * c * z - 5.0 * i1 + i2) / (c * c - 1.0);
}

double chi1(double z, double y, const WindowSamples& U, double c) {
    (void)z;
    check_window(U);
    // The sign is taken from the panel midpoint so p = 0 belongs to both sides.
    auto sgn = [](double, double mid) { return mid > 0.0 ? 1.0 : -1.0; };
    const double i1 = weighted(U, -1, 1, sgn);
    const double i2 = weighted(U, -2, 2, sgn);
    return (c * c * y - 5.0 * i1 + i2) / (c * c - 1.0);
}

}  // namespace fpuwave
