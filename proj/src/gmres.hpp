#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace fpuwave::detail {

struct GmresResult {
    bool converged = false;
    int iterations = 0;
    double relative_residual = 0.0;
};

using LinearOp = std::function<void(std::span<const double>, std::span<double>)>;

// Restarted GMRES with right preconditioning: solves A x = b through
// A M^{-1} y = b, x = M^{-1} y. x holds the initial guess on entry.
inline GmresResult gmres(const LinearOp& A, const LinearOp& Minv, std::span<const double> b,
                         std::span<double> x, double rtol, int restart, int max_restarts) {
    const std::size_t n = b.size();
    auto dot = [n](std::span<const double> u, std::span<const double> v) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += u[i] * v[i];
        return s;
    };
    auto norm = [&](std::span<const double> u) { return std::sqrt(dot(u, u)); };

    GmresResult res;
    const double bnorm = norm(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        res.converged = true;
        return res;
    }

    std::vector<double> r(n), w(n), z(n);
    std::vector<std::vector<double>> V(restart + 1, std::vector<double>(n));
    std::vector<std::vector<double>> H(restart + 1, std::vector<double>(restart, 0.0));
    std::vector<double> cs(restart), sn(restart), g(restart + 1);

    for (int cycle = 0; cycle <= max_restarts; ++cycle) {
        A(x, w);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
        double beta = norm(r);
        res.relative_residual = beta / bnorm;
        if (res.relative_residual <= rtol) {
            res.converged = true;
            return res;
        }
        for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / beta;
        std::fill(g.begin(), g.end(), 0.0);
        g[0] = beta;
        int k = 0;
        for (; k < restart; ++k) {
            Minv(V[k], z);
            A(z, w);
            for (int i = 0; i <= k; ++i) {
                H[i][k] = dot(w, V[i]);
                for (std::size_t l = 0; l < n; ++l) w[l] -= H[i][k] * V[i][l];
            }
            H[k + 1][k] = norm(w);
            if (H[k + 1][k] > 0.0)
                for (std::size_t l = 0; l < n; ++l) V[k + 1][l] = w[l] / H[k + 1][k];
            for (int i = 0; i < k; ++i) {
                const double t = cs[i] * H[i][k] + sn[i] * H[i + 1][k];
                H[i + 1][k] = -sn[i] * H[i][k] + cs[i] * H[i + 1][k];
                H[i][k] = t;
            }
            const double d = std::hypot(H[k][k], H[k + 1][k]);
            cs[k] = d == 0.0 ? 1.0 : H[k][k] / d;
            sn[k] = d == 0.0 ? 0.0 : H[k + 1][k] / d;
            H[k][k] = d;
            H[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            ++res.iterations;
            res.relative_residual = std::abs(g[k + 1]) / bnorm;
            if (res.relative_residual <= rtol || H[k][k] == 0.0) {
                ++k;
                break;
            }
        }
        // Back substitution and update x += M^{-1} V y.
        std::vector<double> y(k);
        for (int i = k - 1; i >= 0; --i) {
            double s = g[i];
            for (int j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
            y[i] = H[i][i] == 0.0 ? 0.0 : s / H[i][i];
        }
        std::fill(w.begin(), w.end(), 0.0);
        for (int j = 0; j < k; ++j)
            for (std::size_t l = 0; l < n; ++l) w[l] += y[j] * V[j][l];
        Minv(w, z);
        for (std::size_t l = 0; l < n; ++l) x[l] += z[l];
        if (res.relative_residual <= rtol) {
            A(x, w);
            for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
            res.relative_residual = norm(r) / bnorm;
            res.converged = res.relative_residual <= 10.0 * rtol;
            if (res.converged) return res;
        }
    }
    return res;
}

}  // namespace fpuwave::detail
