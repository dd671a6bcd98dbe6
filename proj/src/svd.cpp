#include "semvox/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "semvox/error.hpp"
#include "semvox/rng.hpp"

namespace semvox::svd {

namespace {

double hypot2(double a, double b) { return std::sqrt(a * a + b * b); }

void sort_pairs_desc(std::vector<double>& w, Mat& z) {
    std::size_t n = w.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    std::vector<double> w2(n);
    Mat z2(z.rows(), n);
    for (std::size_t j = 0; j < n; ++j) {
        w2[j] = w[idx[j]];
        for (std::size_t i = 0; i < z.rows(); ++i) z2(i, j) = z(i, idx[j]);
    }
    w = std::move(w2);
    z = std::move(z2);
}

} // namespace

void sym_tridiag_eig(std::vector<double> d, std::vector<double> e,
                     std::vector<double>& eigenvalues, Mat& z) {
    const std::size_t n = d.size();
    e.resize(n, 0.0);
    z = Mat(n, n);
    for (std::size_t i = 0; i < n; ++i) z(i, i) = 1.0;
    if (n == 1) {
        eigenvalues = {d[0]};
        return;
    }

    // Implicit-shift QL with eigenvector accumulation (EISPACK tql2).
    for (std::size_t l = 0; l < n; ++l) {
        int iter = 0;
        std::size_t m;
        do {
            for (m = l; m + 1 < n; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 2.3e-16 * dd + 1e-300) break;
            }
            if (m != l) {
                if (++iter > 50) {
                    throw NumericalError("tridiagonal QL failed to converge",
                                         std::abs(e[l]));
                }
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = hypot2(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                bool underflow = false;
                for (std::size_t i = m; i-- > l;) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = hypot2(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    for (std::size_t row = 0; row < n; ++row) {
                        f = z(row, i + 1);
                        z(row, i + 1) = s * z(row, i) + c * f;
                        z(row, i) = c * z(row, i) - s * f;
                    }
                }
                if (underflow) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }

    eigenvalues = std::move(d);
    sort_pairs_desc(eigenvalues, z);
}

void jacobi_eigh(Mat a, std::vector<double>& eigenvalues, Mat& z) {
    const std::size_t n = a.rows();
    z = Mat(n, n);
    for (std::size_t i = 0; i < n; ++i) z(i, i) = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        }
        double scale = 1e-300;
        for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(a(i, i)));
        if (std::sqrt(off) <= 1e-15 * scale) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a(p, q);
                if (std::abs(apq) <= 1e-18 * scale) continue;
                double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t = std::copysign(1.0, theta) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;

                for (std::size_t i = 0; i < n; ++i) {
                    double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double api = a(p, i), aqi = a(q, i);
                    a(p, i) = c * api - s * aqi;
                    a(q, i) = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double zip = z(i, p), ziq = z(i, q);
                    z(i, p) = c * zip - s * ziq;
                    z(i, q) = s * zip + c * ziq;
                }
            }
        }
    }

    eigenvalues.resize(n);
    for (std::size_t i = 0; i < n; ++i) eigenvalues[i] = a(i, i);
    sort_pairs_desc(eigenvalues, z);
}

void lanczos_topk(const SymOperator& op, std::size_t k, const LanczosOptions& opts,
                  std::vector<double>& eigenvalues, Mat& vectors) {
    const std::size_t n = op.dim;
    if (k < 1 || k > n) throw ValidationError("lanczos_topk: k out of range");

    const std::size_t p_max = std::min(n, std::max(opts.max_iterations, k));
    std::vector<std::vector<double>> basis;
    std::vector<double> alpha, beta;
    std::vector<double> w(n), tmp(n);

    std::size_t restart_counter = 0;
    auto fresh_vector = [&](std::vector<double>& v) {
        RngStream rng(0x53564458ull, n, restart_counter++);
        for (std::size_t i = 0; i < n; ++i) v[i] = rng.uniform01() - 0.5;
    };

    auto orthogonalize = [&](std::vector<double>& v) {
        for (int pass = 0; pass < 2; ++pass) {
            for (const auto& q : basis) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += q[i] * v[i];
                for (std::size_t i = 0; i < n; ++i) v[i] -= dot * q[i];
            }
        }
    };

    auto norm_of = [&](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x * x;
        return std::sqrt(s);
    };

    {
        std::vector<double> v(n);
        fresh_vector(v);
        double nv = norm_of(v);
        for (auto& x : v) x /= nv;
        basis.push_back(std::move(v));
    }

    std::vector<double> ritz;
    Mat s_vecs;

    while (true) {
        const std::size_t j = alpha.size();
        op.apply(basis[j].data(), w.data());
        double a_j = 0.0;
        for (std::size_t i = 0; i < n; ++i) a_j += basis[j][i] * w[i];
        alpha.push_back(a_j);
        const std::size_t p = alpha.size();

        // Residual vector for the next coupling; computed even at the
        // cap because its norm is the Ritz residual scale.
        for (std::size_t i = 0; i < n; ++i) {
            w[i] -= a_j * basis[j][i];
            if (j > 0) w[i] -= beta[j - 1] * basis[j - 1][i];
        }
        orthogonalize(w);
        double b_j = norm_of(w);

        bool exhausted = (p == n);
        bool at_cap = (p == p_max);
        bool check_now = p >= k && (exhausted || at_cap || p % 8 == 0);

        if (check_now) {
            std::vector<double> diag(alpha);
            std::vector<double> off(beta);
            sym_tridiag_eig(diag, off, ritz, s_vecs);
            if (exhausted) break;

            double scale = std::max(std::abs(ritz[0]), 1e-300);
            double worst = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                worst = std::max(worst, std::abs(b_j * s_vecs(p - 1, i)) / scale);
            }
            if (worst <= opts.tolerance) break;
            if (at_cap) {
                throw NumericalError(
                    "lanczos_topk: iteration cap reached before convergence", worst);
            }
        }

        // Extend the basis.
        double breakdown = 1e-13 * std::max(1.0, std::abs(alpha[0]));
        if (b_j > breakdown) {
            beta.push_back(b_j);
            std::vector<double> q(n);
            for (std::size_t i = 0; i < n; ++i) q[i] = w[i] / b_j;
            basis.push_back(std::move(q));
        } else {
            // Lucky breakdown: restart in the orthogonal complement.
            bool restarted = false;
            for (int attempt = 0; attempt < 10 && !restarted; ++attempt) {
                fresh_vector(tmp);
                orthogonalize(tmp);
                double nt = norm_of(tmp);
                if (nt > 1e-6) {
                    beta.push_back(0.0);
                    std::vector<double> q(n);
                    for (std::size_t i = 0; i < n; ++i) q[i] = tmp[i] / nt;
                    basis.push_back(std::move(q));
                    restarted = true;
                }
            }
            if (!restarted) {
                // Reachable space exhausted: current T is exact.
                std::vector<double> diag(alpha);
                std::vector<double> off(beta);
                sym_tridiag_eig(diag, off, ritz, s_vecs);
                if (p < k) {
                    throw NumericalError(
                        "lanczos_topk: operator range smaller than k", 0.0);
                }
                break;
            }
        }
    }

    const std::size_t p = alpha.size();
    eigenvalues.assign(ritz.begin(), ritz.begin() + k);
    vectors = Mat(n, k);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t jj = 0; jj < p; ++jj) {
            double sj = s_vecs(jj, c);
            if (sj == 0.0) continue;
            const auto& q = basis[jj];
            for (std::size_t i = 0; i < n; ++i) vectors(i, c) += sj * q[i];
        }
    }
}

} // namespace semvox::svd
