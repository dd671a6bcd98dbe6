#include "dense_gram_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace oracle {

void eig_sym(const Matrix& a0, std::vector<double>& values, Matrix& vectors) {
    const std::size_t n = a0.size();
    Matrix a = a0;
    vectors.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) vectors[i][i] = 1.0;

    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) scale = std::max(scale, std::abs(a[i][j]));
    }
    if (scale == 0.0) scale = 1.0;

    // Row-cyclic Jacobi sweeps with an angle computed from atan2, which
    // keeps this routine structurally different from the library solver.
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) off = std::max(off, std::abs(a[i][j]));
        }
        if (n < 2 || off <= 1e-15 * scale) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double apq = a[p][q];
                if (std::abs(apq) <= 1e-300) continue;
                double app = a[p][p], aqq = a[q][q];
                double phi = 0.5 * std::atan2(2.0 * apq, aqq - app);
                double c = std::cos(phi), s = std::sin(phi);

                for (std::size_t i = 0; i < n; ++i) {
                    double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double api = a[p][i], aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    double vip = vectors[i][p], viq = vectors[i][q];
                    vectors[i][p] = c * vip - s * viq;
                    vectors[i][q] = s * vip + c * viq;
                }
            }
        }
    }

    values.resize(n);
    for (std::size_t i = 0; i < n; ++i) values[i] = a[i][i];

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });
    std::vector<double> sorted_vals(n);
    Matrix sorted_vecs(n, std::vector<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
        sorted_vals[j] = values[idx[j]];
        for (std::size_t i = 0; i < n; ++i) sorted_vecs[i][j] = vectors[i][idx[j]];
    }
    values = std::move(sorted_vals);
    vectors = std::move(sorted_vecs);
}

SvdResult svd(const Matrix& x, std::size_t k) {
    const std::size_t m = x.size();
    const std::size_t n = x[0].size();
    if (k > std::min(m, n)) throw std::invalid_argument("oracle svd: k too large");

    Matrix gram(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a; b < n; ++b) {
                gram[a][b] += x[i][a] * x[i][b];
            }
        }
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < a; ++b) gram[a][b] = gram[b][a];
    }

    std::vector<double> lambda;
    Matrix z;
    eig_sym(gram, lambda, z);

    SvdResult out;
    out.singular_values.resize(k);
    out.v.assign(n, std::vector<double>(k, 0.0));
    out.u.assign(m, std::vector<double>(k, 0.0));
    for (std::size_t j = 0; j < k; ++j) {
        double sigma = std::sqrt(std::max(lambda[j], 0.0));
        out.singular_values[j] = sigma;
        for (std::size_t i = 0; i < n; ++i) out.v[i][j] = z[i][j];
        if (sigma > 0.0) {
            for (std::size_t i = 0; i < m; ++i) {
                double s = 0.0;
                for (std::size_t a = 0; a < n; ++a) s += x[i][a] * z[a][j];
                out.u[i][j] = s / sigma;
            }
        }
    }
    return out;
}

double principal_angle(const Matrix& a, const Matrix& b) {
    const std::size_t m = a.size();
    const std::size_t k = a[0].size();
    // M = A^T B, smallest singular value of M = cos(largest angle).
    Matrix mm(k, std::vector<double>(k, 0.0));
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = 0; q < k; ++q) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += a[i][p] * b[i][q];
            mm[p][q] = s;
        }
    }
    Matrix mtm(k, std::vector<double>(k, 0.0));
    for (std::size_t p = 0; p < k; ++p) {
        for (std::size_t q = 0; q < k; ++q) {
            double s = 0.0;
            for (std::size_t r = 0; r < k; ++r) s += mm[r][p] * mm[r][q];
            mtm[p][q] = s;
        }
    }
    std::vector<double> lambda;
    Matrix z;
    eig_sym(mtm, lambda, z);
    double smallest = std::sqrt(std::max(lambda.back(), 0.0));
    return std::acos(std::clamp(smallest, 0.0, 1.0));
}

} // namespace oracle
