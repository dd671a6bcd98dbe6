#include <algorithm>
#include <cmath>

#include "semvox/cluster.hpp"
#include "semvox/error.hpp"
#include "semvox/mathstat.hpp"

namespace semvox::cluster {

namespace {

double clamped_bp(const BpEntry& e) {
    double lo = 1.0 / (2.0 * e.replicates);
    return std::clamp(e.bp(), lo, 1.0 - lo);
}

// Degenerate table: the clamped BP at the scale nearest r = 1, with a
// binomial delta-method standard error.
void fill_degenerate(ClusterSupport& s, const std::vector<BpEntry>& entries) {
    const BpEntry* nearest = &entries.front();
    for (const auto& e : entries) {
        if (std::abs(e.scale - 1.0) < std::abs(nearest->scale - 1.0)) nearest = &e;
    }
    double bp = clamped_bp(*nearest);
    s.v = 0.0;
    s.c = 0.0;
    s.au = bp;
    s.bp_at_1 = bp;
    s.se_au = std::sqrt(bp * (1.0 - bp) / nearest->replicates);
    s.fit_ok = false;
}

} // namespace

ClusterSupport fit_au(const BpTable& table) {
    if (table.entries.empty()) throw ValidationError("fit_au: empty BP table");

    ClusterSupport s;
    s.node_id = table.node_id;
    s.bp_per_scale = table.entries;

    // A scale is usable for the curve fit when its raw BP is strictly
    // between 0 and 1; boundary scales still enter the fit with their
    // clamped value once at least two usable scales anchor it.
    std::size_t usable = 0;
    for (const auto& e : table.entries) {
        if (e.hits > 0.0 && e.hits < e.replicates) ++usable;
    }
    if (usable < 2) {
        fill_degenerate(s, table.entries);
        return s;
    }

    // Weighted least squares of z(r) = v*sqrt(r) + c/sqrt(r), weights
    // B * pdf(z)^2 / (bp (1 - bp)).
    double a11 = 0.0, a12 = 0.0, a22 = 0.0, b1 = 0.0, b2 = 0.0;
    for (const auto& e : table.entries) {
        double bp = clamped_bp(e);
        double z = norm_quantile(1.0 - bp);
        double pdf = norm_pdf(z);
        double weight = e.replicates * pdf * pdf / (bp * (1.0 - bp));
        double sr = std::sqrt(e.scale);
        a11 += weight * e.scale;
        a12 += weight;
        a22 += weight / e.scale;
        b1 += weight * sr * z;
        b2 += weight * z / sr;
    }
    double det = a11 * a22 - a12 * a12;
    if (!(std::abs(det) > 1e-30 * std::max(1.0, a11 * a22))) {
        // Identical scales cannot separate v from c.
        fill_degenerate(s, table.entries);
        return s;
    }

    s.v = (a22 * b1 - a12 * b2) / det;
    s.c = (a11 * b2 - a12 * b1) / det;
    double var_v = a22 / det;
    double var_c = a11 / det;
    double cov_vc = -a12 / det;

    s.au = 1.0 - norm_cdf(s.v - s.c);
    s.bp_at_1 = 1.0 - norm_cdf(s.v + s.c);
    double var_diff = std::max(var_v + var_c - 2.0 * cov_vc, 0.0);
    s.se_au = norm_pdf(s.v - s.c) * std::sqrt(var_diff);
    s.fit_ok = true;
    return s;
}

} // namespace semvox::cluster
