#include "semvox/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "semvox/error.hpp"
#include "semvox/rng.hpp"
#include "semvox/text.hpp"

namespace semvox::report {

namespace {

constexpr const char* kAxisColor = "#333333";
constexpr const char* kSignificantColor = "#cc0000";

const std::vector<std::string>& group_palette() {
    static const std::vector<std::string> p = {"#1f77b4", "#d62728", "#2ca02c",
                                               "#9467bd", "#ff7f0e", "#8c564b"};
    return p;
}

void stamp(SvgDocument& svg, FigureKind kind, const RenderMeta& meta) {
    svg.set_metadata("kind", std::string(figure_kind_name(kind)));
    svg.set_metadata("config_hash", meta.config_hash);
    svg.set_metadata("table_version", meta.table_version);
}

} // namespace

std::string_view figure_kind_name(FigureKind k) {
    switch (k) {
        case FigureKind::heatmap: return "heatmap";
        case FigureKind::dendrogram: return "dendrogram";
        case FigureKind::se_plot: return "se_plot";
        case FigureKind::vowel_chart: return "vowel_chart";
    }
    return "";
}

std::string format_au_label(double au) {
    // nearbyint rounds half to even under the default rounding mode.
    long long cents = static_cast<long long>(std::nearbyint(au * 100.0));
    std::string out = std::to_string(cents / 100) + ".";
    long long frac = std::llabs(cents % 100);
    if (frac < 10) out += "0";
    out += std::to_string(frac);
    return out;
}

FigureDocument render_heatmap(const lsa::AdjacencyMatrix& adj,
                              const std::vector<std::string>& order,
                              const RenderMeta& meta) {
    const std::size_t w = adj.words.size();
    // `order` must be a permutation of the adjacency words.
    std::vector<std::size_t> perm(w);
    {
        std::map<std::string, std::size_t> pos;
        for (std::size_t i = 0; i < w; ++i) {
            if (!pos.emplace(adj.words[i], i).second) {
                throw ValidationError("render_heatmap: duplicate word in matrix");
            }
        }
        if (order.size() != w) {
            throw ValidationError("render_heatmap: order is not a permutation");
        }
        std::set<std::string> seen;
        for (std::size_t i = 0; i < w; ++i) {
            auto it = pos.find(order[i]);
            if (it == pos.end() || !seen.insert(order[i]).second) {
                throw ValidationError("render_heatmap: order is not a permutation");
            }
            perm[i] = it->second;
        }
    }

    double lo = 0.0, hi = 0.0;
    bool degenerate = true;
    if (w > 1) {
        lo = 1.0;
        hi = -1.0;
        for (std::size_t i = 0; i < w; ++i) {
            for (std::size_t j = 0; j < w; ++j) {
                if (i == j) continue;
                lo = std::min(lo, adj.values(i, j));
                hi = std::max(hi, adj.values(i, j));
            }
        }
        degenerate = !(hi > lo);
    }

    const double label_space = 90.0;
    const double cell = std::max(14.0, std::min(26.0, 420.0 / static_cast<double>(w)));
    const double legend_w = 70.0;
    const double grid = cell * static_cast<double>(w);
    FigureDocument fig{FigureKind::heatmap,
                       SvgDocument(label_space + grid + legend_w + 40.0,
                                   label_space + grid + 30.0)};
    stamp(fig.svg, FigureKind::heatmap, meta);

    for (std::size_t i = 0; i < w; ++i) {
        for (std::size_t j = 0; j < w; ++j) {
            double v = adj.values(perm[i], perm[j]);
            double t = degenerate ? 0.5 : (std::clamp(v, lo, hi) - lo) / (hi - lo);
            fig.svg.rect(label_space + cell * static_cast<double>(j),
                         label_space + cell * static_cast<double>(i), cell, cell,
                         color_ramp(t), "#ffffff", 0.5);
        }
    }
    for (std::size_t i = 0; i < w; ++i) {
        double center = label_space + cell * (static_cast<double>(i) + 0.5);
        fig.svg.text(label_space - 6.0, center + 3.5, order[i], 10.0, "end");
        fig.svg.text(center, label_space - 6.0, order[i], 10.0, "start", false,
                     "#000000", -60.0);
    }

    // Color legend.
    double lx = label_space + grid + 20.0;
    const int steps = 24;
    double lh = grid / steps;
    for (int s = 0; s < steps; ++s) {
        double t = 1.0 - static_cast<double>(s) / (steps - 1);
        fig.svg.rect(lx, label_space + lh * s, 16.0, lh + 0.5, color_ramp(t));
    }
    if (degenerate) {
        fig.svg.text(lx, label_space + grid + 14.0, "degenerate range", 9.0);
        fig.svg.set_metadata("legend", "degenerate");
    } else {
        fig.svg.text(lx + 20.0, label_space + 8.0, format_fixed(hi, 2), 9.0);
        fig.svg.text(lx + 20.0, label_space + grid, format_fixed(lo, 2), 9.0);
    }
    return fig;
}

namespace {

// Leaf drawing order and node center positions via left-first traversal.
void layout_leaves(const cluster::Dendrogram& tree, std::size_t id,
                   std::vector<std::size_t>& order) {
    const std::size_t w = tree.leaf_count();
    if (id < w) {
        order.push_back(id);
        return;
    }
    const auto& m = tree.merges[id - w];
    layout_leaves(tree, m.left, order);
    layout_leaves(tree, m.right, order);
}

} // namespace

FigureDocument render_dendrogram(const cluster::Dendrogram& tree,
                                 const std::vector<cluster::ClusterSupport>& supports,
                                 double alpha,
                                 const std::vector<std::string>& bold_leaves,
                                 const RenderMeta& meta) {
    tree.validate();
    const std::size_t w = tree.leaf_count();
    const std::size_t root = tree.root_id();

    std::vector<const cluster::ClusterSupport*> by_node(2 * w - 1, nullptr);
    for (const auto& s : supports) {
        if (s.node_id < by_node.size()) by_node[s.node_id] = &s;
    }
    for (std::size_t id = w; id < 2 * w - 1; ++id) {
        if (!by_node[id]) {
            throw ValidationError("render_dendrogram: missing support for node " +
                                  std::to_string(id));
        }
    }

    std::vector<std::size_t> leaf_order;
    layout_leaves(tree, root, leaf_order);
    std::vector<double> leaf_slot(w, 0.0);
    for (std::size_t pos = 0; pos < w; ++pos) {
        leaf_slot[leaf_order[pos]] = static_cast<double>(pos);
    }

    const double margin_left = 50.0, margin_top = 30.0;
    const double step = 46.0;
    const double plot_h = 320.0;
    const double baseline = margin_top + plot_h;
    const double label_space = 80.0;
    FigureDocument fig{FigureKind::dendrogram,
                       SvgDocument(margin_left + step * static_cast<double>(w) + 30.0,
                                   baseline + label_space + 20.0)};
    stamp(fig.svg, FigureKind::dendrogram, meta);

    double h_max = tree.merges.back().height;
    if (h_max <= 0.0) h_max = 1.0;
    auto y_of = [&](double h) { return baseline - (h / h_max) * plot_h; };
    auto leaf_x = [&](std::size_t leaf) {
        return margin_left + step * (leaf_slot[leaf] + 0.5);
    };

    // Node centers.
    std::vector<double> center(2 * w - 1, 0.0);
    for (std::size_t i = 0; i < w; ++i) center[i] = leaf_x(i);
    for (std::size_t t = 0; t < tree.merges.size(); ++t) {
        const auto& m = tree.merges[t];
        center[w + t] = 0.5 * (center[m.left] + center[m.right]);
    }

    // Significant-cluster rectangles under the brackets.
    auto sets = tree.node_leaf_sets();
    std::vector<std::size_t> significant =
        cluster::significant_nodes(tree, supports, alpha);
    for (std::size_t id : significant) {
        double x_min = 1e300, x_max = -1e300;
        for (std::size_t leaf : sets[id]) {
            x_min = std::min(x_min, leaf_x(leaf));
            x_max = std::max(x_max, leaf_x(leaf));
        }
        double top = y_of(tree.node_height(id)) - 10.0;
        fig.svg.rect(x_min - step * 0.45, top, (x_max - x_min) + step * 0.9,
                     baseline - top + label_space * 0.75, "", kSignificantColor, 1.5);
    }

    // Brackets, bottom-up.
    for (std::size_t t = 0; t < tree.merges.size(); ++t) {
        const auto& m = tree.merges[t];
        double y = y_of(m.height);
        double yl = y_of(tree.node_height(m.left));
        double yr = y_of(tree.node_height(m.right));
        fig.svg.line(center[m.left], yl, center[m.left], y, kAxisColor, 1.2);
        fig.svg.line(center[m.right], yr, center[m.right], y, kAxisColor, 1.2);
        fig.svg.line(center[m.left], y, center[m.right], y, kAxisColor, 1.2);
        std::size_t id = w + t;
        if (id != root) {
            fig.svg.text(center[id], y - 4.0, format_au_label(by_node[id]->au), 9.0,
                         "middle", false, kSignificantColor);
        }
    }

    // Leaf labels, rotated.
    std::set<std::string> bold(bold_leaves.begin(), bold_leaves.end());
    for (std::size_t i = 0; i < w; ++i) {
        bool is_bold = bold.count(tree.leaves[i]) > 0;
        fig.svg.text(leaf_x(i), baseline + 14.0, tree.leaves[i], 11.0, "end", is_bold,
                     "#000000", -60.0);
    }

    // Height axis.
    fig.svg.line(margin_left - 10.0, baseline, margin_left - 10.0, y_of(h_max),
                 kAxisColor, 1.0);
    for (int tick = 0; tick <= 4; ++tick) {
        double h = h_max * tick / 4.0;
        fig.svg.line(margin_left - 14.0, y_of(h), margin_left - 10.0, y_of(h),
                     kAxisColor, 1.0);
        fig.svg.text(margin_left - 17.0, y_of(h) + 3.0, format_fixed(h, 2), 8.0, "end");
    }
    return fig;
}

FigureDocument render_se_plot(const std::vector<cluster::ClusterSupport>& supports,
                              const RenderMeta& meta) {
    if (supports.empty()) throw ValidationError("render_se_plot: no supports");

    const double margin = 50.0, plot_w = 360.0, plot_h = 280.0;
    FigureDocument fig{FigureKind::se_plot,
                       SvgDocument(margin + plot_w + 30.0, margin + plot_h + 50.0)};
    stamp(fig.svg, FigureKind::se_plot, meta);

    double se_max = 0.0;
    for (const auto& s : supports) se_max = std::max(se_max, s.se_au);
    if (se_max <= 0.0) se_max = 0.01;
    se_max *= 1.15;

    auto x_of = [&](double au) { return margin + au * plot_w; };
    auto y_of = [&](double se) { return margin + plot_h - (se / se_max) * plot_h; };

    // Axes.
    fig.svg.line(margin, margin + plot_h, margin + plot_w, margin + plot_h, kAxisColor,
                 1.0);
    fig.svg.line(margin, margin, margin, margin + plot_h, kAxisColor, 1.0);
    for (int t = 0; t <= 4; ++t) {
        double au = t / 4.0;
        fig.svg.line(x_of(au), margin + plot_h, x_of(au), margin + plot_h + 4.0,
                     kAxisColor, 1.0);
        fig.svg.text(x_of(au), margin + plot_h + 16.0, format_fixed(au, 2), 9.0,
                     "middle");
        double se = se_max * t / 4.0;
        fig.svg.line(margin - 4.0, y_of(se), margin, y_of(se), kAxisColor, 1.0);
        fig.svg.text(margin - 7.0, y_of(se) + 3.0, format_fixed(se, 4), 8.0, "end");
    }
    fig.svg.text(margin + plot_w / 2.0, margin + plot_h + 34.0, "AU p-value", 11.0,
                 "middle");
    fig.svg.text(margin - 36.0, margin - 10.0, "SE", 11.0, "start");

    // Reference line at au = 0.95.
    fig.svg.line(x_of(0.95), margin, x_of(0.95), margin + plot_h, kSignificantColor,
                 1.0, "4,3");

    // Points; exact duplicate au values get a small seeded jitter.
    std::map<double, int> seen;
    for (std::size_t i = 0; i < supports.size(); ++i) {
        const auto& s = supports[i];
        int dup = seen[s.au]++;
        double dx = 0.0;
        if (dup > 0) {
            RngStream rng(0x4a49545452ull, i, static_cast<std::uint64_t>(dup));
            dx = (rng.uniform01() - 0.5) * 6.0;
        }
        fig.svg.circle(x_of(s.au) + dx, y_of(s.se_au), 3.0, "#1f77b4");
    }
    return fig;
}

FigureDocument render_vowel_chart(
    const std::vector<phonetics::VowelPoint>& projections,
    const std::vector<std::pair<std::string, std::string>>& word_groups,
    const RenderMeta& meta) {
    const double margin = 60.0, plot_w = 420.0, plot_h = 340.0;
    FigureDocument fig{FigureKind::vowel_chart,
                       SvgDocument(margin + plot_w + 140.0, margin + plot_h + 60.0)};
    stamp(fig.svg, FigureKind::vowel_chart, meta);

    // Ranges cover nuclei and glide targets; fixed fallback when empty.
    double f1_lo = 1e300, f1_hi = -1e300, f2_lo = 1e300, f2_hi = -1e300;
    auto feed = [&](double f1, double f2) {
        f1_lo = std::min(f1_lo, f1);
        f1_hi = std::max(f1_hi, f1);
        f2_lo = std::min(f2_lo, f2);
        f2_hi = std::max(f2_hi, f2);
    };
    for (const auto& p : projections) {
        feed(p.f1, p.f2);
        if (p.glide) feed(p.glide->first, p.glide->second);
    }
    if (projections.empty()) {
        f1_lo = 250.0;
        f1_hi = 800.0;
        f2_lo = 800.0;
        f2_hi = 2400.0;
    }
    double f1_pad = std::max(20.0, (f1_hi - f1_lo) * 0.1);
    double f2_pad = std::max(50.0, (f2_hi - f2_lo) * 0.1);
    f1_lo -= f1_pad;
    f1_hi += f1_pad;
    f2_lo -= f2_pad;
    f2_hi += f2_pad;

    // IPA orientation: high F2 at the left, low F1 at the top.
    auto x_of = [&](double f2) {
        return margin + (f2_hi - f2) / (f2_hi - f2_lo) * plot_w;
    };
    auto y_of = [&](double f1) {
        return margin + (f1 - f1_lo) / (f1_hi - f1_lo) * plot_h;
    };

    // Frame and reversed tick labels.
    fig.svg.rect(margin, margin, plot_w, plot_h, "", kAxisColor, 1.0);
    for (int t = 0; t <= 4; ++t) {
        double f2 = f2_hi - (f2_hi - f2_lo) * t / 4.0;
        fig.svg.text(margin + plot_w * t / 4.0, margin + plot_h + 16.0,
                     format_fixed(f2, 0), 9.0, "middle");
        double f1 = f1_lo + (f1_hi - f1_lo) * t / 4.0;
        fig.svg.text(margin - 6.0, margin + plot_h * t / 4.0 + 3.0, format_fixed(f1, 0),
                     9.0, "end");
    }
    fig.svg.text(margin + plot_w / 2.0, margin + plot_h + 34.0, "F2 (Hz)", 11.0,
                 "middle");
    fig.svg.text(margin - 44.0, margin - 14.0, "F1 (Hz)", 11.0, "start");

    // Group styling: palette assigned in first-appearance order.
    std::map<std::string, std::string> group_of;
    for (const auto& [word, group] : word_groups) group_of[word] = group;
    std::map<std::string, std::string> group_color;
    std::vector<std::string> group_order;
    for (const auto& [word, group] : word_groups) {
        if (!group_color.count(group)) {
            group_color[group] =
                group_palette()[group_order.size() % group_palette().size()];
            group_order.push_back(group);
        }
    }

    for (const auto& p : projections) {
        std::string color = "#1f77b4";
        auto git = group_of.find(p.word);
        if (git != group_of.end()) color = group_color[git->second];
        double x = x_of(p.f2), y = y_of(p.f1);
        if (p.glide) {
            fig.svg.arrow(x, y, x_of(p.glide->second), y_of(p.glide->first), color, 1.4,
                          "5,3");
        } else {
            fig.svg.circle(x, y, 9.0, "", color, 1.4, "2,2");
        }
        fig.svg.circle(x, y, 2.0, color);
        fig.svg.text(x + 11.0, y + 4.0, p.word, 10.0, "start", false, color);
    }

    // Legend.
    double ly = margin;
    for (const auto& g : group_order) {
        fig.svg.circle(margin + plot_w + 20.0, ly, 4.0, group_color[g]);
        fig.svg.text(margin + plot_w + 30.0, ly + 4.0, g, 10.0);
        ly += 18.0;
    }
    return fig;
}

} // namespace semvox::report
