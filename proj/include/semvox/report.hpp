#ifndef SEMVOX_REPORT_HPP
#define SEMVOX_REPORT_HPP

#include <string>
#include <vector>

#include "semvox/cluster.hpp"
#include "semvox/lsa.hpp"
#include "semvox/phonetics.hpp"
#include "semvox/svg.hpp"

namespace semvox::report {

enum class FigureKind { heatmap, dendrogram, se_plot, vowel_chart };

std::string_view figure_kind_name(FigureKind k);

// Identifying stamps embedded in every figure's <metadata> block.
struct RenderMeta {
    std::string config_hash;   // run config hash, empty outside pipeline runs
    std::string table_version; // formant table version stamp
};

struct FigureDocument {
    FigureKind kind;
    SvgDocument svg;

    std::string to_svg() const { return svg.to_string(); }
};

// AU labels round half-to-even to 2 decimals.
std::string format_au_label(double au);

// Cell color ramps linearly over the off-diagonal [min, max]; a
// degenerate range is flagged in the legend.
FigureDocument render_heatmap(const lsa::AdjacencyMatrix& adj,
                              const std::vector<std::string>& order,
                              const RenderMeta& meta = {});

// Leaves on x, merge height on y; internal nodes (except the root)
// carry AU labels; significant clusters get red rectangles; leaves in
// `bold_leaves` render bold.
FigureDocument render_dendrogram(const cluster::Dendrogram& tree,
                                 const std::vector<cluster::ClusterSupport>& supports,
                                 double alpha,
                                 const std::vector<std::string>& bold_leaves = {},
                                 const RenderMeta& meta = {});

// Scatter of (au, se_au) with a reference line at au = 0.95; exact
// duplicate au values get a small seeded jitter.
FigureDocument render_se_plot(const std::vector<cluster::ClusterSupport>& supports,
                              const RenderMeta& meta = {});

// F2 on x and F1 on y, both reversed (IPA orientation); monophthongs
// as dotted circles, diphthongs as dashed nucleus-to-glide arrows.
// `word_groups` maps word -> group label for styling.
FigureDocument render_vowel_chart(
    const std::vector<phonetics::VowelPoint>& projections,
    const std::vector<std::pair<std::string, std::string>>& word_groups = {},
    const RenderMeta& meta = {});

} // namespace semvox::report

#endif
