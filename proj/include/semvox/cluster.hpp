#ifndef SEMVOX_CLUSTER_HPP
#define SEMVOX_CLUSTER_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semvox/mat.hpp"

namespace semvox::cluster {

enum class Linkage { average, complete, single };

std::string_view linkage_name(Linkage l);
Linkage linkage_from_name(std::string_view name);

struct DistanceMatrix {
    std::vector<std::string> labels;
    Mat d; // symmetric, zero diagonal, entries in [0, 2]

    void validate() const;
};

// d[i][j] = 1 - pearson(row_i, row_j), clamped to [0, 2]. Rows need at
// least 2 features and nonzero variance.
DistanceMatrix pearson_distance(const Mat& features,
                                const std::vector<std::string>& labels);

// Merge of nodes `left` < `right` (leaves are 0..w-1, merge t creates
// node w+t).
struct Merge {
    std::size_t left;
    std::size_t right;
    double height;
};

struct Dendrogram {
    std::vector<std::string> leaves;
    std::vector<Merge> merges; // w-1 entries, heights nondecreasing

    std::size_t leaf_count() const { return leaves.size(); }
    std::size_t root_id() const { return 2 * leaves.size() - 2; }

    // Leaf index sets per node id (0..2w-2), each sorted ascending.
    std::vector<std::vector<std::size_t>> node_leaf_sets() const;
    // Height of a node: 0 for leaves, merge height for internal nodes.
    double node_height(std::size_t id) const;

    void validate() const;
};

// Ties on the minimum inter-cluster distance break to the smallest
// (i, j) node-id pair, which pins the tree across platforms.
Dendrogram agglomerate(const DistanceMatrix& dm, Linkage linkage = Linkage::average);

struct BpEntry {
    double scale;      // r, relative resample size
    double replicates; // B_r
    double hits;       // replicate trees containing the node's leaf set
    double bp() const { return hits / replicates; }
};

struct BpTable {
    std::size_t node_id;
    std::vector<BpEntry> entries;
};

struct BootstrapOptions {
    std::vector<double> scales = {0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4};
    std::size_t replicates_per_scale = 10000;
    std::uint64_t seed = 0;
    Linkage linkage = Linkage::average;
    unsigned threads = 1;
};

struct BootstrapResult {
    std::vector<BpTable> tables; // one per internal node, ids w..2w-2
    std::vector<std::size_t> redraws_per_scale;
};

// Resamples feature columns with replacement at each scale; replicate
// (scale, rep) draws from its own RNG stream, so hit counts are
// identical for any thread count.
BootstrapResult multiscale_bootstrap(const Mat& features, const Dendrogram& reference,
                                     const BootstrapOptions& opt);

struct ClusterSupport {
    std::size_t node_id = 0;
    std::vector<BpEntry> bp_per_scale;
    double v = 0.0;
    double c = 0.0;
    double au = 0.0;
    double bp_at_1 = 0.0;
    double se_au = 0.0;
    bool fit_ok = false;
};

// Weighted least squares of z(r) = v*sqrt(r) + c/sqrt(r) against
// z_r = Phi^-1(1 - BP_r), BPs clamped to [1/(2B), 1 - 1/(2B)]. With
// fewer than two scales strictly between 0 and 1 hits the fit is
// skipped and au falls back to the clamped BP at the scale nearest 1.
ClusterSupport fit_au(const BpTable& table);

// Maximal internal nodes with au >= 1 - alpha, root excluded, nested
// qualifiers suppressed. Returned as node ids (tree order) and as
// member lists.
std::vector<std::size_t> significant_nodes(const Dendrogram& tree,
                                           const std::vector<ClusterSupport>& supports,
                                           double alpha);
std::vector<std::vector<std::string>> significant_clusters(
    const Dendrogram& tree, const std::vector<ClusterSupport>& supports, double alpha);

struct SharedReport {
    // Word pairs co-clustered on both sides, each pair sorted, list sorted.
    std::vector<std::pair<std::string, std::string>> pairs;
    struct Overlap {
        std::size_t cluster_index; // index into `a`
        double jaccard;            // best Jaccard against any cluster of `b`
        std::size_t best_match;    // index into `b`, SIZE_MAX when b is empty
    };
    std::vector<Overlap> overlaps;
};

SharedReport shared_clusters(const std::vector<std::vector<std::string>>& a,
                             const std::vector<std::vector<std::string>>& b);

std::string to_newick(const Dendrogram& tree);

void export_support_json(const std::filesystem::path& file, const Dendrogram& tree,
                         const std::vector<ClusterSupport>& supports);
struct SupportFile {
    Dendrogram tree;
    std::vector<ClusterSupport> supports;
};
SupportFile import_support_json(const std::filesystem::path& file);

void export_significant_csv(const std::filesystem::path& file, const Dendrogram& tree,
                            const std::vector<ClusterSupport>& supports, double alpha);

} // namespace semvox::cluster

#endif
