#include "semvox/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include <json.hpp>

#include "semvox/error.hpp"
#include "semvox/text.hpp"

namespace semvox::cluster {

std::string_view linkage_name(Linkage l) {
    switch (l) {
        case Linkage::average: return "average";
        case Linkage::complete: return "complete";
        case Linkage::single: return "single";
    }
    return "average";
}

Linkage linkage_from_name(std::string_view name) {
    if (name == "average") return Linkage::average;
    if (name == "complete") return Linkage::complete;
    if (name == "single") return Linkage::single;
    throw ValidationError("unknown linkage: '" + std::string(name) + "'");
}

void DistanceMatrix::validate() const {
    const std::size_t w = labels.size();
    if (d.rows() != w || d.cols() != w) {
        throw ValidationError("DistanceMatrix: shape mismatch");
    }
    for (std::size_t i = 0; i < w; ++i) {
        if (d(i, i) != 0.0) throw ValidationError("DistanceMatrix: nonzero diagonal");
        for (std::size_t j = 0; j < w; ++j) {
            double v = d(i, j);
            if (!(v >= 0.0 && v <= 2.0)) {
                throw ValidationError("DistanceMatrix: entry outside [0, 2]");
            }
            if (std::abs(v - d(j, i)) > 1e-12) {
                throw ValidationError("DistanceMatrix: not symmetric");
            }
        }
    }
}

DistanceMatrix pearson_distance(const Mat& features,
                                const std::vector<std::string>& labels) {
    const std::size_t w = features.rows(), nf = features.cols();
    if (labels.size() != w) throw ValidationError("pearson_distance: label count");
    if (nf < 2) throw ValidationError("pearson_distance: need at least 2 features");

    std::vector<double> mu(w, 0.0), sd(w, 0.0);
    for (std::size_t i = 0; i < w; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < nf; ++j) s += features(i, j);
        mu[i] = s / static_cast<double>(nf);
        double q = 0.0;
        for (std::size_t j = 0; j < nf; ++j) {
            double c = features(i, j) - mu[i];
            q += c * c;
        }
        if (q == 0.0) {
            throw ValidationError("pearson_distance: zero variance for object '" +
                                  labels[i] + "'");
        }
        sd[i] = std::sqrt(q);
    }

    DistanceMatrix out;
    out.labels = labels;
    out.d = Mat(w, w);
    for (std::size_t i = 0; i < w; ++i) {
        for (std::size_t j = i + 1; j < w; ++j) {
            double s = 0.0;
            for (std::size_t f = 0; f < nf; ++f) {
                s += (features(i, f) - mu[i]) * (features(j, f) - mu[j]);
            }
            double r = s / (sd[i] * sd[j]);
            double dist = std::clamp(1.0 - r, 0.0, 2.0);
            out.d(i, j) = dist;
            out.d(j, i) = dist;
        }
    }
    out.validate();
    return out;
}

std::vector<std::vector<std::size_t>> Dendrogram::node_leaf_sets() const {
    const std::size_t w = leaves.size();
    std::vector<std::vector<std::size_t>> sets(2 * w - 1);
    for (std::size_t i = 0; i < w; ++i) sets[i] = {i};
    for (std::size_t t = 0; t < merges.size(); ++t) {
        const auto& m = merges[t];
        auto& s = sets[w + t];
        s.reserve(sets[m.left].size() + sets[m.right].size());
        std::merge(sets[m.left].begin(), sets[m.left].end(), sets[m.right].begin(),
                   sets[m.right].end(), std::back_inserter(s));
    }
    return sets;
}

double Dendrogram::node_height(std::size_t id) const {
    const std::size_t w = leaves.size();
    if (id < w) return 0.0;
    return merges[id - w].height;
}

void Dendrogram::validate() const {
    const std::size_t w = leaves.size();
    if (w < 2) throw ValidationError("Dendrogram: need at least 2 leaves");
    if (merges.size() != w - 1) throw ValidationError("Dendrogram: wrong merge count");
    std::vector<bool> used(2 * w - 1, false);
    double prev = -1.0;
    for (std::size_t t = 0; t < merges.size(); ++t) {
        const auto& m = merges[t];
        std::size_t created = w + t;
        if (m.left >= created || m.right >= created || m.left == m.right) {
            throw ValidationError("Dendrogram: merge references invalid node");
        }
        if (used[m.left] || used[m.right]) {
            throw ValidationError("Dendrogram: node used twice as child");
        }
        used[m.left] = used[m.right] = true;
        if (m.height < prev - 1e-12) {
            throw ValidationError("Dendrogram: heights must be nondecreasing");
        }
        prev = std::max(prev, m.height);
    }
}

Dendrogram agglomerate(const DistanceMatrix& dm, Linkage linkage) {
    dm.validate();
    const std::size_t w = dm.labels.size();
    if (w < 2) throw ValidationError("agglomerate: need at least 2 objects");

    const std::size_t total = 2 * w - 1;
    Mat dist(total, total);
    for (std::size_t i = 0; i < w; ++i) {
        for (std::size_t j = 0; j < w; ++j) dist(i, j) = dm.d(i, j);
    }
    std::vector<std::size_t> size(total, 1);
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < w; ++i) active.push_back(i);

    Dendrogram out;
    out.leaves = dm.labels;
    out.merges.reserve(w - 1);

    for (std::size_t step = 0; step < w - 1; ++step) {
        // Minimum distance pair; ties break to the smallest (i, j) ids.
        std::size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < active.size(); ++a) {
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                std::size_t i = active[a], j = active[b];
                double v = dist(i, j);
                if (v < best) {
                    best = v;
                    bi = i;
                    bj = j;
                }
            }
        }

        std::size_t node = w + step;
        for (std::size_t idx : active) {
            if (idx == bi || idx == bj) continue;
            double di = dist(bi, idx), dj = dist(bj, idx);
            double v;
            switch (linkage) {
                case Linkage::average:
                    v = (static_cast<double>(size[bi]) * di +
                         static_cast<double>(size[bj]) * dj) /
                        static_cast<double>(size[bi] + size[bj]);
                    break;
                case Linkage::complete:
                    v = std::max(di, dj);
                    break;
                case Linkage::single:
                    v = std::min(di, dj);
                    break;
                default:
                    v = 0.0;
            }
            dist(node, idx) = v;
            dist(idx, node) = v;
        }
        size[node] = size[bi] + size[bj];

        if (!out.merges.empty() && best < out.merges.back().height - 1e-12) {
            throw PipelineError("agglomerate: non-monotone merge height");
        }
        out.merges.push_back({bi, bj, best});

        active.erase(std::remove_if(active.begin(), active.end(),
                                    [&](std::size_t x) { return x == bi || x == bj; }),
                     active.end());
        active.push_back(node);
    }

    out.validate();
    return out;
}

namespace {

std::vector<std::string> sorted_unique(const std::vector<std::string>& xs) {
    std::vector<std::string> out = xs;
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

} // namespace

std::vector<std::size_t> significant_nodes(const Dendrogram& tree,
                                           const std::vector<ClusterSupport>& supports,
                                           double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError("significant_nodes: alpha must be in (0, 1)");
    }
    const std::size_t w = tree.leaf_count();
    std::vector<double> au(2 * w - 1, 0.0);
    for (const auto& s : supports) {
        if (s.node_id < 2 * w - 1) au[s.node_id] = s.au;
    }
    for (std::size_t id = w; id < 2 * w - 1; ++id) {
        bool found = false;
        for (const auto& s : supports) found = found || s.node_id == id;
        if (!found) {
            throw ValidationError("significant_nodes: missing support for node " +
                                  std::to_string(id));
        }
    }

    std::vector<std::size_t> out;
    double threshold = 1.0 - alpha;
    // Outermost qualifying internal nodes below the root, left to right.
    std::vector<std::size_t> stack;
    const auto& root = tree.merges.back();
    stack.push_back(root.right);
    stack.push_back(root.left);
    while (!stack.empty()) {
        std::size_t id = stack.back();
        stack.pop_back();
        if (id < w) continue; // leaf
        if (au[id] >= threshold) {
            out.push_back(id);
            continue;
        }
        const auto& m = tree.merges[id - w];
        stack.push_back(m.right);
        stack.push_back(m.left);
    }
    return out;
}

std::vector<std::vector<std::string>> significant_clusters(
    const Dendrogram& tree, const std::vector<ClusterSupport>& supports, double alpha) {
    auto sets = tree.node_leaf_sets();
    std::vector<std::vector<std::string>> out;
    for (std::size_t id : significant_nodes(tree, supports, alpha)) {
        std::vector<std::string> members;
        members.reserve(sets[id].size());
        for (std::size_t leaf : sets[id]) members.push_back(tree.leaves[leaf]);
        out.push_back(std::move(members));
    }
    return out;
}

SharedReport shared_clusters(const std::vector<std::vector<std::string>>& a,
                             const std::vector<std::vector<std::string>>& b) {
    auto pair_set = [](const std::vector<std::vector<std::string>>& clusters) {
        std::set<std::pair<std::string, std::string>> pairs;
        for (const auto& c : clusters) {
            auto members = sorted_unique(c);
            for (std::size_t i = 0; i < members.size(); ++i) {
                for (std::size_t j = i + 1; j < members.size(); ++j) {
                    pairs.emplace(members[i], members[j]);
                }
            }
        }
        return pairs;
    };

    SharedReport report;
    auto pa = pair_set(a), pb = pair_set(b);
    std::set_intersection(pa.begin(), pa.end(), pb.begin(), pb.end(),
                          std::back_inserter(report.pairs));

    for (std::size_t i = 0; i < a.size(); ++i) {
        auto sa = sorted_unique(a[i]);
        SharedReport::Overlap ov{i, 0.0, SIZE_MAX};
        for (std::size_t j = 0; j < b.size(); ++j) {
            auto sb = sorted_unique(b[j]);
            std::vector<std::string> inter, uni;
            std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(),
                                  std::back_inserter(inter));
            std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(),
                           std::back_inserter(uni));
            double jac = uni.empty() ? 0.0
                                     : static_cast<double>(inter.size()) /
                                           static_cast<double>(uni.size());
            if (ov.best_match == SIZE_MAX || jac > ov.jaccard) {
                ov.jaccard = jac;
                ov.best_match = j;
            }
        }
        report.overlaps.push_back(ov);
    }
    return report;
}

namespace {

std::string newick_escape(const std::string& name) {
    if (name.find_first_of(" (),:;[]'") == std::string::npos) return name;
    std::string out = "'";
    for (char ch : name) {
        if (ch == '\'') out += "''";
        else out.push_back(ch);
    }
    out += "'";
    return out;
}

void newick_node(const Dendrogram& tree, std::size_t id, double parent_height,
                 std::string& out) {
    const std::size_t w = tree.leaf_count();
    if (id < w) {
        out += newick_escape(tree.leaves[id]);
    } else {
        const auto& m = tree.merges[id - w];
        out += '(';
        newick_node(tree, m.left, m.height, out);
        out += ',';
        newick_node(tree, m.right, m.height, out);
        out += ')';
    }
    out += ':';
    out += format_g17(parent_height - tree.node_height(id));
}

} // namespace

std::string to_newick(const Dendrogram& tree) {
    const auto& root = tree.merges.back();
    std::string out = "(";
    newick_node(tree, root.left, root.height, out);
    out += ',';
    newick_node(tree, root.right, root.height, out);
    out += ");\n";
    return out;
}

void export_support_json(const std::filesystem::path& file, const Dendrogram& tree,
                         const std::vector<ClusterSupport>& supports) {
    nlohmann::json j;
    j["leaves"] = tree.leaves;
    nlohmann::json merges = nlohmann::json::array();
    for (const auto& m : tree.merges) {
        merges.push_back({{"left", m.left}, {"right", m.right}, {"height", m.height}});
    }
    j["merges"] = merges;
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& s : supports) {
        nlohmann::json scales = nlohmann::json::array();
        for (const auto& e : s.bp_per_scale) {
            scales.push_back(
                {{"scale", e.scale}, {"replicates", e.replicates}, {"hits", e.hits}});
        }
        nodes.push_back({{"node", s.node_id},
                         {"au", s.au},
                         {"bp", s.bp_at_1},
                         {"v", s.v},
                         {"c", s.c},
                         {"se_au", s.se_au},
                         {"fit_ok", s.fit_ok},
                         {"bp_per_scale", scales}});
    }
    j["nodes"] = nodes;
    write_file(file, j.dump(2) + "\n");
}

SupportFile import_support_json(const std::filesystem::path& file) {
    nlohmann::json j = nlohmann::json::parse(read_file(file));
    SupportFile out;
    out.tree.leaves = j.at("leaves").get<std::vector<std::string>>();
    for (const auto& m : j.at("merges")) {
        out.tree.merges.push_back({m.at("left").get<std::size_t>(),
                                   m.at("right").get<std::size_t>(),
                                   m.at("height").get<double>()});
    }
    out.tree.validate();
    for (const auto& n : j.at("nodes")) {
        ClusterSupport s;
        s.node_id = n.at("node").get<std::size_t>();
        s.au = n.at("au").get<double>();
        s.bp_at_1 = n.at("bp").get<double>();
        s.v = n.at("v").get<double>();
        s.c = n.at("c").get<double>();
        s.se_au = n.at("se_au").get<double>();
        s.fit_ok = n.at("fit_ok").get<bool>();
        for (const auto& e : n.at("bp_per_scale")) {
            s.bp_per_scale.push_back({e.at("scale").get<double>(),
                                      e.at("replicates").get<double>(),
                                      e.at("hits").get<double>()});
        }
        out.supports.push_back(std::move(s));
    }
    return out;
}

void export_significant_csv(const std::filesystem::path& file, const Dendrogram& tree,
                            const std::vector<ClusterSupport>& supports, double alpha) {
    const std::size_t w = tree.leaf_count();
    std::vector<const ClusterSupport*> by_node(2 * w - 1, nullptr);
    for (const auto& s : supports) {
        if (s.node_id < by_node.size()) by_node[s.node_id] = &s;
    }
    auto sets = tree.node_leaf_sets();
    std::ostringstream out;
    out << "cluster_id,members,au,se_au\n";
    std::size_t cid = 1;
    for (std::size_t id : significant_nodes(tree, supports, alpha)) {
        std::string members;
        for (std::size_t leaf : sets[id]) {
            if (!members.empty()) members += ';';
            members += tree.leaves[leaf];
        }
        out << cid++ << ',' << csv_escape(members) << ','
            << format_g17(by_node[id]->au) << ',' << format_g17(by_node[id]->se_au)
            << '\n';
    }
    write_file(file, out.str());
}

} // namespace semvox::cluster
