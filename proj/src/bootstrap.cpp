#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>
#include <unordered_map>

#include "semvox/cluster.hpp"
#include "semvox/error.hpp"
#include "semvox/rng.hpp"
#include "semvox/text.hpp"

namespace semvox::cluster {

namespace {

// Leaf bitset key for subtree matching.
struct Bitset {
    std::vector<std::uint64_t> words;
    bool operator==(const Bitset& o) const { return words == o.words; }
};

struct BitsetHash {
    std::size_t operator()(const Bitset& b) const {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (std::uint64_t w : b.words) {
            h ^= w;
            h *= 0x100000001b3ull;
        }
        return static_cast<std::size_t>(h);
    }
};

Bitset make_bitset(const std::vector<std::size_t>& leaves, std::size_t w) {
    Bitset b;
    b.words.assign((w + 63) / 64, 0);
    for (std::size_t leaf : leaves) b.words[leaf / 64] |= 1ull << (leaf % 64);
    return b;
}

// Agglomeration over a raw distance matrix, tracking only the leaf
// bitsets of the nodes it creates. Same tie rule as agglomerate().
void agglomerate_hits(const Mat& d0, Linkage linkage, std::size_t w,
                      const std::unordered_map<Bitset, std::size_t, BitsetHash>& targets,
                      std::vector<std::size_t>& local_hits) {
    const std::size_t total = 2 * w - 1;
    const std::size_t words = (w + 63) / 64;

    static thread_local std::vector<double> dist;
    static thread_local std::vector<std::uint64_t> bits;
    static thread_local std::vector<std::size_t> size, active;
    dist.assign(total * total, 0.0);
    bits.assign(total * words, 0);
    size.assign(total, 1);
    active.clear();

    for (std::size_t i = 0; i < w; ++i) {
        for (std::size_t j = 0; j < w; ++j) dist[i * total + j] = d0(i, j);
        bits[i * words + i / 64] = 1ull << (i % 64);
        active.push_back(i);
    }

    Bitset key;
    for (std::size_t step = 0; step < w - 1; ++step) {
        std::size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < active.size(); ++a) {
            for (std::size_t b = a + 1; b < active.size(); ++b) {
                double v = dist[active[a] * total + active[b]];
                if (v < best) {
                    best = v;
                    bi = active[a];
                    bj = active[b];
                }
            }
        }
        std::size_t node = w + step;
        for (std::size_t idx : active) {
            if (idx == bi || idx == bj) continue;
            double di = dist[bi * total + idx], dj = dist[bj * total + idx];
            double v;
            switch (linkage) {
                case Linkage::average:
                    v = (static_cast<double>(size[bi]) * di +
                         static_cast<double>(size[bj]) * dj) /
                        static_cast<double>(size[bi] + size[bj]);
                    break;
                case Linkage::complete: v = std::max(di, dj); break;
                case Linkage::single: v = std::min(di, dj); break;
                default: v = 0.0;
            }
            dist[node * total + idx] = v;
            dist[idx * total + node] = v;
        }
        size[node] = size[bi] + size[bj];
        for (std::size_t x = 0; x < words; ++x) {
            bits[node * words + x] = bits[bi * words + x] | bits[bj * words + x];
        }

        key.words.assign(bits.begin() + node * words, bits.begin() + (node + 1) * words);
        auto it = targets.find(key);
        if (it != targets.end()) ++local_hits[it->second];

        active.erase(std::remove_if(active.begin(), active.end(),
                                    [&](std::size_t x) { return x == bi || x == bj; }),
                     active.end());
        active.push_back(node);
    }
}

} // namespace

BootstrapResult multiscale_bootstrap(const Mat& features, const Dendrogram& reference,
                                     const BootstrapOptions& opt) {
    const std::size_t w = features.rows();
    const std::size_t nf = features.cols();
    if (reference.leaf_count() != w) {
        throw ValidationError("multiscale_bootstrap: tree/features size mismatch");
    }
    if (nf < 2) throw ValidationError("multiscale_bootstrap: need at least 2 features");
    if (opt.replicates_per_scale < 1) {
        throw ValidationError("multiscale_bootstrap: replicates_per_scale must be >= 1");
    }
    for (double r : opt.scales) {
        if (!(r > 0.0)) throw ValidationError("multiscale_bootstrap: scales must be positive");
    }

    const std::size_t n_internal = w - 1;
    auto sets = reference.node_leaf_sets();
    std::unordered_map<Bitset, std::size_t, BitsetHash> targets;
    for (std::size_t t = 0; t < n_internal; ++t) {
        targets.emplace(make_bitset(sets[w + t], w), t);
    }

    const std::size_t B = opt.replicates_per_scale;
    const std::size_t redraw_cap = 10 * B;
    BootstrapResult result;
    result.tables.resize(n_internal);
    for (std::size_t t = 0; t < n_internal; ++t) {
        result.tables[t].node_id = w + t;
        result.tables[t].entries.resize(opt.scales.size());
    }
    result.redraws_per_scale.assign(opt.scales.size(), 0);

    const unsigned n_threads = std::max(1u, opt.threads);

    for (std::size_t si = 0; si < opt.scales.size(); ++si) {
        const double r = opt.scales[si];
        const std::size_t n_cols = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::llround(r * static_cast<double>(nf))));

        std::vector<std::vector<std::size_t>> hits(n_threads,
                                                   std::vector<std::size_t>(n_internal, 0));
        std::vector<std::size_t> redraws(n_threads, 0);
        std::exception_ptr first_error;
        std::mutex error_mutex;

        auto worker = [&](unsigned tid) {
            try {
                std::vector<std::size_t> cols(n_cols);
                Mat sub; // resampled feature view -> distances
                std::vector<double> mu(w), sd(w);
                Mat d(w, w);
                for (std::size_t rep = tid; rep < B; rep += n_threads) {
                    RngStream rng(opt.seed, si, rep);
                    std::size_t rep_redraws = 0;
                    while (true) {
                        for (std::size_t c = 0; c < n_cols; ++c) {
                            cols[c] = rng.uniform_index(nf);
                        }
                        // Pearson over the resampled columns.
                        bool degenerate = false;
                        for (std::size_t i = 0; i < w; ++i) {
                            double s = 0.0;
                            for (std::size_t c : cols) s += features(i, c);
                            mu[i] = s / static_cast<double>(n_cols);
                            double q = 0.0;
                            for (std::size_t c : cols) {
                                double x = features(i, c) - mu[i];
                                q += x * x;
                            }
                            if (q == 0.0) {
                                degenerate = true;
                                break;
                            }
                            sd[i] = std::sqrt(q);
                        }
                        if (degenerate) {
                            if (++rep_redraws > redraw_cap) {
                                throw PipelineError(
                                    "multiscale_bootstrap: redraw limit exceeded at "
                                    "scale " + format_g17(r));
                            }
                            continue;
                        }
                        for (std::size_t i = 0; i < w; ++i) {
                            d(i, i) = 0.0;
                            for (std::size_t j = i + 1; j < w; ++j) {
                                double s = 0.0;
                                for (std::size_t c : cols) {
                                    s += (features(i, c) - mu[i]) * (features(j, c) - mu[j]);
                                }
                                double dist = std::clamp(1.0 - s / (sd[i] * sd[j]), 0.0, 2.0);
                                d(i, j) = dist;
                                d(j, i) = dist;
                            }
                        }
                        redraws[tid] += rep_redraws;
                        break;
                    }
                    agglomerate_hits(d, opt.linkage, w, targets, hits[tid]);
                }
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        };

        if (n_threads == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker, t);
            for (auto& th : pool) th.join();
        }
        if (first_error) std::rethrow_exception(first_error);

        std::size_t scale_redraws = 0;
        for (unsigned t = 0; t < n_threads; ++t) scale_redraws += redraws[t];
        if (scale_redraws > redraw_cap) {
            throw PipelineError("multiscale_bootstrap: more than " +
                                std::to_string(redraw_cap) + " redraws at scale " +
                                format_g17(r));
        }
        result.redraws_per_scale[si] = scale_redraws;

        for (std::size_t t = 0; t < n_internal; ++t) {
            std::size_t total_hits = 0;
            for (unsigned th = 0; th < n_threads; ++th) total_hits += hits[th][t];
            result.tables[t].entries[si] = {r, static_cast<double>(B),
                                            static_cast<double>(total_hits)};
        }
    }

    return result;
}

} // namespace semvox::cluster
