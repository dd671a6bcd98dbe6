// Acceptance suite: one pass/fail line per criterion, exit code equals
// the number of failures. Criterion 7 skips (visibly) when the
// published norms CSV has not been supplied.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/dense_gram_oracle.hpp"
#include "oracles/linkage_oracle.hpp"
#include "semvox/cluster.hpp"
#include "semvox/corpus.hpp"
#include "semvox/lsa.hpp"
#include "semvox/mathstat.hpp"
#include "semvox/norms.hpp"
#include "semvox/phonetics.hpp"
#include "semvox/rng.hpp"
#include "semvox/sha256.hpp"
#include "semvox/text.hpp"
#include "support/generators.hpp"

namespace fs = std::filesystem;
using namespace semvox;
using Clock = std::chrono::steady_clock;

namespace {

struct Context {
    fs::path semvox_bin;
    fs::path data_dir;
    fs::path fixtures_dir;
    fs::path work_dir;
    int failures = 0;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(Context& ctx, int criterion, const std::string& name, bool ok,
            const std::string& detail) {
    std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << criterion << ": "
              << name << " (" << detail << ")\n";
    if (!ok) ++ctx.failures;
}

void report_skip(int criterion, const std::string& name, const std::string& why) {
    std::cout << "[SKIP] criterion " << criterion << ": " << name << " (" << why
              << ")\n";
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss.precision(3);
    ss << v;
    return ss.str();
}

// ---- criterion 1: SVD oracle equivalence ------------------------------

void criterion_1(Context& ctx) {
    auto start = Clock::now();
    double worst_rel = 0.0, worst_angle = 0.0;
    bool ok = true;
    const std::size_t k = 10;

    for (std::uint64_t case_no = 0; case_no < 100 && ok; ++case_no) {
        RngStream dims(0xACC1, case_no, 0);
        std::size_t m = 12 + dims.uniform_index(69);  // up to 80
        std::size_t n = 12 + dims.uniform_index(109); // up to 120
        Mat x = testgen::random_dense(m, n, 1000 + case_no);

        oracle::Matrix ox(m, std::vector<double>(n));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < n; ++j) ox[i][j] = x(i, j);
        }
        auto expected = oracle::svd(ox, k);

        for (auto method :
             {lsa::SvdOptions::Method::dense, lsa::SvdOptions::Method::lanczos}) {
            lsa::SvdOptions opts;
            opts.method = method;
            auto f = lsa::truncated_svd_dense(x, k, opts);
            for (std::size_t i = 0; i < k; ++i) {
                double rel = std::abs(f.singular_values[i] - expected.singular_values[i]) /
                             expected.singular_values[i];
                worst_rel = std::max(worst_rel, rel);
            }
            oracle::Matrix got(m, std::vector<double>(k));
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < k; ++j) got[i][j] = f.u(i, j);
            }
            worst_angle = std::max(worst_angle,
                                   oracle::principal_angle(expected.u, got));
        }
        ok = worst_rel <= 1e-8 && worst_angle <= 1e-6;
    }
    double elapsed = seconds_since(start);
    ok = ok && elapsed < 30.0;
    report(ctx, 1, "SVD oracle equivalence", ok,
           "100 matrices, both solver paths; max sv rel err " + fmt(worst_rel) +
               ", max principal angle " + fmt(worst_angle) + " rad, " + fmt(elapsed) +
               " s");
}

// ---- criterion 2: cosine/adjacency properties -------------------------

void criterion_2(Context& ctx) {
    auto start = Clock::now();
    std::size_t checked = 0;
    bool ok = true;
    std::string detail;

    for (std::uint64_t case_no = 0; case_no < 1000 && ok; ++case_no) {
        RngStream rng(0xACC2, case_no, 0);
        std::size_t m = 6 + rng.uniform_index(20);
        std::size_t k = 2 + rng.uniform_index(std::min<std::size_t>(m, 6) - 1);

        // Random orthonormal U and V by Gram-Schmidt on random columns.
        auto orthonormal = [&](std::size_t rows, std::size_t cols) {
            Mat q(rows, cols);
            for (std::size_t j = 0; j < cols; ++j) {
                for (std::size_t i = 0; i < rows; ++i) {
                    q(i, j) = 2.0 * rng.uniform01() - 1.0;
                }
                for (std::size_t p = 0; p < j; ++p) {
                    double dot = 0.0;
                    for (std::size_t i = 0; i < rows; ++i) dot += q(i, p) * q(i, j);
                    for (std::size_t i = 0; i < rows; ++i) q(i, j) -= dot * q(i, p);
                }
                double nrm = 0.0;
                for (std::size_t i = 0; i < rows; ++i) nrm += q(i, j) * q(i, j);
                nrm = std::sqrt(nrm);
                for (std::size_t i = 0; i < rows; ++i) q(i, j) /= nrm;
            }
            return q;
        };

        lsa::SvdFactors f;
        f.k = k;
        f.u = orthonormal(m, k);
        f.v = orthonormal(m + 2, k);
        f.singular_values.resize(k);
        double s = 10.0;
        for (std::size_t i = 0; i < k; ++i) {
            s *= 0.5 + 0.5 * rng.uniform01();
            f.singular_values[i] = s;
        }

        std::vector<std::string> terms;
        for (std::size_t i = 0; i < m; ++i) terms.push_back("w" + std::to_string(i));
        std::size_t n_words = 5 + rng.uniform_index(m - 4);
        std::vector<std::string> words(terms.begin(),
                                       terms.begin() + static_cast<long>(n_words));

        auto adj = lsa::adjacency(f, terms, words);
        for (std::size_t i = 0; i < n_words && ok; ++i) {
            if (std::abs(adj.values(i, i) - 1.0) > 1e-10) ok = false;
            for (std::size_t j = 0; j < n_words; ++j) {
                double v = adj.values(i, j);
                if (!(v >= -1.0 && v <= 1.0)) ok = false;
                if (std::abs(v - adj.values(j, i)) > 1e-10) ok = false;
            }
        }
        if (!ok) {
            detail = "adjacency invariant failed at case " + std::to_string(case_no);
            break;
        }

        // Positive rescaling leaves the synonym argmax unchanged.
        lsa::TermIndex index(terms);
        lsa::SynonymItem item{words[0],
                              {words[1], words[2], words[3], words[4]},
                              static_cast<int>(rng.uniform_index(4))};
        Mat tv = lsa::term_vectors(f);
        auto base = lsa::score_synonym_item(tv, index, item);
        double lambda = 0.001 + 100.0 * rng.uniform01();
        Mat scaled = tv;
        for (auto& x : scaled.data()) x *= lambda;
        auto again = lsa::score_synonym_item(scaled, index, item);
        if (!base || !again || base->chosen_index != again->chosen_index) {
            ok = false;
            detail = "argmax scale invariance failed at case " + std::to_string(case_no);
            break;
        }
        ++checked;
    }
    if (ok) detail = std::to_string(checked) + " randomized cases, zero failures";
    report(ctx, 2, "cosine/adjacency property suite", ok,
           detail + ", " + fmt(seconds_since(start)) + " s");
}

// ---- criterion 3: synonym tuning on the planted corpus ----------------

void criterion_3(Context& ctx) {
    auto start = Clock::now();
    auto planted = testgen::planted_corpus();
    auto tdm = corpus::build_matrix(planted.docs, 1, {}).tdm;
    auto result = lsa::tune_dimensions(tdm, planted.test, {2, 5, 20});

    double acc2 = result.accuracy[0].second;
    double acc5 = result.accuracy[1].second;
    double acc20 = result.accuracy[2].second;
    bool ok = acc5 == 1.0 && acc20 == 1.0 && acc2 < 1.0 && result.k_best == 5;
    report(ctx, 3, "synonym tuning on a planted-topic corpus", ok,
           "accuracy k=2: " + fmt(acc2) + ", k=5: " + fmt(acc5) + ", k=20: " +
               fmt(acc20) + ", k_best=" + std::to_string(result.k_best) +
               "; large-corpus operating points need corpora not shipped here; " +
               fmt(seconds_since(start)) + " s");
}

// ---- criterion 4: bootstrap / AU fit ----------------------------------

void criterion_4(Context& ctx) {
    // (a) noiseless forward-model recovery.
    auto start_a = Clock::now();
    RngStream rng(0xACC4);
    double worst = 0.0;
    const std::vector<double> scales = {0.5, 0.6, 0.7, 0.8, 0.9,
                                        1.0, 1.1, 1.2, 1.3, 1.4};
    for (int i = 0; i < 500; ++i) {
        double v = -3.0 + 6.0 * rng.uniform01();
        double c = 2.0 * rng.uniform01();
        cluster::BpTable table;
        table.node_id = 0;
        for (double r : scales) {
            double z = v * std::sqrt(r) + c / std::sqrt(r);
            double bp = 1.0 - norm_cdf(z);
            table.entries.push_back({r, 1e9, bp * 1e9});
        }
        auto s = cluster::fit_au(table);
        worst = std::max({worst, std::abs(s.v - v), std::abs(s.c - c)});
    }
    bool ok_a = worst <= 1e-6;
    report(ctx, 4, "AU fit recovers the noiseless forward model", ok_a,
           "500 random (v, c), max |error| " + fmt(worst) + ", " +
               fmt(seconds_since(start_a)) + " s");

    // (b) two well-separated Gaussian clusters.
    auto start_b = Clock::now();
    Mat features = testgen::two_gaussian_features(50, 0xACC4B);
    std::vector<std::string> labels;
    for (int i = 0; i < 10; ++i) labels.push_back("o" + std::to_string(i));
    auto tree = cluster::agglomerate(cluster::pearson_distance(features, labels));
    cluster::BootstrapOptions opt;
    opt.scales = scales;
    opt.replicates_per_scale = 1000;
    opt.seed = 20250101;
    opt.threads = 1;
    auto boot = cluster::multiscale_bootstrap(features, tree, opt);

    auto sets = tree.node_leaf_sets();
    double split_au = 1.0, split_se = 0.0; // worst of the two split nodes
    int found = 0;
    for (const auto& table : boot.tables) {
        const auto& leaves = sets[table.node_id];
        if (leaves == std::vector<std::size_t>{0, 1, 2, 3, 4} ||
            leaves == std::vector<std::size_t>{5, 6, 7, 8, 9}) {
            auto s = cluster::fit_au(table);
            split_au = std::min(split_au, s.au);
            split_se = std::max(split_se, s.se_au);
            ++found;
        }
    }
    double elapsed_b = seconds_since(start_b);
    bool ok_b = found == 2 && split_au >= 0.95 && split_se <= 0.02 && elapsed_b < 60.0;
    report(ctx, 4, "true split supported in the two-Gaussian fixture", ok_b,
           "au " + fmt(split_au) + " (>= 0.95), se_au " + fmt(split_se) +
               " (<= 0.02, soft magnitude check vs per-mille-scale errors at 10x "
               "replicates), " + fmt(elapsed_b) + " s single-threaded");

    // (c) thread-count independence.
    auto start_c = Clock::now();
    opt.threads = 8;
    auto boot8 = cluster::multiscale_bootstrap(features, tree, opt);
    bool ok_c = boot.tables.size() == boot8.tables.size();
    for (std::size_t t = 0; ok_c && t < boot.tables.size(); ++t) {
        for (std::size_t s = 0; s < boot.tables[t].entries.size(); ++s) {
            ok_c = ok_c &&
                   boot.tables[t].entries[s].hits == boot8.tables[t].entries[s].hits;
        }
    }
    report(ctx, 4, "seed-fixed bootstrap identical across 1 and 8 threads", ok_c,
           std::to_string(opt.replicates_per_scale) + " replicates x " +
               std::to_string(scales.size()) + " scales, " +
               fmt(seconds_since(start_c)) + " s");
}

// ---- criterion 5: agglomeration oracle --------------------------------

void criterion_5(Context& ctx) {
    auto start = Clock::now();
    bool ok = true;
    std::string detail;
    std::size_t trees = 0;
    for (std::uint64_t seed = 1; seed <= 70 && ok; ++seed) {
        std::size_t w = 3 + seed % 8; // up to 10 leaves
        Mat d = testgen::random_distance_matrix(w, seed * 131);
        cluster::DistanceMatrix dm;
        dm.d = d;
        for (std::size_t i = 0; i < w; ++i) dm.labels.push_back("x" + std::to_string(i));
        for (auto linkage : {cluster::Linkage::average, cluster::Linkage::complete,
                             cluster::Linkage::single}) {
            auto tree = cluster::agglomerate(dm, linkage);
            auto expected = oracle::agglomerate_reference(d, linkage);
            double prev = -1.0;
            for (std::size_t t = 0; t < expected.size(); ++t) {
                if (tree.merges[t].left != expected[t].left ||
                    tree.merges[t].right != expected[t].right ||
                    std::abs(tree.merges[t].height - expected[t].height) > 1e-12 ||
                    tree.merges[t].height < prev - 1e-12) {
                    ok = false;
                    detail = "mismatch at seed " + std::to_string(seed);
                }
                prev = tree.merges[t].height;
            }
            ++trees;
        }
    }
    if (ok) detail = std::to_string(trees) + " trees, all three linkages identical";
    report(ctx, 5, "agglomeration equals the exhaustive reference", ok,
           detail + ", " + fmt(seconds_since(start)) + " s");
}

// ---- criterion 6: phonemizer golden set -------------------------------

void criterion_6(Context& ctx) {
    auto start = Clock::now();
    auto parse = phonetics::load_cmudict(ctx.data_dir / "cmudict_pinned.txt");
    const std::vector<std::array<std::string, 3>> golden = {
        {"pick", "P IH1 K", "IH"},         {"pinch", "P IH1 N CH", "IH"},
        {"squeeze", "S K W IY1 Z", "IY"},  {"wink", "W IH1 NG K", "IH"},
        {"lick", "L IH1 K", "IH"},         {"pull", "P UH1 L", "UH"},
        {"push", "P UH1 SH", "UH"},        {"poke", "P OW1 K", "OW"},
        {"chew", "CH UW1", "UW"},          {"chop", "CH AA1 P", "AA"},
        {"swallow", "S W AA1 L OW0", "AA"}, {"throw", "TH R OW1", "OW"},
        {"peck", "P EH1 K", "EH"},         {"bite", "B AY1 T", "AY"},
        {"scrape", "S K R EY1 P", "EY"},   {"suck", "S AH1 K", "AH"},
        {"smile", "S M AY1 L", "AY"},      {"gaze", "G EY1 Z", "EY"},
        {"frown", "F R AW1 N", "AW"},      {"sob", "S AA1 B", "AA"},
        {"hate", "HH EY1 T", "EY"},        {"glance", "G L AE1 N S", "AE"},
        {"glare", "G L EH1 R", "EH"},      {"leer", "L IH1 R", "IH"},
        {"fear", "F IH1 R", "IH"},         {"sneer", "S N IH1 R", "IH"},
        {"stare", "S T EH1 R", "EH"},      {"scare", "S K EH1 R", "EH"},
    };
    bool ok = true;
    std::string detail;
    for (const auto& [word, transcription, vowel] : golden) {
        try {
            auto seq = phonetics::phonemize(word, parse.lexicon);
            auto sv = phonetics::primary_stress_vowel(seq);
            if (seq.to_string() != transcription || sv.token.symbol != vowel) {
                ok = false;
                detail = word + " gave '" + seq.to_string() + "' / " + sv.token.symbol;
                break;
            }
        } catch (const std::exception& e) {
            ok = false;
            detail = word + ": " + e.what();
            break;
        }
    }
    if (ok) detail = std::to_string(golden.size()) + " transcriptions exact";
    report(ctx, 6, "phonemizer golden set", ok,
           detail + ", " + fmt(seconds_since(start)) + " s");
}

// ---- criterion 7: published norms statistics --------------------------

void criterion_7(Context& ctx) {
    fs::path csv;
    if (const char* env = std::getenv("SEMVOX_NORMS_CSV")) csv = env;
    if (csv.empty()) {
        fs::path conventional = ctx.data_dir / "norms" / "Ratings_Warriner_et_al.csv";
        if (fs::exists(conventional)) csv = conventional;
    }
    if (csv.empty() || !fs::exists(csv)) {
        report_skip(7, "affect norms statistics",
                    "norms CSV not supplied; set SEMVOX_NORMS_CSV or place "
                    "Ratings_Warriner_et_al.csv under data/norms/ to enable");
        return;
    }

    auto start = Clock::now();
    auto load = norms::load_norms_file(csv);
    std::vector<double> valence, arousal, dominance;
    load.table.for_each([&](const norms::NormRecord& r) {
        valence.push_back(r.valence);
        arousal.push_back(r.arousal);
        dominance.push_back(r.dominance);
    });
    auto near = [](double got, double want) { return std::abs(got - want) <= 0.01; };
    auto minmax = [](const std::vector<double>& xs) {
        double lo = xs[0], hi = xs[0];
        for (double x : xs) {
            lo = std::min(lo, x);
            hi = std::max(hi, x);
        }
        return std::pair<double, double>{lo, hi};
    };
    auto [v_lo, v_hi] = minmax(valence);
    auto [a_lo, a_hi] = minmax(arousal);
    auto [d_lo, d_hi] = minmax(dominance);

    bool ok = near(v_lo, 1.26) && near(v_hi, 8.48) && near(mean(valence), 5.06) &&
              near(population_sd(valence), 1.68) && near(a_lo, 1.60) &&
              near(a_hi, 7.79) && near(mean(arousal), 4.21) &&
              near(population_sd(arousal), 2.30) && near(d_lo, 1.68) &&
              near(d_hi, 7.74) && near(mean(dominance), 5.18) &&
              near(population_sd(dominance), 2.16);

    auto stats = norms::cluster_stats({"hate", "sob", "fear", "dread", "groan"},
                                      load.table);
    ok = ok && near(stats.valence.min, 1.96) && near(stats.valence.max, 3.90) &&
         near(stats.valence.mean, 2.93);

    report(ctx, 7, "affect norms statistics", ok,
           "global valence " + fmt(v_lo) + "-" + fmt(v_hi) + " M " +
               fmt(mean(valence)) + "; negative-cluster valence M " +
               fmt(stats.valence.mean) + ", " + fmt(seconds_since(start)) + " s");
}

// ---- criterion 8: end-to-end determinism through the CLI --------------

std::map<std::string, std::string> dir_hashes(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        out[fs::relative(entry.path(), dir).string()] = sha256_file_hex(entry.path());
    }
    return out;
}

void criterion_8(Context& ctx) {
    auto start = Clock::now();
    fs::remove_all(ctx.work_dir);
    fs::create_directories(ctx.work_dir);
    fs::path run1 = ctx.work_dir / "run1";
    fs::path run2 = ctx.work_dir / "run2";
    fs::path config = ctx.fixtures_dir / "run_fixture.toml";

    auto invoke = [&](const fs::path& out) {
        std::string cmd = "\"" + ctx.semvox_bin.string() + "\" run --config \"" +
                          config.string() + "\" --out \"" + out.string() +
                          "\" > /dev/null";
        return std::system(cmd.c_str());
    };
    int rc1 = invoke(run1);
    int rc2 = invoke(run2);

    bool ok = rc1 == 0 && rc2 == 0;
    std::string detail;
    if (!ok) {
        detail = "CLI exit codes " + std::to_string(rc1) + "/" + std::to_string(rc2);
    } else {
        auto h1 = dir_hashes(run1), h2 = dir_hashes(run2);
        ok = h1 == h2 && !h1.empty();
        std::size_t svgs = 0;
        for (const auto& [name, hash] : h1) {
            if (name.size() > 4 && name.substr(name.size() - 4) == ".svg") ++svgs;
        }
        ok = ok && svgs == 4;
        detail = std::to_string(h1.size()) + " artifacts, " + std::to_string(svgs) +
                 " figures, byte-identical";
    }
    double elapsed = seconds_since(start);
    ok = ok && elapsed < 120.0;
    report(ctx, 8, "end-to-end determinism via the CLI", ok,
           detail + ", " + fmt(elapsed) + " s for both runs");
}

} // namespace

int main(int argc, char** argv) {
    Context ctx;
    for (int i = 1; i + 1 < argc; i += 2) {
        std::string flag = argv[i];
        if (flag == "--semvox-bin") ctx.semvox_bin = argv[i + 1];
        else if (flag == "--data-dir") ctx.data_dir = argv[i + 1];
        else if (flag == "--fixtures-dir") ctx.fixtures_dir = argv[i + 1];
        else if (flag == "--work-dir") ctx.work_dir = argv[i + 1];
    }
    if (ctx.semvox_bin.empty() || ctx.data_dir.empty() || ctx.fixtures_dir.empty() ||
        ctx.work_dir.empty()) {
        std::cerr << "usage: semvox_acceptance --semvox-bin PATH --data-dir DIR "
                     "--fixtures-dir DIR --work-dir DIR\n";
        return 64;
    }

    try {
        criterion_1(ctx);
        criterion_2(ctx);
        criterion_3(ctx);
        criterion_4(ctx);
        criterion_5(ctx);
        criterion_6(ctx);
        criterion_7(ctx);
        criterion_8(ctx);
    } catch (const std::exception& e) {
        std::cerr << "acceptance suite aborted: " << e.what() << "\n";
        return 70;
    }

    std::cout << (ctx.failures == 0 ? "all criteria passed\n"
                                    : std::to_string(ctx.failures) +
                                          " criterion(s) failed\n");
    return ctx.failures;
}
