// semvox: corpus-to-figures pipeline for latent-semantic word clustering
// with bootstrap cluster support, affect norms and vowel-space projection.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "semvox/cluster.hpp"
#include "semvox/corpus.hpp"
#include "semvox/error.hpp"
#include "semvox/lsa.hpp"
#include "semvox/norms.hpp"
#include "semvox/phonetics.hpp"
#include "semvox/pipeline.hpp"
#include "semvox/report.hpp"
#include "semvox/text.hpp"
#include "semvox/version.hpp"

namespace fs = std::filesystem;
using namespace semvox;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitRuntime = 3;

std::vector<std::string> read_words(const fs::path& p, bool lowercase) {
    std::ifstream in(p);
    if (!in) throw PipelineError("cannot open word list: " + p.string());
    std::vector<std::string> words;
    std::set<std::string> seen;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string w = trim(line);
        if (w.empty() || w[0] == '#') continue;
        if (lowercase) w = to_lower_ascii(w);
        if (seen.insert(w).second) words.push_back(std::move(w));
    }
    return words;
}

struct CommonRunFlags {
    std::string config_file;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> k;
    std::optional<double> alpha;
    std::optional<std::string> out;

    pipeline::RunConfig load() const {
        pipeline::Overrides ov;
        ov.seed = seed;
        ov.k = k;
        ov.alpha = alpha;
        if (out) ov.out = fs::path(*out);
        return pipeline::load_config(config_file, ov);
    }
};

void add_run_flags(CLI::App* cmd, CommonRunFlags& flags) {
    cmd->add_option("--config", flags.config_file, "Run config (TOML)")->required();
    cmd->add_option("--seed", [&flags](const CLI::results_t& r) {
        flags.seed = static_cast<std::uint64_t>(std::stoull(r[0]));
        return true;
    }, "Override the config seed");
    cmd->add_option("--k", [&flags](const CLI::results_t& r) {
        flags.k = static_cast<std::size_t>(std::stoull(r[0]));
        return true;
    }, "Override the LSA dimensionality");
    cmd->add_option("--alpha", [&flags](const CLI::results_t& r) {
        flags.alpha = std::stod(r[0]);
        return true;
    }, "Override the significance level");
    cmd->add_option("--out", [&flags](const CLI::results_t& r) {
        flags.out = r[0];
        return true;
    }, "Override the output directory");
}

corpus::TermDocumentMatrix import_matrix_dir(const fs::path& dir,
                                             const std::string& label) {
    return corpus::import_matrix(dir / ("matrix_" + label + ".txt"),
                                 dir / ("terms_" + label + ".txt"),
                                 dir / ("docs_" + label + ".txt"));
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"semvox: latent-semantic clustering of words with bootstrap "
                 "support values, affect norms and vowel-space projections"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    // ---- run ----
    CommonRunFlags run_flags;
    CLI::App* cmd_run = app.add_subcommand("run", "Full corpus-to-figures pipeline");
    add_run_flags(cmd_run, run_flags);

    // ---- ingest ----
    struct {
        std::string corpus, layout = "lines", weighting = "log-entropy", out;
        std::size_t min_term_freq = 2;
        std::string label = "corpus", stopwords;
        bool keep_case = false;
        std::size_t min_token_length = 1;
    } ingest;
    CLI::App* cmd_ingest =
        app.add_subcommand("ingest", "Build and export the weighted term-document matrix");
    cmd_ingest->add_option("--corpus", ingest.corpus, "Corpus file or directory")
        ->required();
    cmd_ingest->add_option("--layout", ingest.layout, "lines|dir");
    cmd_ingest->add_option("--weighting", ingest.weighting, "raw|tf-idf|log-entropy");
    cmd_ingest->add_option("--min-term-freq", ingest.min_term_freq,
                           "Vocabulary frequency floor");
    cmd_ingest->add_option("--min-token-length", ingest.min_token_length,
                           "Shortest kept token");
    cmd_ingest->add_option("--stopwords", ingest.stopwords, "Stopword file");
    cmd_ingest->add_flag("--keep-case", ingest.keep_case, "Skip lowercasing");
    cmd_ingest->add_option("--label", ingest.label, "Artifact name stem");
    cmd_ingest->add_option("--out", ingest.out, "Output directory")->required();

    // ---- tune ----
    struct {
        std::string matrix_dir, label = "corpus", synonyms, out;
        std::vector<std::size_t> candidates;
    } tune;
    CLI::App* cmd_tune =
        app.add_subcommand("tune", "Pick k by synonym-test accuracy");
    cmd_tune->add_option("--matrix", tune.matrix_dir, "Directory with exported matrix")
        ->required();
    cmd_tune->add_option("--label", tune.label, "Matrix label");
    cmd_tune->add_option("--synonyms", tune.synonyms, "Synonym test file")->required();
    cmd_tune->add_option("--k-candidates", tune.candidates, "Candidate dimensionalities")
        ->required()
        ->delimiter(',');
    cmd_tune->add_option("--out", tune.out, "Accuracy CSV path");

    // ---- adjacency ----
    struct {
        std::string matrix_dir, label = "corpus", words, out;
        std::size_t k = 0;
        bool keep_case = false;
    } adjc;
    CLI::App* cmd_adj =
        app.add_subcommand("adjacency", "Truncated SVD and cosine adjacency matrix");
    cmd_adj->add_option("--matrix", adjc.matrix_dir, "Directory with exported matrix")
        ->required();
    cmd_adj->add_option("--label", adjc.label, "Matrix label");
    cmd_adj->add_option("--words", adjc.words, "Word list file")->required();
    cmd_adj->add_option("--k", adjc.k, "Dimensionality")->required();
    cmd_adj->add_flag("--keep-case", adjc.keep_case, "Skip lowercasing the word list");
    cmd_adj->add_option("--out", adjc.out, "Output directory")->required();

    // ---- cluster ----
    struct {
        std::string adjacency, out, linkage = "average";
        std::vector<double> scales = {0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4};
        std::size_t replicates = 10000;
        std::uint64_t seed = 0;
        bool seed_set = false;
        double alpha = 0.05;
        unsigned threads = 1;
        std::string label = "corpus";
    } clus;
    CLI::App* cmd_cluster = app.add_subcommand(
        "cluster", "Agglomerate, bootstrap and extract significant clusters");
    cmd_cluster->add_option("--adjacency", clus.adjacency, "Adjacency CSV")->required();
    cmd_cluster->add_option("--linkage", clus.linkage, "average|complete|single");
    cmd_cluster->add_option("--scales", clus.scales, "Bootstrap scales")->delimiter(',');
    cmd_cluster->add_option("--replicates", clus.replicates, "Replicates per scale");
    cmd_cluster
        ->add_option("--seed",
                     [&clus](const CLI::results_t& r) {
                         clus.seed = std::stoull(r[0]);
                         clus.seed_set = true;
                         return true;
                     },
                     "Bootstrap seed (required)")
        ->required();
    cmd_cluster->add_option("--alpha", clus.alpha, "Significance level");
    cmd_cluster->add_option("--threads", clus.threads, "Worker threads");
    cmd_cluster->add_option("--label", clus.label, "Artifact name stem");
    cmd_cluster->add_option("--out", clus.out, "Output directory")->required();

    // ---- annotate ----
    struct {
        std::string clusters_csv, norms_csv, out;
        std::string word_col = "Word", val_col = "V.Mean.Sum", aro_col = "A.Mean.Sum",
                    dom_col = "D.Mean.Sum";
    } annot;
    CLI::App* cmd_annotate =
        app.add_subcommand("annotate", "Affect-norm statistics per cluster");
    cmd_annotate->add_option("--clusters", annot.clusters_csv, "significant_*.csv file")
        ->required();
    cmd_annotate->add_option("--norms", annot.norms_csv, "Norms CSV")->required();
    cmd_annotate->add_option("--word-column", annot.word_col, "Word column name");
    cmd_annotate->add_option("--valence-column", annot.val_col, "Valence column name");
    cmd_annotate->add_option("--arousal-column", annot.aro_col, "Arousal column name");
    cmd_annotate->add_option("--dominance-column", annot.dom_col,
                             "Dominance column name");
    cmd_annotate->add_option("--out", annot.out, "Output CSV path")->required();

    // ---- phonemes ----
    struct {
        std::string words, dict, table, out;
        bool keep_case = false;
    } phon;
    CLI::App* cmd_phonemes = app.add_subcommand(
        "phonemes", "Transcribe words and project stress vowels to formant space");
    cmd_phonemes->add_option("--words", phon.words, "Word list file")->required();
    cmd_phonemes->add_option("--dict", phon.dict, "Pronunciation dictionary")->required();
    cmd_phonemes->add_option("--table", phon.table, "Feature/formant table CSV")
        ->required();
    cmd_phonemes->add_flag("--keep-case", phon.keep_case, "Skip lowercasing");
    cmd_phonemes->add_option("--out", phon.out, "Output directory")->required();

    // ---- figures ----
    struct {
        std::string run_dir, out, bold;
        double alpha = 0.05;
    } figs;
    CLI::App* cmd_figures =
        app.add_subcommand("figures", "Re-render the figure set from run artifacts");
    cmd_figures->add_option("--run", figs.run_dir, "Run directory with meta.json")
        ->required();
    cmd_figures->add_option("--alpha", figs.alpha, "Significance level");
    cmd_figures->add_option("--bold", figs.bold,
                            "bold_words.json from `compare` for leaf highlighting");
    cmd_figures->add_option("--out", figs.out, "Output directory (default: run dir)");

    // ---- compare ----
    struct {
        std::string meta_a, meta_b, out = "compare_out";
        double alpha = 0.05;
    } comp;
    CLI::App* cmd_compare =
        app.add_subcommand("compare", "Cross-corpus shared-cluster report");
    cmd_compare->add_option("meta_a", comp.meta_a, "First run meta.json")->required();
    cmd_compare->add_option("meta_b", comp.meta_b, "Second run meta.json")->required();
    cmd_compare->add_option("--alpha", comp.alpha, "Significance level");
    cmd_compare->add_option("--out", comp.out, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitValidation;
    }

    try {
        if (cmd_run->parsed()) {
            pipeline::RunReport report = pipeline::run_pipeline(run_flags.load());
            std::cout << "run complete: " << report.output_dir.string() << " ("
                      << report.artifacts.size() << " artifacts, k=" << report.k_used
                      << ")\n";
        } else if (cmd_ingest->parsed()) {
            corpus::TokenizerConfig tok;
            tok.lowercase = !ingest.keep_case;
            tok.min_token_length = ingest.min_token_length;
            if (!ingest.stopwords.empty()) {
                for (const auto& w : read_words(ingest.stopwords, tok.lowercase)) {
                    tok.stopwords.insert(w);
                }
            }
            corpus::DocumentSet docs = ingest.layout == "dir"
                                           ? corpus::load_corpus_dir(ingest.corpus)
                                           : corpus::load_corpus_lines(ingest.corpus);
            auto built = corpus::build_matrix(docs, ingest.min_term_freq, tok);
            auto weighted = corpus::apply_weighting(
                built.tdm, corpus::weighting_from_name(ingest.weighting));
            for (const auto& w : built.warnings) {
                std::cerr << "warning: " << w.subject << ": " << w.reason << "\n";
            }
            for (const auto& w : weighted.warnings) {
                std::cerr << "warning: " << w.subject << ": " << w.reason << "\n";
            }
            fs::create_directories(ingest.out);
            fs::path dir(ingest.out);
            corpus::export_matrix(weighted.tdm,
                                  dir / ("matrix_" + ingest.label + ".txt"),
                                  dir / ("terms_" + ingest.label + ".txt"),
                                  dir / ("docs_" + ingest.label + ".txt"));
            std::cout << "matrix: " << weighted.tdm.term_count() << " terms x "
                      << weighted.tdm.doc_count() << " docs, "
                      << weighted.tdm.nnz() << " entries\n";
        } else if (cmd_tune->parsed()) {
            auto tdm = import_matrix_dir(tune.matrix_dir, tune.label);
            auto test = lsa::load_synonym_test(tune.synonyms);
            auto result = lsa::tune_dimensions(tdm, test, tune.candidates);
            std::cout << "k,accuracy\n";
            std::ostringstream csv;
            csv << "k,accuracy\n";
            for (auto& [k, acc] : result.accuracy) {
                std::cout << k << ',' << format_g17(acc) << "\n";
                csv << k << ',' << format_g17(acc) << '\n';
            }
            std::cout << "k_best=" << result.k_best << " scoreable=" << result.scoreable
                      << " skipped=" << result.skipped << "\n";
            if (!tune.out.empty()) write_file(tune.out, csv.str());
        } else if (cmd_adj->parsed()) {
            auto tdm = import_matrix_dir(adjc.matrix_dir, adjc.label);
            auto factors = lsa::truncated_svd(tdm, adjc.k);
            auto words = read_words(adjc.words, !adjc.keep_case);
            auto adj = lsa::adjacency(factors, tdm.terms, words);
            fs::create_directories(adjc.out);
            fs::path dir(adjc.out);
            lsa::export_factors(factors, dir / ("factors_" + adjc.label + ".txt"));
            lsa::export_adjacency(adj, dir / ("adjacency_" + adjc.label + ".csv"));
            std::cout << "adjacency: " << adj.words.size() << " words, k=" << adjc.k
                      << "\n";
        } else if (cmd_cluster->parsed()) {
            auto adj = lsa::import_adjacency(clus.adjacency);
            auto dm = cluster::pearson_distance(adj.values, adj.words);
            auto linkage = cluster::linkage_from_name(clus.linkage);
            auto tree = cluster::agglomerate(dm, linkage);
            cluster::BootstrapOptions opt;
            opt.scales = clus.scales;
            opt.replicates_per_scale = clus.replicates;
            opt.seed = clus.seed;
            opt.linkage = linkage;
            opt.threads = clus.threads;
            auto boot = cluster::multiscale_bootstrap(adj.values, tree, opt);
            std::vector<cluster::ClusterSupport> supports;
            for (const auto& t : boot.tables) supports.push_back(cluster::fit_au(t));
            fs::create_directories(clus.out);
            fs::path dir(clus.out);
            write_file(dir / ("dendrogram_" + clus.label + ".newick"),
                       cluster::to_newick(tree));
            cluster::export_support_json(dir / ("support_" + clus.label + ".json"),
                                         tree, supports);
            cluster::export_significant_csv(
                dir / ("significant_" + clus.label + ".csv"), tree, supports,
                clus.alpha);
            auto sig = cluster::significant_clusters(tree, supports, clus.alpha);
            std::cout << "clusters: " << sig.size() << " significant at alpha="
                      << clus.alpha << "\n";
        } else if (cmd_annotate->parsed()) {
            norms::ColumnMap columns{annot.word_col, annot.val_col, annot.aro_col,
                                     annot.dom_col};
            auto load = norms::load_norms_file(annot.norms_csv, columns);
            for (const auto& d : load.rejected) {
                std::cerr << "norms row " << d.row << ": " << d.reason << "\n";
            }
            std::ifstream in(annot.clusters_csv);
            if (!in) throw PipelineError("cannot open clusters CSV: " + annot.clusters_csv);
            auto rows = read_csv(in);
            std::vector<std::pair<std::string, norms::ClusterStats>> stats;
            for (std::size_t i = 1; i < rows.size(); ++i) {
                if (rows[i].size() < 2) continue;
                auto members = split(rows[i][1], ';');
                stats.emplace_back(rows[i][0],
                                   norms::cluster_stats(members, load.table));
            }
            norms::export_cluster_stats_csv(annot.out, stats);
            std::cout << "annotated " << stats.size() << " cluster(s)\n";
        } else if (cmd_phonemes->parsed()) {
            auto words = read_words(phon.words, !phon.keep_case);
            auto lex = phonetics::load_cmudict(phon.dict);
            for (const auto& d : lex.rejected) {
                std::cerr << "dictionary line " << d.line_no << ": " << d.reason << "\n";
            }
            auto table = phonetics::FeatureTable::load(phon.table);
            fs::create_directories(phon.out);
            fs::path dir(phon.out);
            std::ostringstream csv;
            csv << "word,transcription,stress_vowel\n";
            for (const auto& w : words) {
                auto seq = phonetics::phonemize(w, lex.lexicon);
                auto sv = phonetics::primary_stress_vowel(seq);
                csv << csv_escape(w) << ',' << seq.to_string() << ',' << sv.token.symbol
                    << '\n';
                if (sv.fallback) {
                    std::cerr << "warning: " << w << ": no primary-stress vowel\n";
                }
            }
            write_file(dir / "phonemes.csv", csv.str());
            auto points = phonetics::project_vowel_space(words, lex.lexicon, table);
            phonetics::export_projection_csv(dir / "projection.csv", points);
            std::cout << "phonemes: " << words.size() << " word(s)\n";
        } else if (cmd_figures->parsed()) {
            fs::path run_dir(figs.run_dir);
            auto meta = nlohmann::json::parse(read_file(run_dir / "meta.json"));
            std::string label = meta.at("label").get<std::string>();
            fs::path out_dir = figs.out.empty() ? run_dir : fs::path(figs.out);
            fs::create_directories(out_dir);
            report::RenderMeta rmeta{meta.at("config_hash").get<std::string>(),
                                     meta.value("feature_table_version", "")};

            auto adj = lsa::import_adjacency(
                run_dir / meta.at("artifacts").at("adjacency").get<std::string>());
            auto sup = cluster::import_support_json(
                run_dir / meta.at("artifacts").at("support").get<std::string>());
            auto points = phonetics::import_projection_csv(
                run_dir / meta.at("artifacts").at("projection").get<std::string>());

            std::vector<std::string> bold;
            if (!figs.bold.empty()) {
                auto bj = nlohmann::json::parse(read_file(figs.bold));
                bold = bj.at("bold_words").get<std::vector<std::string>>();
            }

            write_file(out_dir / ("heatmap_" + label + ".svg"),
                       report::render_heatmap(adj, adj.words, rmeta).to_svg());
            write_file(out_dir / ("dendrogram_" + label + ".svg"),
                       report::render_dendrogram(sup.tree, sup.supports, figs.alpha,
                                                 bold, rmeta)
                           .to_svg());
            write_file(out_dir / ("seplot_" + label + ".svg"),
                       report::render_se_plot(sup.supports, rmeta).to_svg());
            auto clusters =
                cluster::significant_clusters(sup.tree, sup.supports, figs.alpha);
            std::vector<std::pair<std::string, std::string>> groups;
            for (std::size_t i = 0; i < clusters.size(); ++i) {
                for (const auto& w : clusters[i]) {
                    groups.emplace_back(w, "cluster " + std::to_string(i + 1));
                }
            }
            write_file(out_dir / "vowelchart_all.svg",
                       report::render_vowel_chart(points, groups, rmeta).to_svg());
            std::cout << "figures written to " << out_dir.string() << "\n";
        } else if (cmd_compare->parsed()) {
            auto result = pipeline::compare_runs(comp.meta_a, comp.meta_b, comp.alpha,
                                                 comp.out);
            std::cout << "shared pairs: " << result.report.pairs.size() << "\n";
            for (const auto& [a, b] : result.report.pairs) {
                std::cout << a << "," << b << "\n";
            }
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return 0;
}
