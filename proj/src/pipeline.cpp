#include "semvox/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "semvox/error.hpp"
#include "semvox/phonetics.hpp"
#include "semvox/report.hpp"
#include "semvox/sha256.hpp"
#include "semvox/text.hpp"
#include "semvox/toml.hpp"
#include "semvox/version.hpp"

namespace semvox::pipeline {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<std::string> read_word_list(const fs::path& file, bool lowercase) {
    std::ifstream in(file);
    if (!in) throw PipelineError("cannot open word list: " + file.string());
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
    if (words.empty()) throw PipelineError("word list is empty: " + file.string());
    return words;
}

// Tracks written artifacts so a failed run can clean up after itself
// and the metadata can list them under stable keys.
class ArtifactSink {
public:
    explicit ArtifactSink(fs::path dir) : dir_(std::move(dir)) {}

    fs::path path_of(const std::string& name) const { return dir_ / name; }

    void note(const std::string& key, const std::string& name) {
        entries_.emplace_back(key, name);
    }

    const std::vector<std::pair<std::string, std::string>>& entries() const {
        return entries_;
    }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        out.reserve(entries_.size());
        for (const auto& [k, n] : entries_) out.push_back(n);
        return out;
    }

    void remove_all() {
        for (const auto& [k, n] : entries_) {
            std::error_code ec;
            fs::remove(dir_ / n, ec);
        }
        entries_.clear();
    }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> entries_;
};

template <typename F>
auto stage(const char* name, F&& f) {
    try {
        return f();
    } catch (const std::exception& e) {
        throw PipelineError("stage " + std::string(name) + ": " + e.what());
    }
}

json config_echo(const RunConfig& c) {
    json j;
    j["corpus"] = {{"path", c.corpus_path.string()},
                   {"layout", c.corpus_layout},
                   {"min_term_freq", c.min_term_freq},
                   {"weighting", std::string(corpus::weighting_name(c.weighting))},
                   {"label", c.label}};
    j["tokenizer"] = {{"lowercase", c.lowercase},
                      {"min_token_length", c.min_token_length},
                      {"stopwords_path", c.stopwords_path.string()}};
    json lsa_j = {{"max_iterations", c.svd.max_iterations},
                  {"tolerance", c.svd.tolerance},
                  {"dense_cutoff", c.svd.dense_cutoff}};
    if (c.k) lsa_j["k"] = *c.k;
    if (!c.k_candidates.empty()) {
        lsa_j["k_candidates"] = c.k_candidates;
        lsa_j["synonym_test"] = c.synonym_test_path.string();
    }
    j["lsa"] = lsa_j;
    j["words"] = {{"path", c.words_path.string()}};
    j["cluster"] = {{"linkage", std::string(cluster::linkage_name(c.linkage))},
                    {"scales", c.scales},
                    {"replicates_per_scale", c.replicates_per_scale},
                    {"alpha", c.alpha},
                    {"threads", c.threads}};
    j["seed"] = c.seed;
    if (!c.norms_path.empty()) {
        j["norms"] = {{"path", c.norms_path.string()},
                      {"word_column", c.norm_columns.word},
                      {"valence_column", c.norm_columns.valence},
                      {"arousal_column", c.norm_columns.arousal},
                      {"dominance_column", c.norm_columns.dominance}};
    }
    j["phonetics"] = {{"dictionary", c.dictionary_path.string()},
                      {"feature_table", c.feature_table_path.string()}};
    // The output directory is deliberately not part of the echo:
    // artifacts are addressed relative to the metadata file, and two
    // runs into different directories must stay byte-identical.
    j["output"] = {{"dir", "."}};
    return j;
}

} // namespace

void RunConfig::validate() const {
    auto need_file = [](const fs::path& p, const char* what) {
        if (p.empty()) {
            throw ValidationError(std::string("config: missing ") + what);
        }
        if (!fs::exists(p)) {
            throw ValidationError(std::string("config: ") + what + " does not exist: " +
                                  p.string());
        }
    };
    need_file(corpus_path, "corpus path");
    need_file(words_path, "word list path");
    need_file(dictionary_path, "dictionary path");
    need_file(feature_table_path, "feature table path");
    if (!norms_path.empty()) need_file(norms_path, "norms path");
    if (!stopwords_path.empty()) need_file(stopwords_path, "stopwords path");

    if (corpus_layout != "lines" && corpus_layout != "dir") {
        throw ValidationError("config: corpus layout must be 'lines' or 'dir'");
    }
    if (min_term_freq < 1) throw ValidationError("config: min_term_freq must be >= 1");
    if (!seed_set) throw ValidationError("config: seed is required (no implicit default)");
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ValidationError("config: alpha must be in (0, 1)");
    }
    bool has_k = k.has_value();
    bool has_candidates = !k_candidates.empty();
    if (has_k == has_candidates) {
        throw ValidationError("config: exactly one of lsa.k / lsa.k_candidates");
    }
    if (has_candidates) need_file(synonym_test_path, "synonym test path");
    if (scales.empty()) throw ValidationError("config: cluster scales must be nonempty");
    for (double r : scales) {
        if (!(r > 0.0)) throw ValidationError("config: scales must be positive");
    }
    if (replicates_per_scale < 1) {
        throw ValidationError("config: replicates_per_scale must be >= 1");
    }
    if (threads < 1) throw ValidationError("config: threads must be >= 1");
    if (output_dir.empty()) throw ValidationError("config: missing output dir");
}

RunConfig load_config(const fs::path& file, const Overrides& overrides) {
    if (!fs::exists(file)) {
        throw ValidationError("config file does not exist: " + file.string());
    }
    toml::Document doc = toml::parse_file(file);
    fs::path base = fs::absolute(file).parent_path();
    auto resolve = [&base](const std::string& p) -> fs::path {
        fs::path path(p);
        return path.is_absolute() ? path : base / path;
    };

    RunConfig c;
    if (auto v = doc.get_string("corpus.path")) c.corpus_path = resolve(*v);
    if (auto v = doc.get_string("corpus.layout")) c.corpus_layout = *v;
    if (auto v = doc.get_int("corpus.min_term_freq")) {
        c.min_term_freq = static_cast<std::size_t>(*v);
    }
    if (auto v = doc.get_string("corpus.weighting")) {
        c.weighting = corpus::weighting_from_name(*v);
    }
    if (auto v = doc.get_string("label")) c.label = *v;
    if (c.label.empty() && !c.corpus_path.empty()) c.label = c.corpus_path.stem().string();

    if (auto v = doc.get_bool("tokenizer.lowercase")) c.lowercase = *v;
    if (auto v = doc.get_int("tokenizer.min_token_length")) {
        c.min_token_length = static_cast<std::size_t>(*v);
    }
    if (auto v = doc.get_string("tokenizer.stopwords_path"); v && !v->empty()) {
        c.stopwords_path = resolve(*v);
    }

    if (auto v = doc.get_int("lsa.k")) c.k = static_cast<std::size_t>(*v);
    if (doc.contains("lsa.k_candidates")) {
        for (auto v : doc.at("lsa.k_candidates").as_int_array()) {
            c.k_candidates.push_back(static_cast<std::size_t>(v));
        }
    }
    if (auto v = doc.get_string("lsa.synonym_test"); v && !v->empty()) {
        c.synonym_test_path = resolve(*v);
    }
    if (auto v = doc.get_int("lsa.max_iterations")) {
        c.svd.max_iterations = static_cast<std::size_t>(*v);
    }
    if (auto v = doc.get_double("lsa.tolerance")) c.svd.tolerance = *v;
    if (auto v = doc.get_int("lsa.dense_cutoff")) {
        c.svd.dense_cutoff = static_cast<std::size_t>(*v);
    }

    if (auto v = doc.get_string("words.path")) c.words_path = resolve(*v);

    if (auto v = doc.get_string("cluster.linkage")) {
        c.linkage = cluster::linkage_from_name(*v);
    }
    if (doc.contains("cluster.scales")) {
        c.scales = doc.at("cluster.scales").as_double_array();
    }
    if (auto v = doc.get_int("cluster.replicates_per_scale")) {
        c.replicates_per_scale = static_cast<std::size_t>(*v);
    }
    if (auto v = doc.get_double("cluster.alpha")) c.alpha = *v;
    if (auto v = doc.get_int("cluster.threads")) {
        c.threads = static_cast<unsigned>(*v);
    }

    if (doc.contains("seed")) {
        c.seed = static_cast<std::uint64_t>(doc.at("seed").as_int());
        c.seed_set = true;
    }

    if (auto v = doc.get_string("norms.path"); v && !v->empty()) {
        c.norms_path = resolve(*v);
    }
    if (auto v = doc.get_string("norms.word_column")) c.norm_columns.word = *v;
    if (auto v = doc.get_string("norms.valence_column")) c.norm_columns.valence = *v;
    if (auto v = doc.get_string("norms.arousal_column")) c.norm_columns.arousal = *v;
    if (auto v = doc.get_string("norms.dominance_column")) c.norm_columns.dominance = *v;

    if (auto v = doc.get_string("phonetics.dictionary")) {
        c.dictionary_path = resolve(*v);
    }
    if (auto v = doc.get_string("phonetics.feature_table")) {
        c.feature_table_path = resolve(*v);
    }

    if (auto v = doc.get_string("output.dir")) c.output_dir = resolve(*v);

    // Flags win over the file.
    if (overrides.seed) {
        c.seed = *overrides.seed;
        c.seed_set = true;
    }
    if (overrides.k) {
        c.k = *overrides.k;
        c.k_candidates.clear();
    }
    if (overrides.alpha) c.alpha = *overrides.alpha;
    if (overrides.out) c.output_dir = *overrides.out;

    c.validate();
    return c;
}

RunReport run_pipeline(const RunConfig& config) {
    config.validate();

    fs::create_directories(config.output_dir);
    if (fs::exists(config.output_dir / "meta.json")) {
        throw PipelineError("output directory already contains a run: " +
                            config.output_dir.string());
    }

    ArtifactSink sink(config.output_dir);
    const std::string& label = config.label;

    try {
        json warnings = json::object();

        // ingest
        corpus::TokenizerConfig tok;
        tok.lowercase = config.lowercase;
        tok.min_token_length = config.min_token_length;
        if (!config.stopwords_path.empty()) {
            for (const auto& w :
                 read_word_list(config.stopwords_path, config.lowercase)) {
                tok.stopwords.insert(w);
            }
        }
        corpus::BuildResult built = stage("ingest", [&] {
            corpus::DocumentSet docs = config.corpus_layout == "dir"
                                           ? corpus::load_corpus_dir(config.corpus_path)
                                           : corpus::load_corpus_lines(config.corpus_path);
            return corpus::build_matrix(docs, config.min_term_freq, tok);
        });
        for (const auto& w : built.warnings) {
            warnings["ingest"].push_back(w.subject + ": " + w.reason);
        }

        // weighting
        corpus::WeightResult weighted = stage("weighting", [&] {
            return corpus::apply_weighting(built.tdm, config.weighting);
        });
        for (const auto& w : weighted.warnings) {
            warnings["weighting"].push_back(w.subject + ": " + w.reason);
        }
        const corpus::TermDocumentMatrix& tdm = weighted.tdm;
        stage("weighting", [&] {
            corpus::export_matrix(tdm, sink.path_of("matrix_" + label + ".txt"),
                                  sink.path_of("terms_" + label + ".txt"),
                                  sink.path_of("docs_" + label + ".txt"));
            sink.note("matrix", "matrix_" + label + ".txt");
            sink.note("terms", "terms_" + label + ".txt");
            sink.note("docs", "docs_" + label + ".txt");
            return 0;
        });

        // tune (optional)
        std::size_t k_used = config.k.value_or(0);
        json tune_echo;
        if (!config.k_candidates.empty()) {
            lsa::TuneResult tuned = stage("tune", [&] {
                lsa::SynonymTest test = lsa::load_synonym_test(config.synonym_test_path);
                return lsa::tune_dimensions(tdm, test, config.k_candidates, config.svd);
            });
            k_used = tuned.k_best;
            std::ostringstream csv;
            csv << "k,accuracy\n";
            for (auto& [k, acc] : tuned.accuracy) {
                csv << k << ',' << format_g17(acc) << '\n';
                tune_echo["accuracy"][std::to_string(k)] = acc;
            }
            tune_echo["k_best"] = tuned.k_best;
            tune_echo["scoreable"] = tuned.scoreable;
            tune_echo["skipped"] = tuned.skipped;
            write_file(sink.path_of("tune_" + label + ".csv"), csv.str());
            sink.note("tune", "tune_" + label + ".csv");
        }

        // svd
        lsa::SvdFactors factors = stage("svd", [&] {
            return lsa::truncated_svd(tdm, k_used, config.svd);
        });
        stage("svd", [&] {
            lsa::export_factors(factors, sink.path_of("factors_" + label + ".txt"));
            sink.note("factors", "factors_" + label + ".txt");
            return 0;
        });

        // adjacency
        std::vector<std::string> words =
            read_word_list(config.words_path, config.lowercase);
        lsa::AdjacencyMatrix adj = stage("adjacency", [&] {
            return lsa::adjacency(factors, tdm.terms, words);
        });
        stage("adjacency", [&] {
            lsa::export_adjacency(adj, sink.path_of("adjacency_" + label + ".csv"));
            sink.note("adjacency", "adjacency_" + label + ".csv");
            return 0;
        });

        // distance + agglomerate
        cluster::DistanceMatrix dm = stage("distance", [&] {
            return cluster::pearson_distance(adj.values, adj.words);
        });
        cluster::Dendrogram tree = stage("cluster", [&] {
            return cluster::agglomerate(dm, config.linkage);
        });

        // bootstrap + AU fit
        cluster::BootstrapOptions bopt;
        bopt.scales = config.scales;
        bopt.replicates_per_scale = config.replicates_per_scale;
        bopt.seed = config.seed;
        bopt.linkage = config.linkage;
        bopt.threads = config.threads;
        cluster::BootstrapResult boot = stage("bootstrap", [&] {
            return cluster::multiscale_bootstrap(adj.values, tree, bopt);
        });
        std::vector<cluster::ClusterSupport> supports = stage("aufit", [&] {
            std::vector<cluster::ClusterSupport> out;
            out.reserve(boot.tables.size());
            for (const auto& t : boot.tables) out.push_back(cluster::fit_au(t));
            return out;
        });

        // significant clusters + exports
        auto clusters = stage("significant", [&] {
            return cluster::significant_clusters(tree, supports, config.alpha);
        });
        stage("significant", [&] {
            write_file(sink.path_of("dendrogram_" + label + ".newick"),
                       cluster::to_newick(tree));
            sink.note("newick", "dendrogram_" + label + ".newick");
            cluster::export_support_json(sink.path_of("support_" + label + ".json"),
                                         tree, supports);
            sink.note("support", "support_" + label + ".json");
            cluster::export_significant_csv(
                sink.path_of("significant_" + label + ".csv"), tree, supports,
                config.alpha);
            sink.note("significant", "significant_" + label + ".csv");
            return 0;
        });

        // annotate (optional)
        if (!config.norms_path.empty()) {
            stage("annotate", [&] {
                norms::NormLoad load =
                    norms::load_norms_file(config.norms_path, config.norm_columns);
                std::vector<std::pair<std::string, norms::ClusterStats>> rows;
                for (std::size_t i = 0; i < clusters.size(); ++i) {
                    rows.emplace_back(std::to_string(i + 1),
                                      norms::cluster_stats(clusters[i], load.table));
                }
                norms::export_cluster_stats_csv(
                    sink.path_of("cluster_stats_" + label + ".csv"), rows);
                sink.note("cluster_stats", "cluster_stats_" + label + ".csv");
                return 0;
            });
        }

        // phonemes + projection
        phonetics::LexiconParse lex = stage("phonemes", [&] {
            return phonetics::load_cmudict(config.dictionary_path);
        });
        if (!lex.rejected.empty()) {
            warnings["dictionary"] =
                std::to_string(lex.rejected.size()) + " line(s) rejected";
        }
        phonetics::FeatureTable table = stage("phonemes", [&] {
            return phonetics::FeatureTable::load(config.feature_table_path);
        });
        auto points = stage("phonemes", [&] {
            return phonetics::project_vowel_space(words, lex.lexicon, table);
        });
        stage("phonemes", [&] {
            std::ostringstream csv;
            csv << "word,transcription,stress_vowel\n";
            for (const auto& w : words) {
                phonetics::PhonemeSequence seq = phonetics::phonemize(w, lex.lexicon);
                phonetics::StressVowel sv = phonetics::primary_stress_vowel(seq);
                csv << csv_escape(w) << ',' << seq.to_string() << ','
                    << sv.token.symbol << '\n';
                if (sv.fallback) {
                    warnings["phonemes"].push_back(w + ": no primary-stress vowel");
                }
            }
            write_file(sink.path_of("phonemes_" + label + ".csv"), csv.str());
            sink.note("phonemes", "phonemes_" + label + ".csv");
            phonetics::export_projection_csv(
                sink.path_of("projection_" + label + ".csv"), points);
            sink.note("projection", "projection_" + label + ".csv");
            return 0;
        });

        // figures
        json echo = config_echo(config);
        std::string config_hash = sha256_hex(echo.dump());
        report::RenderMeta rmeta{config_hash, table.version()};
        stage("figures", [&] {
            auto fig_h = report::render_heatmap(adj, adj.words, rmeta);
            write_file(sink.path_of("heatmap_" + label + ".svg"), fig_h.to_svg());
            sink.note("heatmap_svg", "heatmap_" + label + ".svg");

            auto fig_d = report::render_dendrogram(tree, supports, config.alpha, {},
                                                   rmeta);
            write_file(sink.path_of("dendrogram_" + label + ".svg"), fig_d.to_svg());
            sink.note("dendrogram_svg", "dendrogram_" + label + ".svg");

            auto fig_s = report::render_se_plot(supports, rmeta);
            write_file(sink.path_of("seplot_" + label + ".svg"), fig_s.to_svg());
            sink.note("seplot_svg", "seplot_" + label + ".svg");

            std::vector<std::pair<std::string, std::string>> groups;
            for (std::size_t i = 0; i < clusters.size(); ++i) {
                for (const auto& w : clusters[i]) {
                    groups.emplace_back(w, "cluster " + std::to_string(i + 1));
                }
            }
            auto fig_v = report::render_vowel_chart(points, groups, rmeta);
            write_file(sink.path_of("vowelchart_all.svg"), fig_v.to_svg());
            sink.note("vowelchart_svg", "vowelchart_all.svg");
            return 0;
        });

        // metadata
        RunReport report;
        stage("metadata", [&] {
            json meta;
            meta["version"] = kVersion;
            meta["seed"] = config.seed;
            meta["label"] = label;
            meta["config"] = echo;
            meta["config_hash"] = config_hash;
            meta["k_used"] = k_used;
            if (!tune_echo.is_null()) meta["tune"] = tune_echo;
            meta["words"] = words;
            json inputs;
            auto input_of = [](const fs::path& p) {
                return json{{"path", p.string()}, {"sha256", sha256_file_hex(p)}};
            };
            inputs["corpus"] = input_of(config.corpus_path);
            inputs["words"] = input_of(config.words_path);
            inputs["dictionary"] = input_of(config.dictionary_path);
            inputs["feature_table"] = input_of(config.feature_table_path);
            if (!config.norms_path.empty()) {
                inputs["norms"] = input_of(config.norms_path);
            }
            if (!config.synonym_test_path.empty()) {
                inputs["synonym_test"] = input_of(config.synonym_test_path);
            }
            if (!config.stopwords_path.empty()) {
                inputs["stopwords"] = input_of(config.stopwords_path);
            }
            meta["inputs"] = inputs;
            meta["feature_table_version"] = table.version();
            json artifacts = json::object();
            for (const auto& [key, name] : sink.entries()) artifacts[key] = name;
            meta["artifacts"] = artifacts;
            meta["warnings"] = warnings;
            write_file(sink.path_of("meta.json"), meta.dump(2) + "\n");
            sink.note("meta", "meta.json");
            return 0;
        });

        report.output_dir = config.output_dir;
        report.metadata_file = config.output_dir / "meta.json";
        report.artifacts = sink.names();
        report.k_used = k_used;
        return report;
    } catch (...) {
        sink.remove_all();
        throw;
    }
}

CompareResult compare_runs(const fs::path& meta_a, const fs::path& meta_b, double alpha,
                           const fs::path& out_dir) {
    auto load_meta = [](const fs::path& p) {
        if (!fs::exists(p)) throw ValidationError("metadata not found: " + p.string());
        return json::parse(read_file(p));
    };
    json ja = load_meta(meta_a);
    json jb = load_meta(meta_b);

    auto words_of = [](const json& j) {
        return std::set<std::string>(j.at("words").begin(), j.at("words").end());
    };
    std::set<std::string> wa = words_of(ja), wb = words_of(jb);
    if (wa != wb) {
        std::vector<std::string> diff;
        std::set_symmetric_difference(wa.begin(), wa.end(), wb.begin(), wb.end(),
                                      std::back_inserter(diff));
        std::string msg = "compare_runs: word lists differ:";
        for (const auto& w : diff) msg += " " + w;
        throw ValidationError(msg);
    }

    auto support_of = [](const json& j, const fs::path& meta_path) {
        std::string name = j.at("artifacts").at("support").get<std::string>();
        return cluster::import_support_json(meta_path.parent_path() / name);
    };
    cluster::SupportFile sa = support_of(ja, meta_a);
    cluster::SupportFile sb = support_of(jb, meta_b);

    auto clusters_a = cluster::significant_clusters(sa.tree, sa.supports, alpha);
    auto clusters_b = cluster::significant_clusters(sb.tree, sb.supports, alpha);

    CompareResult result;
    result.report = cluster::shared_clusters(clusters_a, clusters_b);
    std::set<std::string> bold;
    for (const auto& [x, y] : result.report.pairs) {
        bold.insert(x);
        bold.insert(y);
    }
    result.bold_words.assign(bold.begin(), bold.end());

    fs::create_directories(out_dir);
    {
        std::ostringstream csv;
        csv << "word_a,word_b\n";
        for (const auto& [x, y] : result.report.pairs) {
            csv << csv_escape(x) << ',' << csv_escape(y) << '\n';
        }
        write_file(out_dir / "shared_pairs.csv", csv.str());
    }
    {
        std::ostringstream csv;
        csv << "cluster_a,jaccard,best_match_b\n";
        for (const auto& ov : result.report.overlaps) {
            csv << (ov.cluster_index + 1) << ',' << format_g17(ov.jaccard) << ',';
            if (ov.best_match == SIZE_MAX) csv << "none";
            else csv << (ov.best_match + 1);
            csv << '\n';
        }
        write_file(out_dir / "overlaps.csv", csv.str());
    }
    {
        json j;
        j["bold_words"] = result.bold_words;
        j["alpha"] = alpha;
        write_file(out_dir / "bold_words.json", j.dump(2) + "\n");
    }
    return result;
}

} // namespace semvox::pipeline
