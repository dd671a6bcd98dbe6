#ifndef SEMVOX_PIPELINE_HPP
#define SEMVOX_PIPELINE_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "semvox/cluster.hpp"
#include "semvox/corpus.hpp"
#include "semvox/lsa.hpp"
#include "semvox/norms.hpp"

namespace semvox::pipeline {

struct RunConfig {
    // [corpus]
    std::filesystem::path corpus_path;
    std::string corpus_layout = "lines"; // "lines" or "dir"
    std::size_t min_term_freq = 2;
    corpus::Weighting weighting = corpus::Weighting::log_entropy;
    std::string label; // artifact name stem; defaults to the corpus file stem

    // [tokenizer]
    bool lowercase = true;
    std::size_t min_token_length = 1;
    std::filesystem::path stopwords_path; // optional, one word per line

    // [lsa]
    std::optional<std::size_t> k;
    std::vector<std::size_t> k_candidates;    // alternative to k
    std::filesystem::path synonym_test_path;  // required with k_candidates
    lsa::SvdOptions svd;

    // [words]
    std::filesystem::path words_path;

    // [cluster]
    cluster::Linkage linkage = cluster::Linkage::average;
    std::vector<double> scales = {0.5, 0.6, 0.7, 0.8, 0.9, 1.0, 1.1, 1.2, 1.3, 1.4};
    std::size_t replicates_per_scale = 10000;
    double alpha = 0.05;
    unsigned threads = 1;

    // top level; explicit, no wall-clock default
    std::uint64_t seed = 0;
    bool seed_set = false;

    // [norms] (optional)
    std::filesystem::path norms_path;
    norms::ColumnMap norm_columns;

    // [phonetics]
    std::filesystem::path dictionary_path;
    std::filesystem::path feature_table_path;

    // [output]
    std::filesystem::path output_dir;

    void validate() const;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> k;
    std::optional<double> alpha;
    std::optional<std::filesystem::path> out;
};

// Relative paths in the file resolve against the config file directory.
RunConfig load_config(const std::filesystem::path& file, const Overrides& overrides = {});

struct RunReport {
    std::filesystem::path output_dir;
    std::filesystem::path metadata_file;
    std::vector<std::string> artifacts; // relative to output_dir
    std::size_t k_used = 0;
};

// Full corpus-to-figures run. Any stage failure aborts with the stage
// name in the message and removes the artifacts written so far.
RunReport run_pipeline(const RunConfig& config);

struct CompareResult {
    cluster::SharedReport report;
    std::vector<std::string> bold_words; // words in shared pairs, sorted
};

// Both runs must have used the same word list.
CompareResult compare_runs(const std::filesystem::path& meta_a,
                           const std::filesystem::path& meta_b, double alpha,
                           const std::filesystem::path& out_dir);

} // namespace semvox::pipeline

#endif
