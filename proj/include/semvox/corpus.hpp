#ifndef SEMVOX_CORPUS_HPP
#define SEMVOX_CORPUS_HPP

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace semvox::corpus {

struct TokenizerConfig {
    bool lowercase = true;
    std::unordered_set<std::string> stopwords;
    std::size_t min_token_length = 1;
};

enum class Weighting { raw, tf_idf, log_entropy };

std::string_view weighting_name(Weighting w);
Weighting weighting_from_name(std::string_view name);

struct DocumentSet {
    // (doc_id, text), in ingestion order.
    std::vector<std::pair<std::string, std::string>> documents;

    // Unique non-empty ids, at least two documents.
    void validate() const;
};

// Sparse term-document matrix, CSR over term rows. Entries hold raw
// counts or weights depending on `weighting`; explicit zeros are never
// stored.
class TermDocumentMatrix {
public:
    std::vector<std::string> terms;    // length m
    std::vector<std::string> doc_ids;  // length n
    Weighting weighting = Weighting::raw;

    std::vector<std::size_t> row_start; // m + 1
    std::vector<std::size_t> col;       // nnz, document index
    std::vector<double> val;            // nnz, positive for counts

    std::size_t term_count() const { return terms.size(); }
    std::size_t doc_count() const { return doc_ids.size(); }
    std::size_t nnz() const { return val.size(); }

    double at(std::size_t term, std::size_t doc) const;

    // y = X v (length m) and z = X^T u (length n).
    void mul(const double* v, double* y) const;
    void mul_t(const double* u, double* z) const;

    void validate() const;
};

struct IngestWarning {
    std::string subject; // doc id or term
    std::string reason;
};

// Maximal alphabetic runs; apostrophes survive only between letters.
// Deterministic for identical (text, config).
std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg);

struct BuildResult {
    TermDocumentMatrix tdm;
    std::vector<IngestWarning> warnings; // dropped documents
};

BuildResult build_matrix(const DocumentSet& docs, std::size_t min_term_freq,
                         const TokenizerConfig& cfg);

struct WeightResult {
    TermDocumentMatrix tdm;
    std::vector<IngestWarning> warnings; // dropped rows/columns
};

WeightResult apply_weighting(const TermDocumentMatrix& tdm, Weighting scheme);

// Corpus readers. `lines`: one excerpt per line, ids d1, d2, ...
// `dir`: every .txt file is one document, id = filename stem.
DocumentSet load_corpus_lines(const std::filesystem::path& file);
DocumentSet load_corpus_dir(const std::filesystem::path& dir);

// Triplet export: header "m n nnz weighting", then "row col value" lines.
// Term and doc-id sidecars hold one entry per line.
void export_matrix(const TermDocumentMatrix& tdm,
                   const std::filesystem::path& matrix_file,
                   const std::filesystem::path& terms_file,
                   const std::filesystem::path& docs_file);

TermDocumentMatrix import_matrix(const std::filesystem::path& matrix_file,
                                 const std::filesystem::path& terms_file,
                                 const std::filesystem::path& docs_file);

} // namespace semvox::corpus

#endif
