#ifndef SEMVOX_LSA_HPP
#define SEMVOX_LSA_HPP

#include <array>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "semvox/corpus.hpp"
#include "semvox/mat.hpp"

namespace semvox::lsa {

struct SvdOptions {
    enum class Method { automatic, lanczos, dense };
    Method method = Method::automatic;
    std::size_t max_iterations = 1000;
    double tolerance = 1e-10;
    std::size_t dense_cutoff = 512; // dense path when min(m, n) <= cutoff
};

// Truncated factors X ~ U diag(s) V^T with orthonormal columns,
// singular values positive and nonincreasing. Sign convention: the
// largest-magnitude entry of every U column is nonnegative (ties break
// to the first index); V columns follow.
struct SvdFactors {
    Mat u;                               // m x k
    std::vector<double> singular_values; // k
    Mat v;                               // n x k
    std::size_t k = 0;

    void validate() const; // orthonormality within 1e-8, ordering, positivity
};

SvdFactors truncated_svd(const corpus::TermDocumentMatrix& tdm, std::size_t k,
                         const SvdOptions& opts = {});
SvdFactors truncated_svd_dense(const Mat& x, std::size_t k,
                               const SvdOptions& opts = {});

// Row i = U[i, :] scaled elementwise by the singular values.
Mat term_vectors(const SvdFactors& f);

// Clamped to [-1, 1]; zero-norm input is a domain error.
double cosine(std::span<const double> x, std::span<const double> y);

struct AdjacencyMatrix {
    std::vector<std::string> words;
    Mat values;

    void validate() const; // symmetry 1e-10, unit diagonal 1e-10, range
};

AdjacencyMatrix adjacency(const SvdFactors& f,
                          const std::vector<std::string>& tdm_terms,
                          const std::vector<std::string>& words);

struct SynonymItem {
    std::string stem;
    std::array<std::string, 4> choices;
    int answer_index = 0;
};

struct SynonymTest {
    std::vector<SynonymItem> items;
};

// Lines "stem|choice1|choice2|choice3|choice4|answer_index".
SynonymTest load_synonym_test(const std::filesystem::path& file);

struct TermIndex {
    explicit TermIndex(const std::vector<std::string>& terms);
    std::optional<std::size_t> find(const std::string& word) const;

private:
    std::unordered_map<std::string, std::size_t> map_;
};

struct ItemScore {
    int chosen_index = 0;
    bool correct = false;
};

// nullopt when the item cannot be scored (out-of-vocabulary word or a
// zero-length term vector); the reason lands in *skip_reason.
std::optional<ItemScore> score_synonym_item(const Mat& vectors, const TermIndex& index,
                                            const SynonymItem& item,
                                            std::string* skip_reason = nullptr);

struct TuneResult {
    std::size_t k_best = 0;
    std::vector<std::pair<std::size_t, double>> accuracy; // per candidate, ascending k
    std::size_t scoreable = 0;                            // at k_best
    std::size_t skipped = 0;                              // at k_best
};

TuneResult tune_dimensions(const corpus::TermDocumentMatrix& tdm,
                           const SynonymTest& test,
                           std::vector<std::size_t> k_candidates,
                           const SvdOptions& opts = {});

// Textual factors format: header "m n k", one line of singular values,
// then U and V row-major; 17 significant digits.
void export_factors(const SvdFactors& f, const std::filesystem::path& file);
SvdFactors import_factors(const std::filesystem::path& file);

// CSV with word headers on both axes.
void export_adjacency(const AdjacencyMatrix& adj, const std::filesystem::path& file);
AdjacencyMatrix import_adjacency(const std::filesystem::path& file);

} // namespace semvox::lsa

#endif
