#include "semvox/lsa.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "semvox/error.hpp"
#include "semvox/svd.hpp"
#include "semvox/text.hpp"

namespace semvox::lsa {

namespace {

// Shared core: eigendecompose the Gram operator on the smaller side,
// then recover the other factor as X v / sigma (or X^T u / sigma).
struct GramProblem {
    std::size_t m, n;
    bool gram_on_docs; // true: operator is X^T X (n x n), eigenvectors are V
    svd::SymOperator op;
    std::function<void(const double*, double*)> cross; // maps eigvec side -> other side
    std::function<Mat()> dense_gram;
};

SvdFactors solve_gram(const GramProblem& prob, std::size_t k, const SvdOptions& opts) {
    const std::size_t gram_dim = prob.op.dim;
    bool dense = opts.method == SvdOptions::Method::dense ||
                 (opts.method == SvdOptions::Method::automatic &&
                  gram_dim <= opts.dense_cutoff);

    std::vector<double> lambda;
    Mat small; // gram_dim x k eigenvectors
    if (dense) {
        Mat g = prob.dense_gram();
        std::vector<double> all;
        Mat z;
        svd::jacobi_eigh(std::move(g), all, z);
        lambda.assign(all.begin(), all.begin() + k);
        small = Mat(gram_dim, k);
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = 0; i < gram_dim; ++i) small(i, j) = z(i, j);
        }
    } else {
        svd::LanczosOptions lopts{opts.max_iterations, opts.tolerance};
        svd::lanczos_topk(prob.op, k, lopts, lambda, small);
    }

    // Numerical-rank guard: requesting k beyond it has no defined factors.
    double lam_max = std::max(lambda[0], 0.0);
    double rank_tol = static_cast<double>(std::max(prob.m, prob.n)) * 2.3e-16 * lam_max;
    if (lambda[k - 1] <= rank_tol) {
        throw NumericalError("truncated_svd: requested k exceeds numerical rank",
                             lambda[k - 1]);
    }

    std::vector<double> sigma(k);
    for (std::size_t i = 0; i < k; ++i) sigma[i] = std::sqrt(lambda[i]);

    const std::size_t other_dim = prob.gram_on_docs ? prob.m : prob.n;
    Mat other(other_dim, k);
    std::vector<double> in(gram_dim), out(other_dim);
    for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t i = 0; i < gram_dim; ++i) in[i] = small(i, j);
        prob.cross(in.data(), out.data());
        for (std::size_t i = 0; i < other_dim; ++i) other(i, j) = out[i] / sigma[j];
    }

    // Tight spectra can leave the recovered side slightly skewed; one
    // ordered Gram-Schmidt pass restores orthonormality without
    // touching the leading directions.
    {
        double dev = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b <= a; ++b) {
                double dot = 0.0;
                for (std::size_t i = 0; i < other_dim; ++i) dot += other(i, a) * other(i, b);
                dev = std::max(dev, std::abs(dot - (a == b ? 1.0 : 0.0)));
            }
        }
        if (dev > 1e-10) {
            for (std::size_t a = 0; a < k; ++a) {
                for (std::size_t b = 0; b < a; ++b) {
                    double dot = 0.0;
                    for (std::size_t i = 0; i < other_dim; ++i)
                        dot += other(i, a) * other(i, b);
                    for (std::size_t i = 0; i < other_dim; ++i)
                        other(i, a) -= dot * other(i, b);
                }
                double nrm = 0.0;
                for (std::size_t i = 0; i < other_dim; ++i)
                    nrm += other(i, a) * other(i, a);
                nrm = std::sqrt(nrm);
                for (std::size_t i = 0; i < other_dim; ++i) other(i, a) /= nrm;
            }
        }
    }

    SvdFactors f;
    f.k = k;
    f.singular_values = std::move(sigma);
    if (prob.gram_on_docs) {
        f.v = std::move(small);
        f.u = std::move(other);
    } else {
        f.u = std::move(small);
        f.v = std::move(other);
    }

    // Sign convention on U columns, V follows.
    for (std::size_t j = 0; j < k; ++j) {
        std::size_t arg = 0;
        double best = std::abs(f.u(0, j));
        for (std::size_t i = 1; i < prob.m; ++i) {
            double a = std::abs(f.u(i, j));
            if (a > best) {
                best = a;
                arg = i;
            }
        }
        if (f.u(arg, j) < 0.0) {
            for (std::size_t i = 0; i < prob.m; ++i) f.u(i, j) = -f.u(i, j);
            for (std::size_t i = 0; i < prob.n; ++i) f.v(i, j) = -f.v(i, j);
        }
    }

    f.validate();
    return f;
}

void check_orthonormal(const Mat& a, const char* name) {
    for (std::size_t p = 0; p < a.cols(); ++p) {
        for (std::size_t q = p; q < a.cols(); ++q) {
            double dot = 0.0;
            for (std::size_t i = 0; i < a.rows(); ++i) dot += a(i, p) * a(i, q);
            double want = (p == q) ? 1.0 : 0.0;
            if (std::abs(dot - want) > 1e-8) {
                throw ValidationError(std::string("SvdFactors: ") + name +
                                      " columns not orthonormal (deviation " +
                                      format_g17(std::abs(dot - want)) + ")");
            }
        }
    }
}

} // namespace

void SvdFactors::validate() const {
    if (k == 0 || singular_values.size() != k || u.cols() != k || v.cols() != k) {
        throw ValidationError("SvdFactors: inconsistent shapes");
    }
    for (std::size_t i = 0; i < k; ++i) {
        if (!(singular_values[i] > 0.0)) {
            throw ValidationError("SvdFactors: singular values must be positive");
        }
        if (i > 0 && singular_values[i] > singular_values[i - 1]) {
            throw ValidationError("SvdFactors: singular values must be nonincreasing");
        }
    }
    check_orthonormal(u, "U");
    check_orthonormal(v, "V");
}

SvdFactors truncated_svd(const corpus::TermDocumentMatrix& tdm, std::size_t k,
                         const SvdOptions& opts) {
    const std::size_t m = tdm.term_count(), n = tdm.doc_count();
    if (k < 1 || k > std::min(m, n)) {
        throw ValidationError("truncated_svd: k must be in [1, min(m, n)]");
    }
    tdm.validate(); // no zero rows or columns

    GramProblem prob;
    prob.m = m;
    prob.n = n;
    prob.gram_on_docs = (n <= m);
    if (prob.gram_on_docs) {
        prob.op.dim = n;
        prob.op.apply = [&tdm, m](const double* x, double* y) {
            std::vector<double> t(m);
            tdm.mul(x, t.data());
            tdm.mul_t(t.data(), y);
        };
        prob.cross = [&tdm](const double* v, double* u) { tdm.mul(v, u); };
        prob.dense_gram = [&tdm, n]() {
            Mat g(n, n);
            for (std::size_t i = 0; i < tdm.term_count(); ++i) {
                for (std::size_t p = tdm.row_start[i]; p < tdm.row_start[i + 1]; ++p) {
                    for (std::size_t q = tdm.row_start[i]; q < tdm.row_start[i + 1]; ++q) {
                        g(tdm.col[p], tdm.col[q]) += tdm.val[p] * tdm.val[q];
                    }
                }
            }
            return g;
        };
    } else {
        prob.op.dim = m;
        prob.op.apply = [&tdm, n](const double* x, double* y) {
            std::vector<double> t(n);
            tdm.mul_t(x, t.data());
            tdm.mul(t.data(), y);
        };
        prob.cross = [&tdm](const double* u, double* v) { tdm.mul_t(u, v); };
        prob.dense_gram = [&tdm, m]() {
            Mat g(m, m);
            for (std::size_t a = 0; a < m; ++a) {
                for (std::size_t b = a; b < m; ++b) {
                    double s = 0.0;
                    std::size_t pa = tdm.row_start[a], pb = tdm.row_start[b];
                    while (pa < tdm.row_start[a + 1] && pb < tdm.row_start[b + 1]) {
                        if (tdm.col[pa] < tdm.col[pb]) ++pa;
                        else if (tdm.col[pa] > tdm.col[pb]) ++pb;
                        else { s += tdm.val[pa] * tdm.val[pb]; ++pa; ++pb; }
                    }
                    g(a, b) = g(b, a) = s;
                }
            }
            return g;
        };
    }
    return solve_gram(prob, k, opts);
}

SvdFactors truncated_svd_dense(const Mat& x, std::size_t k, const SvdOptions& opts) {
    const std::size_t m = x.rows(), n = x.cols();
    if (k < 1 || k > std::min(m, n)) {
        throw ValidationError("truncated_svd: k must be in [1, min(m, n)]");
    }

    GramProblem prob;
    prob.m = m;
    prob.n = n;
    prob.gram_on_docs = (n <= m);
    if (prob.gram_on_docs) {
        prob.op.dim = n;
        prob.op.apply = [&x, m, n](const double* in, double* out) {
            std::vector<double> t(m, 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += x(i, j) * in[j];
                t[i] = s;
            }
            for (std::size_t j = 0; j < n; ++j) out[j] = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < n; ++j) out[j] += x(i, j) * t[i];
            }
        };
        prob.cross = [&x, m, n](const double* v, double* u) {
            for (std::size_t i = 0; i < m; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += x(i, j) * v[j];
                u[i] = s;
            }
        };
        prob.dense_gram = [&x, m, n]() {
            Mat g(n, n);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t a = 0; a < n; ++a) {
                    double xa = x(i, a);
                    if (xa == 0.0) continue;
                    for (std::size_t b = 0; b < n; ++b) g(a, b) += xa * x(i, b);
                }
            }
            return g;
        };
    } else {
        prob.op.dim = m;
        prob.op.apply = [&x, m, n](const double* in, double* out) {
            std::vector<double> t(n, 0.0);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < n; ++j) t[j] += x(i, j) * in[i];
            }
            for (std::size_t i = 0; i < m; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += x(i, j) * t[j];
                out[i] = s;
            }
        };
        prob.cross = [&x, m, n](const double* u, double* v) {
            for (std::size_t j = 0; j < n; ++j) v[j] = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t j = 0; j < n; ++j) v[j] += x(i, j) * u[i];
            }
        };
        prob.dense_gram = [&x, m, n]() {
            Mat g(m, m);
            for (std::size_t a = 0; a < m; ++a) {
                for (std::size_t b = a; b < m; ++b) {
                    double s = 0.0;
                    for (std::size_t j = 0; j < n; ++j) s += x(a, j) * x(b, j);
                    g(a, b) = g(b, a) = s;
                }
            }
            return g;
        };
    }
    return solve_gram(prob, k, opts);
}

Mat term_vectors(const SvdFactors& f) {
    Mat out(f.u.rows(), f.k);
    for (std::size_t i = 0; i < f.u.rows(); ++i) {
        for (std::size_t j = 0; j < f.k; ++j) {
            out(i, j) = f.u(i, j) * f.singular_values[j];
        }
    }
    return out;
}

double cosine(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw ValidationError("cosine: length mismatch");
    double dot = 0.0, nx = 0.0, ny = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        dot += x[i] * y[i];
        nx += x[i] * x[i];
        ny += y[i] * y[i];
    }
    if (nx == 0.0 || ny == 0.0) {
        throw ValidationError("cosine: zero-norm vector");
    }
    double c = dot / (std::sqrt(nx) * std::sqrt(ny));
    return std::clamp(c, -1.0, 1.0);
}

void AdjacencyMatrix::validate() const {
    const std::size_t w = words.size();
    if (values.rows() != w || values.cols() != w) {
        throw ValidationError("AdjacencyMatrix: shape mismatch");
    }
    for (std::size_t i = 0; i < w; ++i) {
        if (std::abs(values(i, i) - 1.0) > 1e-10) {
            throw ValidationError("AdjacencyMatrix: diagonal must be 1");
        }
        for (std::size_t j = 0; j < w; ++j) {
            double v = values(i, j);
            if (!(v >= -1.0 && v <= 1.0)) {
                throw ValidationError("AdjacencyMatrix: entry outside [-1, 1]");
            }
            if (std::abs(v - values(j, i)) > 1e-10) {
                throw ValidationError("AdjacencyMatrix: not symmetric");
            }
        }
    }
}

AdjacencyMatrix adjacency(const SvdFactors& f,
                          const std::vector<std::string>& tdm_terms,
                          const std::vector<std::string>& words) {
    TermIndex index(tdm_terms);
    std::vector<std::size_t> rows;
    std::string missing;
    for (const auto& w : words) {
        auto idx = index.find(w);
        if (!idx) {
            if (!missing.empty()) missing += ", ";
            missing += "'" + w + "'";
        } else {
            rows.push_back(*idx);
        }
    }
    if (!missing.empty()) {
        throw ValidationError("adjacency: words not in vocabulary: " + missing);
    }

    Mat tv = term_vectors(f);
    for (std::size_t i = 0; i < words.size(); ++i) {
        double nrm = 0.0;
        for (std::size_t j = 0; j < f.k; ++j) nrm += tv(rows[i], j) * tv(rows[i], j);
        if (nrm == 0.0) {
            throw ValidationError("adjacency: zero-length term vector for '" +
                                  words[i] + "'");
        }
    }

    AdjacencyMatrix out;
    out.words = words;
    out.values = Mat(words.size(), words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
        out.values(i, i) = 1.0;
        std::span<const double> xi(tv.row(rows[i]), f.k);
        for (std::size_t j = i + 1; j < words.size(); ++j) {
            std::span<const double> xj(tv.row(rows[j]), f.k);
            double c = cosine(xi, xj);
            out.values(i, j) = c;
            out.values(j, i) = c;
        }
    }
    out.validate();
    return out;
}

SynonymTest load_synonym_test(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw PipelineError("cannot open synonym test: " + file.string());
    SynonymTest test;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        auto parts = split(line, '|');
        if (parts.size() != 6) {
            throw PipelineError("synonym test line " + std::to_string(no) +
                                ": expected 6 |-separated fields");
        }
        SynonymItem item;
        item.stem = trim(parts[0]);
        for (int i = 0; i < 4; ++i) item.choices[i] = trim(parts[i + 1]);
        item.answer_index = static_cast<int>(parse_int(parts[5]));
        if (item.answer_index < 0 || item.answer_index > 3) {
            throw PipelineError("synonym test line " + std::to_string(no) +
                                ": answer index out of range");
        }
        for (int a = 0; a < 4; ++a) {
            for (int b = a + 1; b < 4; ++b) {
                if (item.choices[a] == item.choices[b]) {
                    throw PipelineError("synonym test line " + std::to_string(no) +
                                        ": duplicate choices");
                }
            }
        }
        test.items.push_back(std::move(item));
    }
    return test;
}

TermIndex::TermIndex(const std::vector<std::string>& terms) {
    map_.reserve(terms.size());
    for (std::size_t i = 0; i < terms.size(); ++i) map_.emplace(terms[i], i);
}

std::optional<std::size_t> TermIndex::find(const std::string& word) const {
    auto it = map_.find(word);
    if (it == map_.end()) return std::nullopt;
    return it->second;
}

std::optional<ItemScore> score_synonym_item(const Mat& vectors, const TermIndex& index,
                                            const SynonymItem& item,
                                            std::string* skip_reason) {
    auto stem = index.find(item.stem);
    if (!stem) {
        if (skip_reason) *skip_reason = "stem '" + item.stem + "' not in vocabulary";
        return std::nullopt;
    }
    std::array<std::size_t, 4> rows{};
    for (int i = 0; i < 4; ++i) {
        auto idx = index.find(item.choices[i]);
        if (!idx) {
            if (skip_reason) {
                *skip_reason = "choice '" + item.choices[i] + "' not in vocabulary";
            }
            return std::nullopt;
        }
        rows[i] = *idx;
    }

    std::span<const double> sv(vectors.row(*stem), vectors.cols());
    ItemScore score;
    double best = -2.0;
    for (int i = 0; i < 4; ++i) {
        std::span<const double> cv(vectors.row(rows[i]), vectors.cols());
        double c;
        try {
            c = cosine(sv, cv);
        } catch (const ValidationError&) {
            if (skip_reason) *skip_reason = "zero-length term vector in item";
            return std::nullopt;
        }
        if (c > best) {
            best = c;
            score.chosen_index = i;
        }
    }
    score.correct = (score.chosen_index == item.answer_index);
    return score;
}

TuneResult tune_dimensions(const corpus::TermDocumentMatrix& tdm,
                           const SynonymTest& test,
                           std::vector<std::size_t> k_candidates,
                           const SvdOptions& opts) {
    if (k_candidates.empty()) throw ValidationError("tune_dimensions: no candidates");
    std::size_t bound = std::min(tdm.term_count(), tdm.doc_count());
    for (std::size_t k : k_candidates) {
        if (k < 1 || k > bound) {
            throw ValidationError("tune_dimensions: candidate k=" + std::to_string(k) +
                                  " outside [1, " + std::to_string(bound) + "]");
        }
    }
    std::sort(k_candidates.begin(), k_candidates.end());
    k_candidates.erase(std::unique(k_candidates.begin(), k_candidates.end()),
                       k_candidates.end());

    // One factorization at the largest k; smaller candidates are the
    // leading columns of the same factors.
    std::size_t k_max = k_candidates.back();
    SvdFactors full = truncated_svd(tdm, k_max, opts);
    TermIndex index(tdm.terms);

    TuneResult result;
    double best_acc = -1.0;
    for (std::size_t k : k_candidates) {
        Mat tv(full.u.rows(), k);
        for (std::size_t i = 0; i < full.u.rows(); ++i) {
            for (std::size_t j = 0; j < k; ++j) {
                tv(i, j) = full.u(i, j) * full.singular_values[j];
            }
        }
        std::size_t correct = 0, scoreable = 0, skipped = 0;
        for (const auto& item : test.items) {
            auto s = score_synonym_item(tv, index, item);
            if (!s) {
                ++skipped;
                continue;
            }
            ++scoreable;
            if (s->correct) ++correct;
        }
        if (scoreable == 0) {
            throw PipelineError("tune_dimensions: no scoreable synonym items");
        }
        double acc = static_cast<double>(correct) / static_cast<double>(scoreable);
        result.accuracy.emplace_back(k, acc);
        if (acc > best_acc) {
            best_acc = acc;
            result.k_best = k;
            result.scoreable = scoreable;
            result.skipped = skipped;
        }
    }
    return result;
}

void export_factors(const SvdFactors& f, const std::filesystem::path& file) {
    std::ostringstream out;
    out << f.u.rows() << ' ' << f.v.rows() << ' ' << f.k << '\n';
    for (std::size_t i = 0; i < f.k; ++i) {
        out << (i ? " " : "") << format_g17(f.singular_values[i]);
    }
    out << '\n';
    auto dump = [&out](const Mat& a) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            for (std::size_t j = 0; j < a.cols(); ++j) {
                out << (j ? " " : "") << format_g17(a(i, j));
            }
            out << '\n';
        }
    };
    dump(f.u);
    dump(f.v);
    write_file(file, out.str());
}

SvdFactors import_factors(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw PipelineError("cannot open factors file: " + file.string());
    std::size_t m, n, k;
    if (!(in >> m >> n >> k)) throw PipelineError("bad factors header");
    SvdFactors f;
    f.k = k;
    f.singular_values.resize(k);
    for (auto& s : f.singular_values) {
        if (!(in >> s)) throw PipelineError("truncated factors file");
    }
    f.u = Mat(m, k);
    f.v = Mat(n, k);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (!(in >> f.u(i, j))) throw PipelineError("truncated factors file");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
            if (!(in >> f.v(i, j))) throw PipelineError("truncated factors file");
        }
    }
    f.validate();
    return f;
}

void export_adjacency(const AdjacencyMatrix& adj, const std::filesystem::path& file) {
    std::ostringstream out;
    out << "word";
    for (const auto& w : adj.words) out << ',' << csv_escape(w);
    out << '\n';
    for (std::size_t i = 0; i < adj.words.size(); ++i) {
        out << csv_escape(adj.words[i]);
        for (std::size_t j = 0; j < adj.words.size(); ++j) {
            out << ',' << format_g17(adj.values(i, j));
        }
        out << '\n';
    }
    write_file(file, out.str());
}

AdjacencyMatrix import_adjacency(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw PipelineError("cannot open adjacency file: " + file.string());
    auto rows = read_csv(in);
    if (rows.size() < 2) throw PipelineError("adjacency file too short");
    AdjacencyMatrix adj;
    adj.words.assign(rows[0].begin() + 1, rows[0].end());
    const std::size_t w = adj.words.size();
    if (rows.size() != w + 1) throw PipelineError("adjacency row count mismatch");
    adj.values = Mat(w, w);
    for (std::size_t i = 0; i < w; ++i) {
        const auto& r = rows[i + 1];
        if (r.size() != w + 1 || r[0] != adj.words[i]) {
            throw PipelineError("adjacency row " + std::to_string(i) + " malformed");
        }
        for (std::size_t j = 0; j < w; ++j) adj.values(i, j) = parse_double(r[j + 1]);
    }
    adj.validate();
    return adj;
}

} // namespace semvox::lsa
