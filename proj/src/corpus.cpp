#include "semvox/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

#include "semvox/error.hpp"
#include "semvox/text.hpp"

namespace semvox::corpus {

namespace {

struct Codepoint {
    char32_t cp;
    std::size_t next; // byte offset after this codepoint
};

// Lenient UTF-8 decode; invalid bytes come back as U+FFFD and consume
// one byte, so tokenization stays total over arbitrary input.
Codepoint decode_utf8(std::string_view s, std::size_t i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) return {c, i + 1};
    int extra;
    char32_t cp;
    if ((c & 0xE0) == 0xC0) { extra = 1; cp = c & 0x1F; }
    else if ((c & 0xF0) == 0xE0) { extra = 2; cp = c & 0x0F; }
    else if ((c & 0xF8) == 0xF0) { extra = 3; cp = c & 0x07; }
    else return {0xFFFD, i + 1};
    if (i + extra >= s.size()) return {0xFFFD, i + 1};
    for (int k = 1; k <= extra; ++k) {
        unsigned char cc = static_cast<unsigned char>(s[i + k]);
        if ((cc & 0xC0) != 0x80) return {0xFFFD, i + 1};
        cp = (cp << 6) | (cc & 0x3F);
    }
    return {cp, i + 1 + extra};
}

void encode_utf8(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool is_letter(char32_t cp) {
    if (cp < 0x80) return (cp >= 'A' && cp <= 'Z') || (cp >= 'a' && cp <= 'z');
    if (cp < 0xC0) return false;                  // Latin-1 punctuation/symbols
    if (cp == 0xD7 || cp == 0xF7) return false;   // multiplication/division signs
    if (cp >= 0x2000 && cp <= 0x206F) return false; // general punctuation block
    if (cp == 0xFFFD) return false;
    return true;
}

bool is_apostrophe(char32_t cp) { return cp == '\'' || cp == 0x2019; }

char32_t fold_case(char32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 32;
    // Latin-1 uppercase block, skipping the multiplication sign.
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
    return cp;
}

} // namespace

std::string_view weighting_name(Weighting w) {
    switch (w) {
        case Weighting::raw: return "raw";
        case Weighting::tf_idf: return "tf-idf";
        case Weighting::log_entropy: return "log-entropy";
    }
    return "raw";
}

Weighting weighting_from_name(std::string_view name) {
    if (name == "raw") return Weighting::raw;
    if (name == "tf-idf" || name == "tfidf") return Weighting::tf_idf;
    if (name == "log-entropy" || name == "logentropy") return Weighting::log_entropy;
    throw ValidationError("unknown weighting scheme: '" + std::string(name) + "'");
}

void DocumentSet::validate() const {
    if (documents.size() < 2) {
        throw ValidationError("document set needs at least 2 documents");
    }
    std::unordered_set<std::string> seen;
    for (const auto& [id, text] : documents) {
        (void)text;
        if (id.empty()) throw ValidationError("empty document id");
        if (!seen.insert(id).second) {
            throw ValidationError("duplicate document id: '" + id + "'");
        }
    }
}

double TermDocumentMatrix::at(std::size_t term, std::size_t doc) const {
    for (std::size_t p = row_start[term]; p < row_start[term + 1]; ++p) {
        if (col[p] == doc) return val[p];
    }
    return 0.0;
}

void TermDocumentMatrix::mul(const double* v, double* y) const {
    for (std::size_t i = 0; i < terms.size(); ++i) {
        double s = 0.0;
        for (std::size_t p = row_start[i]; p < row_start[i + 1]; ++p) {
            s += val[p] * v[col[p]];
        }
        y[i] = s;
    }
}

void TermDocumentMatrix::mul_t(const double* u, double* z) const {
    std::fill(z, z + doc_ids.size(), 0.0);
    for (std::size_t i = 0; i < terms.size(); ++i) {
        double ui = u[i];
        if (ui == 0.0) continue;
        for (std::size_t p = row_start[i]; p < row_start[i + 1]; ++p) {
            z[col[p]] += val[p] * ui;
        }
    }
}

void TermDocumentMatrix::validate() const {
    std::size_t m = terms.size(), n = doc_ids.size();
    if (row_start.size() != m + 1 || col.size() != val.size()) {
        throw ValidationError("term-document matrix: inconsistent storage");
    }
    std::vector<bool> col_seen(n, false);
    for (std::size_t i = 0; i < m; ++i) {
        if (row_start[i + 1] <= row_start[i]) {
            throw ValidationError("term-document matrix: all-zero row for term '" +
                                  terms[i] + "'");
        }
    }
    for (std::size_t p = 0; p < val.size(); ++p) {
        if (col[p] >= n) throw ValidationError("term-document matrix: column out of range");
        if (!std::isfinite(val[p]) || val[p] == 0.0) {
            throw ValidationError("term-document matrix: zero or non-finite entry");
        }
        col_seen[col[p]] = true;
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (!col_seen[j]) {
            throw ValidationError("term-document matrix: all-zero column for doc '" +
                                  doc_ids[j] + "'");
        }
    }
}

std::vector<std::string> tokenize(std::string_view text, const TokenizerConfig& cfg) {
    std::vector<std::string> out;
    std::string cur;
    std::size_t cur_len = 0; // codepoints

    auto flush = [&] {
        if (!cur.empty() && cur_len >= cfg.min_token_length &&
            cfg.stopwords.find(cur) == cfg.stopwords.end()) {
            out.push_back(cur);
        }
        cur.clear();
        cur_len = 0;
    };

    std::size_t i = 0;
    while (i < text.size()) {
        auto [cp, next] = decode_utf8(text, i);
        if (is_letter(cp)) {
            encode_utf8(cfg.lowercase ? fold_case(cp) : cp, cur);
            ++cur_len;
        } else if (is_apostrophe(cp) && !cur.empty() && next < text.size() &&
                   is_letter(decode_utf8(text, next).cp)) {
            // word-internal apostrophe
            encode_utf8(cp, cur);
            ++cur_len;
        } else {
            flush();
        }
        i = next;
    }
    flush();
    return out;
}

BuildResult build_matrix(const DocumentSet& docs, std::size_t min_term_freq,
                         const TokenizerConfig& cfg) {
    if (min_term_freq < 1) throw ValidationError("min_term_freq must be >= 1");
    docs.validate();

    // First pass: global frequencies, term order = first occurrence.
    std::vector<std::vector<std::string>> doc_tokens;
    doc_tokens.reserve(docs.documents.size());
    std::vector<std::string> order;
    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& [id, text] : docs.documents) {
        (void)id;
        doc_tokens.push_back(tokenize(text, cfg));
        for (const auto& tok : doc_tokens.back()) {
            auto [it, inserted] = freq.emplace(tok, 0);
            if (inserted) order.push_back(tok);
            ++it->second;
        }
    }

    std::vector<std::string> vocab;
    std::unordered_map<std::string, std::size_t> index;
    for (const auto& t : order) {
        if (freq[t] >= min_term_freq) {
            index.emplace(t, vocab.size());
            vocab.push_back(t);
        }
    }

    // Second pass: per-document counts; documents with no vocabulary
    // tokens are dropped.
    BuildResult result;
    std::vector<std::map<std::size_t, double>> rows(vocab.size());
    std::size_t surviving = 0;
    for (std::size_t d = 0; d < docs.documents.size(); ++d) {
        std::unordered_map<std::size_t, double> counts;
        for (const auto& tok : doc_tokens[d]) {
            auto it = index.find(tok);
            if (it != index.end()) counts[it->second] += 1.0;
        }
        if (counts.empty()) {
            result.warnings.push_back({docs.documents[d].first,
                                       "dropped: no in-vocabulary tokens"});
            continue;
        }
        std::size_t j = surviving++;
        result.tdm.doc_ids.push_back(docs.documents[d].first);
        for (const auto& [ti, c] : counts) rows[ti][j] = c;
    }
    if (surviving < 2) {
        throw PipelineError("ingestion: fewer than 2 documents survived tokenization");
    }

    result.tdm.terms = vocab;
    result.tdm.weighting = Weighting::raw;
    result.tdm.row_start.assign(vocab.size() + 1, 0);
    for (std::size_t i = 0; i < vocab.size(); ++i) {
        result.tdm.row_start[i + 1] = result.tdm.row_start[i] + rows[i].size();
        for (const auto& [j, c] : rows[i]) {
            result.tdm.col.push_back(j);
            result.tdm.val.push_back(c);
        }
    }
    result.tdm.validate();
    return result;
}

WeightResult apply_weighting(const TermDocumentMatrix& tdm, Weighting scheme) {
    if (tdm.weighting != Weighting::raw) {
        throw ValidationError("apply_weighting: matrix is already weighted (" +
                              std::string(weighting_name(tdm.weighting)) + ")");
    }
    WeightResult result;
    if (scheme == Weighting::raw) {
        result.tdm = tdm;
        return result;
    }

    std::size_t m = tdm.term_count(), n = tdm.doc_count();
    double log_n = std::log(static_cast<double>(n));

    // New values per row; rows whose global weight vanishes drop out.
    std::vector<std::vector<double>> new_vals(m);
    std::vector<bool> row_kept(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t b = tdm.row_start[i], e = tdm.row_start[i + 1];
        double factor = 0.0;
        if (scheme == Weighting::tf_idf) {
            double df = static_cast<double>(e - b);
            factor = std::log(static_cast<double>(n) / df);
        } else {
            double rowsum = 0.0;
            for (std::size_t p = b; p < e; ++p) rowsum += tdm.val[p];
            double entropy = 0.0;
            for (std::size_t p = b; p < e; ++p) {
                double pij = tdm.val[p] / rowsum;
                entropy += pij * std::log(pij);
            }
            factor = 1.0 + entropy / log_n;
        }
        if (std::abs(factor) <= 1e-12) {
            result.warnings.push_back({tdm.terms[i], "dropped term: zero global weight"});
            continue;
        }
        row_kept[i] = true;
        new_vals[i].reserve(e - b);
        for (std::size_t p = b; p < e; ++p) {
            double v = (scheme == Weighting::tf_idf)
                           ? tdm.val[p] * factor
                           : std::log1p(tdm.val[p]) * factor;
            new_vals[i].push_back(v);
        }
    }

    // Columns that lost every entry drop out as well.
    std::vector<bool> col_used(n, false);
    for (std::size_t i = 0; i < m; ++i) {
        if (!row_kept[i]) continue;
        for (std::size_t p = tdm.row_start[i]; p < tdm.row_start[i + 1]; ++p) {
            col_used[tdm.col[p]] = true;
        }
    }
    std::vector<std::size_t> col_map(n, SIZE_MAX);
    for (std::size_t j = 0, nj = 0; j < n; ++j) {
        if (col_used[j]) {
            col_map[j] = nj++;
            result.tdm.doc_ids.push_back(tdm.doc_ids[j]);
        } else {
            result.warnings.push_back({tdm.doc_ids[j],
                                       "dropped document: all entries weighted to zero"});
        }
    }
    if (result.tdm.doc_ids.size() < 2) {
        throw PipelineError("weighting left fewer than 2 documents");
    }

    result.tdm.weighting = scheme;
    result.tdm.row_start.push_back(0);
    for (std::size_t i = 0; i < m; ++i) {
        if (!row_kept[i]) continue;
        result.tdm.terms.push_back(tdm.terms[i]);
        for (std::size_t p = tdm.row_start[i], q = 0; p < tdm.row_start[i + 1]; ++p, ++q) {
            result.tdm.col.push_back(col_map[tdm.col[p]]);
            result.tdm.val.push_back(new_vals[i][q]);
        }
        result.tdm.row_start.push_back(result.tdm.col.size());
    }
    result.tdm.validate();
    return result;
}

DocumentSet load_corpus_lines(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw PipelineError("cannot open corpus file: " + file.string());
    DocumentSet out;
    std::string line;
    std::size_t no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        out.documents.emplace_back("d" + std::to_string(no), line);
    }
    out.validate();
    return out;
}

DocumentSet load_corpus_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir)) {
        throw PipelineError("not a directory: " + dir.string());
    }
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());
    DocumentSet out;
    for (const auto& f : files) {
        out.documents.emplace_back(f.stem().string(), read_file(f));
    }
    out.validate();
    return out;
}

void export_matrix(const TermDocumentMatrix& tdm,
                   const std::filesystem::path& matrix_file,
                   const std::filesystem::path& terms_file,
                   const std::filesystem::path& docs_file) {
    std::ostringstream mtx;
    mtx << tdm.term_count() << ' ' << tdm.doc_count() << ' ' << tdm.nnz() << ' '
        << weighting_name(tdm.weighting) << '\n';
    for (std::size_t i = 0; i < tdm.term_count(); ++i) {
        for (std::size_t p = tdm.row_start[i]; p < tdm.row_start[i + 1]; ++p) {
            mtx << i << ' ' << tdm.col[p] << ' ' << format_g17(tdm.val[p]) << '\n';
        }
    }
    write_file(matrix_file, mtx.str());

    std::string terms, docs;
    for (const auto& t : tdm.terms) { terms += t; terms += '\n'; }
    for (const auto& d : tdm.doc_ids) { docs += d; docs += '\n'; }
    write_file(terms_file, terms);
    write_file(docs_file, docs);
}

TermDocumentMatrix import_matrix(const std::filesystem::path& matrix_file,
                                 const std::filesystem::path& terms_file,
                                 const std::filesystem::path& docs_file) {
    std::ifstream in(matrix_file);
    if (!in) throw PipelineError("cannot open matrix file: " + matrix_file.string());
    TermDocumentMatrix tdm;
    std::size_t m, n, nnz;
    std::string weighting;
    if (!(in >> m >> n >> nnz >> weighting)) {
        throw PipelineError("bad matrix header in " + matrix_file.string());
    }
    tdm.weighting = weighting_from_name(weighting);

    std::vector<std::vector<std::pair<std::size_t, double>>> rows(m);
    for (std::size_t e = 0; e < nnz; ++e) {
        std::size_t i, j;
        double v;
        if (!(in >> i >> j >> v)) throw PipelineError("truncated matrix file");
        if (i >= m || j >= n) throw PipelineError("matrix entry out of range");
        rows[i].emplace_back(j, v);
    }
    tdm.row_start.assign(m + 1, 0);
    for (std::size_t i = 0; i < m; ++i) {
        std::sort(rows[i].begin(), rows[i].end());
        tdm.row_start[i + 1] = tdm.row_start[i] + rows[i].size();
        for (auto& [j, v] : rows[i]) {
            tdm.col.push_back(j);
            tdm.val.push_back(v);
        }
    }

    auto read_lines = [](const std::filesystem::path& p) {
        std::ifstream f(p);
        if (!f) throw PipelineError("cannot open sidecar: " + p.string());
        std::vector<std::string> out;
        std::string line;
        while (std::getline(f, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            out.push_back(line);
        }
        return out;
    };
    tdm.terms = read_lines(terms_file);
    tdm.doc_ids = read_lines(docs_file);
    if (tdm.terms.size() != m || tdm.doc_ids.size() != n) {
        throw PipelineError("sidecar lengths do not match matrix header");
    }
    tdm.validate();
    return tdm;
}

} // namespace semvox::corpus
