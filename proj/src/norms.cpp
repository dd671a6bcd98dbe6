#include "semvox/norms.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "semvox/error.hpp"
#include "semvox/mathstat.hpp"
#include "semvox/text.hpp"

namespace semvox::norms {

const NormRecord* NormTable::find(const std::string& word) const {
    auto it = records_.find(to_lower_ascii(word));
    if (it == records_.end()) return nullptr;
    return &it->second;
}

bool NormTable::insert(NormRecord r) {
    std::string key = to_lower_ascii(r.word);
    r.word = key;
    return records_.emplace(std::move(key), std::move(r)).second;
}

NormLoad load_norms(std::istream& in, const ColumnMap& columns) {
    auto rows = read_csv(in);
    if (rows.empty()) throw PipelineError("norms file is empty");

    const auto& header = rows[0];
    auto column_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (trim(header[i]) == name) return i;
        }
        throw ValidationError("norms file: missing column '" + name + "'");
    };
    std::size_t wi = column_of(columns.word);
    std::size_t vi = column_of(columns.valence);
    std::size_t ai = column_of(columns.arousal);
    std::size_t di = column_of(columns.dominance);

    NormLoad out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        std::size_t needed = std::max({wi, vi, ai, di});
        if (row.size() <= needed) {
            out.rejected.push_back({r, "too few fields"});
            continue;
        }
        NormRecord rec;
        rec.word = trim(row[wi]);
        if (rec.word.empty()) {
            out.rejected.push_back({r, "empty word"});
            continue;
        }
        try {
            rec.valence = parse_double(row[vi]);
            rec.arousal = parse_double(row[ai]);
            rec.dominance = parse_double(row[di]);
        } catch (const PipelineError&) {
            out.rejected.push_back({r, "unparsable rating"});
            continue;
        }
        auto in_range = [](double x) { return x >= 1.0 && x <= 9.0; };
        if (!in_range(rec.valence) || !in_range(rec.arousal) || !in_range(rec.dominance)) {
            out.rejected.push_back({r, "rating outside [1, 9] for '" + rec.word + "'"});
            continue;
        }
        if (!out.table.insert(std::move(rec))) {
            out.rejected.push_back({r, "duplicate word '" + trim(row[wi]) +
                                           "', first occurrence kept"});
        }
    }
    if (out.table.size() == 0) throw PipelineError("norms file: no usable records");
    return out;
}

NormLoad load_norms_file(const std::filesystem::path& file, const ColumnMap& columns) {
    std::ifstream in(file);
    if (!in) throw PipelineError("cannot open norms file: " + file.string());
    return load_norms(in, columns);
}

ClusterStats cluster_stats(const std::vector<std::string>& cluster,
                           const NormTable& table) {
    std::vector<double> valence, arousal, dominance;
    ClusterStats out;
    for (const auto& w : cluster) {
        const NormRecord* r = table.find(w);
        if (!r) {
            out.missing.push_back(w);
            continue;
        }
        valence.push_back(r->valence);
        arousal.push_back(r->arousal);
        dominance.push_back(r->dominance);
    }
    out.covered = valence.size();
    if (out.covered == 0) {
        throw PipelineError("cluster_stats: no cluster member found in the norms table");
    }

    auto stats_of = [](const std::vector<double>& xs) {
        DimensionStats s;
        s.min = *std::min_element(xs.begin(), xs.end());
        s.max = *std::max_element(xs.begin(), xs.end());
        s.mean = mean(xs);
        s.sd = population_sd(xs);
        return s;
    };
    out.valence = stats_of(valence);
    out.arousal = stats_of(arousal);
    out.dominance = stats_of(dominance);
    return out;
}

void export_cluster_stats_csv(
    const std::filesystem::path& file,
    const std::vector<std::pair<std::string, ClusterStats>>& rows) {
    std::ostringstream out;
    out << "cluster_id,dimension,min,max,mean,sd,n_covered,n_missing\n";
    for (const auto& [id, stats] : rows) {
        auto line = [&](const char* dim, const DimensionStats& s) {
            out << csv_escape(id) << ',' << dim << ',' << format_g17(s.min) << ','
                << format_g17(s.max) << ',' << format_g17(s.mean) << ','
                << format_g17(s.sd) << ',' << stats.covered << ','
                << stats.missing.size() << '\n';
        };
        line("valence", stats.valence);
        line("arousal", stats.arousal);
        line("dominance", stats.dominance);
    }
    write_file(file, out.str());
}

} // namespace semvox::norms
