#ifndef SEMVOX_NORMS_HPP
#define SEMVOX_NORMS_HPP

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <unordered_map>
#include <vector>

namespace semvox::norms {

// Valence/arousal/dominance ratings on the 1-9 scale.
struct NormRecord {
    std::string word;
    double valence = 0.0;
    double arousal = 0.0;
    double dominance = 0.0;
};

struct ColumnMap {
    std::string word = "Word";
    std::string valence = "V.Mean.Sum";
    std::string arousal = "A.Mean.Sum";
    std::string dominance = "D.Mean.Sum";
};

class NormTable {
public:
    const NormRecord* find(const std::string& word) const; // case-folded lookup
    bool insert(NormRecord r);                             // false on duplicate
    std::size_t size() const { return records_.size(); }

    template <typename F>
    void for_each(F&& f) const {
        for (const auto& [w, r] : records_) f(r);
    }

private:
    std::unordered_map<std::string, NormRecord> records_;
};

struct LoadDiagnostic {
    std::size_t row; // 1-based data row
    std::string reason;
};

struct NormLoad {
    NormTable table;
    std::vector<LoadDiagnostic> rejected;
};

NormLoad load_norms(std::istream& in, const ColumnMap& columns = {});
NormLoad load_norms_file(const std::filesystem::path& file,
                         const ColumnMap& columns = {});

struct DimensionStats {
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double sd = 0.0; // population (divide by N)
};

struct ClusterStats {
    DimensionStats valence;
    DimensionStats arousal;
    DimensionStats dominance;
    std::size_t covered = 0;
    std::vector<std::string> missing;
};

ClusterStats cluster_stats(const std::vector<std::string>& cluster,
                           const NormTable& table);

void export_cluster_stats_csv(
    const std::filesystem::path& file,
    const std::vector<std::pair<std::string, ClusterStats>>& rows);

} // namespace semvox::norms

#endif
