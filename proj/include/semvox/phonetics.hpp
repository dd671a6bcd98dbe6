#ifndef SEMVOX_PHONETICS_HPP
#define SEMVOX_PHONETICS_HPP

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace semvox::phonetics {

// The closed 39-symbol ARPAbet set: 15 vowels, 24 consonants.
const std::vector<std::string>& arpabet_vowels();
const std::vector<std::string>& arpabet_consonants();
bool is_vowel_symbol(const std::string& symbol);
bool is_consonant_symbol(const std::string& symbol);

struct PhonemeToken {
    std::string symbol;
    int stress = -1; // 0/1/2 for vowels, -1 for consonants

    bool is_vowel() const { return stress >= 0; }
    std::string to_string() const;
    bool operator==(const PhonemeToken&) const = default;
};

struct PhonemeSequence {
    std::vector<PhonemeToken> phonemes; // nonempty

    std::string to_string() const; // space-joined, matches dictionary field
    bool operator==(const PhonemeSequence&) const = default;
};

class PronunciationLexicon {
public:
    // Variant 0 is canonical; numbered variants keep their dictionary
    // order. Queries are case-folded to the uppercase keys.
    const std::vector<PhonemeSequence>* find(const std::string& word) const;

    // Inserts keeping variants ordered by their dictionary number.
    void add(const std::string& upper_word, std::size_t variant_no, PhonemeSequence seq);

    std::size_t size() const { return entries_.size(); }

private:
    struct Entry {
        std::vector<std::size_t> variant_nos;
        std::vector<PhonemeSequence> variants;
    };
    std::unordered_map<std::string, Entry> entries_;
};

struct ParseDiagnostic {
    std::size_t line_no;
    std::string line;
    std::string reason;
};

struct LexiconParse {
    PronunciationLexicon lexicon;
    std::vector<ParseDiagnostic> rejected;
};

// CMU dictionary format: "WORD  PH1 PH2 ..." with "WORD(2)" variants
// and ";;;" comments. Lines with tokens outside the closed ARPAbet set
// are rejected with a diagnostic; bare vowels normalize to stress 0.
LexiconParse parse_cmudict(std::istream& in);
LexiconParse load_cmudict(const std::filesystem::path& file);

// Canonical (first) variant; out-of-lexicon word is an error naming it.
PhonemeSequence phonemize(const std::string& word, const PronunciationLexicon& lexicon);

struct StressVowel {
    PhonemeToken token;
    bool fallback = false; // no stress-1 vowel: first vowel taken, warn
};

StressVowel primary_stress_vowel(const PhonemeSequence& seq);

enum class VowelHeight { close, near_close, close_mid, mid, open_mid, near_open, open };
enum class VowelBackness { front, near_front, central, near_back, back };
enum class ConsonantManner { plosive, fricative, affricate, nasal, liquid, glide };
enum class ConsonantPlace { labial, coronal, dorsal, glottal };

std::string_view height_name(VowelHeight h);
std::string_view backness_name(VowelBackness b);
std::string_view manner_name(ConsonantManner m);
std::string_view place_name(ConsonantPlace p);

struct VowelFeature {
    std::string symbol;
    VowelHeight height;
    VowelBackness backness;
    bool rounded = false;
    double f1_hz = 0.0;
    double f2_hz = 0.0;
    std::optional<double> f3_hz;
    std::optional<std::string> glide_symbol; // diphthong target vowel
};

struct ConsonantFeature {
    std::string symbol;
    ConsonantManner manner;
    ConsonantPlace place;
    bool voiced = false;
};

// CSV-backed articulatory/formant table covering the full symbol set;
// coverage and formant sanity (f2 > f1 > 0) are checked at load.
class FeatureTable {
public:
    static FeatureTable load(const std::filesystem::path& csv);

    const VowelFeature& vowel(const std::string& symbol) const;
    const ConsonantFeature& consonant(const std::string& symbol) const;
    const std::string& version() const { return version_; }

private:
    std::unordered_map<std::string, VowelFeature> vowels_;
    std::unordered_map<std::string, ConsonantFeature> consonants_;
    std::string version_;
};

struct VowelPoint {
    std::string word;
    std::string vowel;
    double f1 = 0.0;
    double f2 = 0.0;
    std::optional<std::pair<double, double>> glide; // (f1, f2) of the glide target
    bool stress_fallback = false;
};

std::vector<VowelPoint> project_vowel_space(const std::vector<std::string>& words,
                                            const PronunciationLexicon& lexicon,
                                            const FeatureTable& table);

void export_projection_csv(const std::filesystem::path& file,
                           const std::vector<VowelPoint>& points);
std::vector<VowelPoint> import_projection_csv(const std::filesystem::path& file);

} // namespace semvox::phonetics

#endif
