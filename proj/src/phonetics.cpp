#include "semvox/phonetics.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "semvox/error.hpp"
#include "semvox/text.hpp"

namespace semvox::phonetics {

const std::vector<std::string>& arpabet_vowels() {
    static const std::vector<std::string> v = {"AA", "AE", "AH", "AO", "AW",
                                               "AY", "EH", "ER", "EY", "IH",
                                               "IY", "OW", "OY", "UH", "UW"};
    return v;
}

const std::vector<std::string>& arpabet_consonants() {
    static const std::vector<std::string> c = {
        "B", "CH", "D", "DH", "F", "G", "HH", "JH", "K",  "L",  "M", "N",
        "NG", "P", "R", "S",  "SH", "T", "TH", "V", "W", "Y", "Z", "ZH"};
    return c;
}

bool is_vowel_symbol(const std::string& symbol) {
    const auto& v = arpabet_vowels();
    return std::find(v.begin(), v.end(), symbol) != v.end();
}

bool is_consonant_symbol(const std::string& symbol) {
    const auto& c = arpabet_consonants();
    return std::find(c.begin(), c.end(), symbol) != c.end();
}

std::string PhonemeToken::to_string() const {
    if (stress >= 0) return symbol + std::to_string(stress);
    return symbol;
}

std::string PhonemeSequence::to_string() const {
    std::string out;
    for (const auto& t : phonemes) {
        if (!out.empty()) out += ' ';
        out += t.to_string();
    }
    return out;
}

const std::vector<PhonemeSequence>* PronunciationLexicon::find(
    const std::string& word) const {
    auto it = entries_.find(to_upper_ascii(word));
    if (it == entries_.end()) return nullptr;
    return &it->second.variants;
}

void PronunciationLexicon::add(const std::string& upper_word, std::size_t variant_no,
                               PhonemeSequence seq) {
    auto& entry = entries_[upper_word];
    auto pos = std::upper_bound(entry.variant_nos.begin(), entry.variant_nos.end(),
                                variant_no) -
               entry.variant_nos.begin();
    entry.variant_nos.insert(entry.variant_nos.begin() + pos, variant_no);
    entry.variants.insert(entry.variants.begin() + pos, std::move(seq));
}

namespace {

// Returns nullopt with `reason` set on any token outside the closed set.
std::optional<PhonemeToken> parse_phoneme(const std::string& raw, std::string& reason) {
    std::string symbol = raw;
    int stress = -1;
    if (!symbol.empty() && symbol.back() >= '0' && symbol.back() <= '9') {
        stress = symbol.back() - '0';
        symbol.pop_back();
        if (stress > 2) {
            reason = "invalid stress digit in '" + raw + "'";
            return std::nullopt;
        }
    }
    if (is_vowel_symbol(symbol)) {
        if (stress < 0) stress = 0; // bare vowel: dictionary convention
        return PhonemeToken{symbol, stress};
    }
    if (is_consonant_symbol(symbol)) {
        if (stress >= 0) {
            reason = "stress digit on consonant '" + raw + "'";
            return std::nullopt;
        }
        return PhonemeToken{symbol, -1};
    }
    reason = "unknown phoneme '" + raw + "'";
    return std::nullopt;
}

} // namespace

LexiconParse parse_cmudict(std::istream& in) {
    LexiconParse out;
    std::string line;
    std::size_t line_no = 0;
    std::size_t accepted = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (starts_with(line, ";;;")) continue;

        std::size_t sep = line.find_first_of(" \t");
        if (sep == std::string::npos) {
            out.rejected.push_back({line_no, line, "no phoneme field"});
            continue;
        }
        std::string head = line.substr(0, sep);
        std::string rest = line.substr(sep);

        std::size_t variant_no = 1;
        if (auto open = head.find('('); open != std::string::npos) {
            bool well_formed = head.size() >= open + 3 && head.back() == ')';
            std::string digits =
                well_formed ? head.substr(open + 1, head.size() - open - 2) : "";
            bool numeric = !digits.empty() &&
                           digits.find_first_not_of("0123456789") == std::string::npos;
            if (!numeric) {
                out.rejected.push_back({line_no, line, "malformed variant suffix"});
                continue;
            }
            variant_no = static_cast<std::size_t>(parse_int(digits));
            head = head.substr(0, open);
        }
        if (head.empty()) {
            out.rejected.push_back({line_no, line, "empty word"});
            continue;
        }

        PhonemeSequence seq;
        std::string reason;
        bool ok = true;
        std::istringstream tokens(rest);
        std::string tok;
        while (tokens >> tok) {
            auto ph = parse_phoneme(tok, reason);
            if (!ph) {
                ok = false;
                break;
            }
            seq.phonemes.push_back(std::move(*ph));
        }
        if (!ok) {
            out.rejected.push_back({line_no, line, reason});
            continue;
        }
        if (seq.phonemes.empty()) {
            out.rejected.push_back({line_no, line, "no phonemes"});
            continue;
        }
        out.lexicon.add(to_upper_ascii(head), variant_no, std::move(seq));
        ++accepted;
    }
    if (accepted == 0) {
        throw PipelineError("parse_cmudict: no entries accepted");
    }
    return out;
}

LexiconParse load_cmudict(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw PipelineError("cannot open dictionary: " + file.string());
    return parse_cmudict(in);
}

PhonemeSequence phonemize(const std::string& word, const PronunciationLexicon& lexicon) {
    const auto* variants = lexicon.find(word);
    if (!variants || variants->empty()) {
        throw PipelineError("phonemize: '" + word + "' not in lexicon");
    }
    return variants->front();
}

StressVowel primary_stress_vowel(const PhonemeSequence& seq) {
    const PhonemeToken* first_vowel = nullptr;
    for (const auto& t : seq.phonemes) {
        if (!t.is_vowel()) continue;
        if (t.stress == 1) return {t, false};
        if (!first_vowel) first_vowel = &t;
    }
    if (!first_vowel) {
        throw PipelineError("primary_stress_vowel: no vowel in '" + seq.to_string() +
                            "'");
    }
    return {*first_vowel, true};
}

std::string_view height_name(VowelHeight h) {
    switch (h) {
        case VowelHeight::close: return "close";
        case VowelHeight::near_close: return "near-close";
        case VowelHeight::close_mid: return "close-mid";
        case VowelHeight::mid: return "mid";
        case VowelHeight::open_mid: return "open-mid";
        case VowelHeight::near_open: return "near-open";
        case VowelHeight::open: return "open";
    }
    return "";
}

std::string_view backness_name(VowelBackness b) {
    switch (b) {
        case VowelBackness::front: return "front";
        case VowelBackness::near_front: return "near-front";
        case VowelBackness::central: return "central";
        case VowelBackness::near_back: return "near-back";
        case VowelBackness::back: return "back";
    }
    return "";
}

std::string_view manner_name(ConsonantManner m) {
    switch (m) {
        case ConsonantManner::plosive: return "plosive";
        case ConsonantManner::fricative: return "fricative";
        case ConsonantManner::affricate: return "affricate";
        case ConsonantManner::nasal: return "nasal";
        case ConsonantManner::liquid: return "liquid";
        case ConsonantManner::glide: return "glide";
    }
    return "";
}

std::string_view place_name(ConsonantPlace p) {
    switch (p) {
        case ConsonantPlace::labial: return "labial";
        case ConsonantPlace::coronal: return "coronal";
        case ConsonantPlace::dorsal: return "dorsal";
        case ConsonantPlace::glottal: return "glottal";
    }
    return "";
}

namespace {

VowelHeight height_from_name(const std::string& s) {
    for (auto h : {VowelHeight::close, VowelHeight::near_close, VowelHeight::close_mid,
                   VowelHeight::mid, VowelHeight::open_mid, VowelHeight::near_open,
                   VowelHeight::open}) {
        if (height_name(h) == s) return h;
    }
    throw PipelineError("feature table: unknown height '" + s + "'");
}

VowelBackness backness_from_name(const std::string& s) {
    for (auto b : {VowelBackness::front, VowelBackness::near_front,
                   VowelBackness::central, VowelBackness::near_back,
                   VowelBackness::back}) {
        if (backness_name(b) == s) return b;
    }
    throw PipelineError("feature table: unknown backness '" + s + "'");
}

ConsonantManner manner_from_name(const std::string& s) {
    for (auto m : {ConsonantManner::plosive, ConsonantManner::fricative,
                   ConsonantManner::affricate, ConsonantManner::nasal,
                   ConsonantManner::liquid, ConsonantManner::glide}) {
        if (manner_name(m) == s) return m;
    }
    throw PipelineError("feature table: unknown manner '" + s + "'");
}

ConsonantPlace place_from_name(const std::string& s) {
    for (auto p : {ConsonantPlace::labial, ConsonantPlace::coronal,
                   ConsonantPlace::dorsal, ConsonantPlace::glottal}) {
        if (place_name(p) == s) return p;
    }
    throw PipelineError("feature table: unknown place '" + s + "'");
}

bool parse_flag(const std::string& s) {
    if (s == "yes" || s == "true" || s == "1") return true;
    if (s == "no" || s == "false" || s == "0") return false;
    throw PipelineError("feature table: bad flag value '" + s + "'");
}

} // namespace

FeatureTable FeatureTable::load(const std::filesystem::path& csv) {
    std::ifstream in(csv);
    if (!in) throw PipelineError("cannot open feature table: " + csv.string());

    FeatureTable table;
    std::string line;
    bool header_seen = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        if (line[0] == '#') {
            auto pos = line.find("version:");
            if (pos != std::string::npos) {
                table.version_ = trim(line.substr(pos + 8));
            }
            continue;
        }
        if (!header_seen) {
            header_seen = true; // column order is fixed by the format
            continue;
        }
        auto f = parse_csv_line(line);
        if (f.size() != 12) {
            throw PipelineError("feature table: expected 12 columns, got " +
                                std::to_string(f.size()));
        }
        for (auto& x : f) x = trim(x);
        const std::string& symbol = f[0];
        const std::string& kind = f[1];
        if (kind == "vowel") {
            VowelFeature v;
            v.symbol = symbol;
            v.height = height_from_name(f[2]);
            v.backness = backness_from_name(f[3]);
            v.rounded = parse_flag(f[4]);
            v.f1_hz = parse_double(f[8]);
            v.f2_hz = parse_double(f[9]);
            if (!f[10].empty()) v.f3_hz = parse_double(f[10]);
            if (!f[11].empty()) v.glide_symbol = f[11];
            if (!(v.f1_hz > 0.0) || !(v.f2_hz > v.f1_hz)) {
                throw PipelineError("feature table: bad formants for '" + symbol + "'");
            }
            table.vowels_.emplace(symbol, std::move(v));
        } else if (kind == "consonant") {
            ConsonantFeature c;
            c.symbol = symbol;
            c.manner = manner_from_name(f[5]);
            c.place = place_from_name(f[6]);
            c.voiced = parse_flag(f[7]);
            table.consonants_.emplace(symbol, std::move(c));
        } else {
            throw PipelineError("feature table: unknown kind '" + kind + "'");
        }
    }

    // The table must be total over the closed symbol set.
    for (const auto& v : arpabet_vowels()) {
        if (!table.vowels_.count(v)) {
            throw PipelineError("feature table: missing vowel '" + v + "'");
        }
    }
    for (const auto& c : arpabet_consonants()) {
        if (!table.consonants_.count(c)) {
            throw PipelineError("feature table: missing consonant '" + c + "'");
        }
    }
    for (const auto& [sym, v] : table.vowels_) {
        if (v.glide_symbol && !table.vowels_.count(*v.glide_symbol)) {
            throw PipelineError("feature table: glide target '" + *v.glide_symbol +
                                "' of '" + sym + "' missing");
        }
    }
    return table;
}

const VowelFeature& FeatureTable::vowel(const std::string& symbol) const {
    auto it = vowels_.find(symbol);
    if (it == vowels_.end()) {
        throw PipelineError("unknown vowel symbol '" + symbol + "'");
    }
    return it->second;
}

const ConsonantFeature& FeatureTable::consonant(const std::string& symbol) const {
    auto it = consonants_.find(symbol);
    if (it == consonants_.end()) {
        throw PipelineError("unknown consonant symbol '" + symbol + "'");
    }
    return it->second;
}

std::vector<VowelPoint> project_vowel_space(const std::vector<std::string>& words,
                                            const PronunciationLexicon& lexicon,
                                            const FeatureTable& table) {
    std::vector<VowelPoint> out;
    out.reserve(words.size());
    for (const auto& word : words) {
        PhonemeSequence seq = phonemize(word, lexicon);
        StressVowel sv = primary_stress_vowel(seq);
        const VowelFeature& vf = table.vowel(sv.token.symbol);
        VowelPoint p;
        p.word = word;
        p.vowel = vf.symbol;
        p.f1 = vf.f1_hz;
        p.f2 = vf.f2_hz;
        p.stress_fallback = sv.fallback;
        if (vf.glide_symbol) {
            const VowelFeature& g = table.vowel(*vf.glide_symbol);
            p.glide = std::make_pair(g.f1_hz, g.f2_hz);
        }
        out.push_back(std::move(p));
    }
    return out;
}

void export_projection_csv(const std::filesystem::path& file,
                           const std::vector<VowelPoint>& points) {
    std::ostringstream out;
    out << "word,vowel,f1,f2,glide_f1,glide_f2\n";
    for (const auto& p : points) {
        out << csv_escape(p.word) << ',' << p.vowel << ',' << format_g17(p.f1) << ','
            << format_g17(p.f2) << ',';
        if (p.glide) {
            out << format_g17(p.glide->first) << ',' << format_g17(p.glide->second);
        } else {
            out << ',';
        }
        out << '\n';
    }
    write_file(file, out.str());
}

std::vector<VowelPoint> import_projection_csv(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) throw PipelineError("cannot open projection file: " + file.string());
    auto rows = read_csv(in);
    if (rows.empty()) throw PipelineError("empty projection file");
    std::vector<VowelPoint> out;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.size() != 6) throw PipelineError("projection row malformed");
        VowelPoint p;
        p.word = r[0];
        p.vowel = r[1];
        p.f1 = parse_double(r[2]);
        p.f2 = parse_double(r[3]);
        if (!trim(r[4]).empty()) {
            p.glide = std::make_pair(parse_double(r[4]), parse_double(r[5]));
        }
        out.push_back(std::move(p));
    }
    return out;
}

} // namespace semvox::phonetics
