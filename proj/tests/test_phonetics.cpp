#include <doctest.h>

#include <fstream>
#include <map>
#include <sstream>

#include "semvox/error.hpp"
#include "semvox/phonetics.hpp"
#include "semvox/text.hpp"

using namespace semvox;
using namespace semvox::phonetics;

namespace {

const char* kDataDir = SEMVOX_DATA_DIR;

PronunciationLexicon pinned_lexicon() {
    auto parse = load_cmudict(std::filesystem::path(kDataDir) / "cmudict_pinned.txt");
    REQUIRE(parse.rejected.empty());
    return std::move(parse.lexicon);
}

FeatureTable pinned_table() {
    return FeatureTable::load(std::filesystem::path(kDataDir) / "arpabet_features.csv");
}

} // namespace

TEST_CASE("closed symbol set has 15 vowels and 24 consonants") {
    CHECK(arpabet_vowels().size() == 15);
    CHECK(arpabet_consonants().size() == 24);
    CHECK(is_vowel_symbol("IH"));
    CHECK(is_consonant_symbol("CH"));
    CHECK(!is_vowel_symbol("ZZ"));
}

TEST_CASE("parse_cmudict accepts entries, comments and variants") {
    std::istringstream in(";;; header comment\n"
                          "PICK  P IH1 K\n"
                          "THE  DH AH0\n"
                          "THE(2)  DH IY0\n");
    auto parse = parse_cmudict(in);
    CHECK(parse.rejected.empty());
    CHECK(parse.lexicon.size() == 2);
    CHECK(phonemize("pick", parse.lexicon).to_string() == "P IH1 K");
    // Canonical variant is the unnumbered one.
    CHECK(phonemize("the", parse.lexicon).to_string() == "DH AH0");
    CHECK(parse.lexicon.find("THE")->size() == 2);
}

TEST_CASE("variants attach in numeric order whatever the file order") {
    std::istringstream in("WORD(3)  W ER1 D Z\n"
                          "WORD(2)  W ER1 D S\n"
                          "WORD  W ER1 D\n");
    auto parse = parse_cmudict(in);
    const auto* variants = parse.lexicon.find("word");
    REQUIRE(variants != nullptr);
    REQUIRE(variants->size() == 3);
    CHECK((*variants)[0].to_string() == "W ER1 D");
    CHECK((*variants)[1].to_string() == "W ER1 D S");
    CHECK((*variants)[2].to_string() == "W ER1 D Z");
    CHECK(phonemize("word", parse.lexicon).to_string() == "W ER1 D");
}

TEST_CASE("parse_cmudict rejects unknown phonemes with a diagnostic") {
    std::istringstream in("GOOD  G UH1 D\n"
                          "BAD  ZZ9\n"
                          "WORSE  P IH9 K\n"
                          "STRESSED  P1 IH1\n");
    auto parse = parse_cmudict(in);
    CHECK(parse.lexicon.size() == 1);
    REQUIRE(parse.rejected.size() == 3);
    CHECK(parse.rejected[0].reason.find("ZZ9") != std::string::npos);
    CHECK(parse.rejected[1].reason.find("stress") != std::string::npos);
}

TEST_CASE("parse_cmudict errors when nothing is accepted") {
    std::istringstream in(";;; nothing but comments\n");
    CHECK_THROWS_AS(parse_cmudict(in), PipelineError);
}

TEST_CASE("bare vowels normalize to stress 0") {
    std::istringstream in("SWALLOW  S W AA1 L OW\nOTHER  AH DH ER\n");
    auto parse = parse_cmudict(in);
    CHECK(phonemize("swallow", parse.lexicon).to_string() == "S W AA1 L OW0");
}

TEST_CASE("phonemize reproduces the golden transcriptions") {
    auto lexicon = pinned_lexicon();
    const std::map<std::string, std::string> golden = {
        {"pick", "P IH1 K"},        {"pinch", "P IH1 N CH"},
        {"squeeze", "S K W IY1 Z"}, {"wink", "W IH1 NG K"},
        {"lick", "L IH1 K"},        {"pull", "P UH1 L"},
        {"push", "P UH1 SH"},       {"poke", "P OW1 K"},
        {"chew", "CH UW1"},         {"chop", "CH AA1 P"},
        {"swallow", "S W AA1 L OW0"}, {"throw", "TH R OW1"},
        {"peck", "P EH1 K"},        {"bite", "B AY1 T"},
        {"scrape", "S K R EY1 P"},  {"suck", "S AH1 K"},
        {"smile", "S M AY1 L"},     {"gaze", "G EY1 Z"},
        {"frown", "F R AW1 N"},     {"sob", "S AA1 B"},
        {"hate", "HH EY1 T"},       {"glance", "G L AE1 N S"},
        {"glare", "G L EH1 R"},     {"leer", "L IH1 R"},
        {"fear", "F IH1 R"},        {"sneer", "S N IH1 R"},
        {"stare", "S T EH1 R"},     {"scare", "S K EH1 R"},
    };
    for (const auto& [word, expected] : golden) {
        CHECK(phonemize(word, lexicon).to_string() == expected);
    }
}

TEST_CASE("primary stress vowel extraction") {
    auto lexicon = pinned_lexicon();
    CHECK(primary_stress_vowel(phonemize("pick", lexicon)).token.symbol == "IH");
    CHECK(primary_stress_vowel(phonemize("squeeze", lexicon)).token.symbol == "IY");
    CHECK(primary_stress_vowel(phonemize("throw", lexicon)).token.symbol == "OW");
    CHECK(primary_stress_vowel(phonemize("frown", lexicon)).token.symbol == "AW");
    auto sv = primary_stress_vowel(phonemize("swallow", lexicon));
    CHECK(sv.token.symbol == "AA");
    CHECK(!sv.fallback);
}

TEST_CASE("primary stress falls back to the first vowel with a warning") {
    PhonemeSequence seq;
    seq.phonemes = {{"AH", 0}, {"B", -1}, {"AH", 0}};
    auto sv = primary_stress_vowel(seq);
    CHECK(sv.token.symbol == "AH");
    CHECK(sv.fallback);

    PhonemeSequence consonants;
    consonants.phonemes = {{"S", -1}, {"T", -1}};
    CHECK_THROWS_AS(primary_stress_vowel(consonants), PipelineError);
}

TEST_CASE("phonemize errors name the missing word") {
    auto lexicon = pinned_lexicon();
    CHECK_THROWS_WITH_AS(phonemize("xylophone", lexicon),
                         doctest::Contains("'xylophone'"), PipelineError);
}

TEST_CASE("round trip: reserialized canonical entries match the dictionary field") {
    std::ifstream in(std::filesystem::path(kDataDir) / "cmudict_pinned.txt");
    REQUIRE(in.good());
    auto lexicon = pinned_lexicon();
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || starts_with(line, ";;;")) continue;
        auto sep = line.find_first_of(" \t");
        std::string head = line.substr(0, sep);
        if (head.find('(') != std::string::npos) continue; // only canonical lines
        std::string field = trim(line.substr(sep));
        CHECK(phonemize(head, lexicon).to_string() == field);
    }
}

TEST_CASE("feature table is total over the symbol set") {
    auto table = pinned_table();
    for (const auto& v : arpabet_vowels()) CHECK(table.vowel(v).symbol == v);
    for (const auto& c : arpabet_consonants()) CHECK(table.consonant(c).symbol == c);
    CHECK(table.version() == "1");
}

TEST_CASE("feature table spot checks against the articulatory groupings") {
    auto table = pinned_table();
    const auto& ih = table.vowel("IH");
    CHECK(ih.backness == VowelBackness::front);
    CHECK(ih.height == VowelHeight::near_close);
    CHECK(!ih.rounded);

    const auto& uh = table.vowel("UH");
    CHECK(uh.backness == VowelBackness::back);
    CHECK(uh.rounded);

    const auto& ch = table.consonant("CH");
    CHECK(ch.manner == ConsonantManner::affricate);
    CHECK(ch.place == ConsonantPlace::coronal);
    CHECK(!ch.voiced);

    CHECK_THROWS_AS(table.vowel("QQ"), PipelineError);
}

TEST_CASE("front unrounded vowels beat back rounded vowels on F2 at equal height") {
    auto table = pinned_table();
    for (const auto& a : arpabet_vowels()) {
        const auto& va = table.vowel(a);
        if (va.backness != VowelBackness::front || va.rounded) continue;
        for (const auto& b : arpabet_vowels()) {
            const auto& vb = table.vowel(b);
            if (vb.backness != VowelBackness::back || !vb.rounded) continue;
            if (va.height != vb.height) continue;
            CHECK(va.f2_hz > vb.f2_hz);
        }
    }
}

TEST_CASE("formant sanity: f2 exceeds f1 for every vowel") {
    auto table = pinned_table();
    for (const auto& v : arpabet_vowels()) {
        CHECK(table.vowel(v).f2_hz > table.vowel(v).f1_hz);
        CHECK(table.vowel(v).f1_hz > 0.0);
    }
}

TEST_CASE("project_vowel_space places monophthongs and diphthongs") {
    auto lexicon = pinned_lexicon();
    auto table = pinned_table();

    auto points = project_vowel_space({"pick", "smile"}, lexicon, table);
    REQUIRE(points.size() == 2);
    CHECK(points[0].vowel == "IH");
    CHECK(points[0].f1 == table.vowel("IH").f1_hz);
    CHECK(points[0].f2 == table.vowel("IH").f2_hz);
    CHECK(!points[0].glide.has_value());

    CHECK(points[1].vowel == "AY");
    REQUIRE(points[1].glide.has_value());
    CHECK(points[1].glide->first == table.vowel("IH").f1_hz);
    CHECK(points[1].glide->second == table.vowel("IH").f2_hz);

    CHECK(project_vowel_space({}, lexicon, table).empty());
}

TEST_CASE("projection CSV round-trips") {
    namespace fs = std::filesystem;
    auto lexicon = pinned_lexicon();
    auto table = pinned_table();
    auto points = project_vowel_space({"pick", "frown", "chew"}, lexicon, table);
    auto dir = fs::temp_directory_path() / "semvox_test_proj";
    fs::create_directories(dir);
    export_projection_csv(dir / "p.csv", points);
    auto back = import_projection_csv(dir / "p.csv");
    REQUIRE(back.size() == points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        CHECK(back[i].word == points[i].word);
        CHECK(back[i].vowel == points[i].vowel);
        CHECK(back[i].f1 == points[i].f1);
        CHECK(back[i].glide.has_value() == points[i].glide.has_value());
    }
    fs::remove_all(dir);
}
