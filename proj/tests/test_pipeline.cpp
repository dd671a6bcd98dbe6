#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <map>

#include <json.hpp>

#include "semvox/error.hpp"
#include "semvox/pipeline.hpp"
#include "semvox/sha256.hpp"
#include "semvox/text.hpp"

using namespace semvox;
namespace fs = std::filesystem;

namespace {

const fs::path kFixtures = SEMVOX_FIXTURES_DIR;

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::temp_directory_path() / ("semvox_pipe_" + name);
    fs::remove_all(dir);
    return dir;
}

std::map<std::string, std::string> dir_hashes(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        out[fs::relative(entry.path(), dir).string()] =
            sha256_file_hex(entry.path());
    }
    return out;
}

pipeline::RunConfig fixture_config(const fs::path& out,
                                   const pipeline::Overrides& extra = {}) {
    pipeline::Overrides ov = extra;
    ov.out = out;
    return pipeline::load_config(kFixtures / "run_fixture.toml", ov);
}

} // namespace

TEST_CASE("config validation catches bad values before any work") {
    CHECK_THROWS_AS(fixture_config(fresh_dir("badalpha"),
                                   {.seed = {}, .k = {}, .alpha = 1.5, .out = {}}),
                    ValidationError);

    // Seed is mandatory: strip it by loading a config without one.
    auto dir = fresh_dir("noseed");
    fs::create_directories(dir);
    write_file(dir / "c.toml",
               "[corpus]\npath = \"nope.txt\"\n[output]\ndir = \"o\"\n");
    CHECK_THROWS_AS(pipeline::load_config(dir / "c.toml", {}), ValidationError);
}

TEST_CASE("config paths resolve relative to the config file") {
    auto cfg = fixture_config(fresh_dir("resolve"));
    CHECK(fs::exists(cfg.corpus_path));
    CHECK(fs::exists(cfg.dictionary_path));
    CHECK(cfg.label == "fixture");
    CHECK(cfg.seed == 42);
}

TEST_CASE("full pipeline run produces the artifact set") {
    auto out = fresh_dir("run1");
    auto report = pipeline::run_pipeline(fixture_config(out));
    CHECK(report.k_used == 5);

    const char* expected[] = {
        "matrix_fixture.txt",    "terms_fixture.txt",
        "docs_fixture.txt",      "factors_fixture.txt",
        "adjacency_fixture.csv", "dendrogram_fixture.newick",
        "support_fixture.json",  "significant_fixture.csv",
        "cluster_stats_fixture.csv", "phonemes_fixture.csv",
        "projection_fixture.csv", "heatmap_fixture.svg",
        "dendrogram_fixture.svg", "seplot_fixture.svg",
        "vowelchart_all.svg",    "meta.json",
    };
    for (const char* name : expected) {
        CHECK_MESSAGE(fs::exists(out / name), name);
    }

    // Metadata carries hashes for every input file.
    auto meta = read_file(out / "meta.json");
    CHECK(meta.find("sha256") != std::string::npos);
    CHECK(meta.find("\"seed\": 42") != std::string::npos);
    fs::remove_all(out);
}

TEST_CASE("same seed, different output directories: byte-identical artifacts") {
    auto out1 = fresh_dir("det1");
    auto out2 = fresh_dir("det2");
    pipeline::run_pipeline(fixture_config(out1));
    pipeline::run_pipeline(fixture_config(out2));
    CHECK(dir_hashes(out1) == dir_hashes(out2));
    fs::remove_all(out1);
    fs::remove_all(out2);
}

TEST_CASE("different seeds produce different bootstrap artifacts") {
    auto out1 = fresh_dir("seedA");
    auto out2 = fresh_dir("seedB");
    pipeline::run_pipeline(fixture_config(out1));
    pipeline::run_pipeline(
        fixture_config(out2, {.seed = 999, .k = {}, .alpha = {}, .out = {}}));
    auto h1 = dir_hashes(out1), h2 = dir_hashes(out2);
    CHECK(h1["support_fixture.json"] != h2["support_fixture.json"]);
    fs::remove_all(out1);
    fs::remove_all(out2);
}

TEST_CASE("a failing stage removes partial artifacts") {
    auto out = fresh_dir("fail");
    auto cfg = fixture_config(out);
    // Word list with an out-of-vocabulary word aborts the adjacency stage.
    auto dir = fresh_dir("failwords");
    fs::create_directories(dir);
    write_file(dir / "words.txt", "pick\nnonexistentword\n");
    cfg.words_path = dir / "words.txt";
    CHECK_THROWS_WITH_AS(pipeline::run_pipeline(cfg),
                         doctest::Contains("stage adjacency"), PipelineError);
    // Everything written before the failure is gone again.
    std::size_t remaining = 0;
    if (fs::exists(out)) {
        for (auto& e : fs::directory_iterator(out)) {
            (void)e;
            ++remaining;
        }
    }
    CHECK(remaining == 0);
    fs::remove_all(out);
    fs::remove_all(dir);
}

TEST_CASE("compare_runs of identical runs shares every within-cluster pair") {
    auto out1 = fresh_dir("cmp1");
    auto out2 = fresh_dir("cmp2");
    pipeline::run_pipeline(fixture_config(out1));
    pipeline::run_pipeline(fixture_config(out2));

    auto cmp_dir = fresh_dir("cmpout");
    auto result = pipeline::compare_runs(out1 / "meta.json", out2 / "meta.json", 0.05,
                                         cmp_dir);
    // Identical runs: the pair set of run 1's significant clusters.
    auto sup = cluster::import_support_json(out1 / "support_fixture.json");
    auto clusters = cluster::significant_clusters(sup.tree, sup.supports, 0.05);
    std::size_t expected_pairs = 0;
    for (const auto& c : clusters) expected_pairs += c.size() * (c.size() - 1) / 2;
    CHECK(result.report.pairs.size() == expected_pairs);
    for (const auto& ov : result.report.overlaps) CHECK(ov.jaccard == 1.0);
    CHECK(fs::exists(cmp_dir / "shared_pairs.csv"));
    CHECK(fs::exists(cmp_dir / "bold_words.json"));

    fs::remove_all(out1);
    fs::remove_all(out2);
    fs::remove_all(cmp_dir);
}

TEST_CASE("compare_runs rejects mismatched word lists") {
    auto out1 = fresh_dir("mis1");
    auto out2 = fresh_dir("mis2");
    pipeline::run_pipeline(fixture_config(out1));

    auto cfg = fixture_config(out2);
    auto dir = fresh_dir("miswords");
    fs::create_directories(dir);
    write_file(dir / "words.txt", "pick\npinch\nsqueeze\nlick\nthrow\npush\n");
    cfg.words_path = dir / "words.txt";
    pipeline::run_pipeline(cfg);

    CHECK_THROWS_WITH_AS(pipeline::compare_runs(out1 / "meta.json", out2 / "meta.json",
                                                0.05, fresh_dir("misout")),
                         doctest::Contains("word lists differ"), ValidationError);
    fs::remove_all(out1);
    fs::remove_all(out2);
    fs::remove_all(dir);
}

TEST_CASE("duplicate word-list entries collapse instead of failing late") {
    auto out = fresh_dir("dup");
    auto cfg = fixture_config(out);
    auto dir = fresh_dir("dupwords");
    fs::create_directories(dir);
    write_file(dir / "words.txt",
               "pick\npinch\nPick\nsqueeze\nlick\npinch\nthrow\npush\n");
    cfg.words_path = dir / "words.txt";
    auto report = pipeline::run_pipeline(cfg);
    auto meta = nlohmann::json::parse(read_file(report.metadata_file));
    CHECK(meta.at("words").size() == 6); // case-folded, first kept
    fs::remove_all(out);
    fs::remove_all(dir);
}

TEST_CASE("reusing an output directory with a finished run is refused") {
    auto out = fresh_dir("reuse");
    pipeline::run_pipeline(fixture_config(out));
    CHECK_THROWS_AS(pipeline::run_pipeline(fixture_config(out)), PipelineError);
    fs::remove_all(out);
}
