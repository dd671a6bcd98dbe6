#include "generators.hpp"

#include "semvox/mathstat.hpp"
#include "semvox/rng.hpp"

namespace testgen {

using semvox::Mat;
using semvox::RngStream;

PlantedCorpus planted_corpus() {
    PlantedCorpus out;
    const std::size_t topics = out.topics;
    const std::size_t core_words = 8;

    // Alphabetic-only synthetic words so the tokenizer keeps them whole.
    auto letter = [](std::size_t i) { return static_cast<char>('a' + i); };
    auto core = [letter](std::size_t t, std::size_t c) {
        return std::string("topic") + letter(t) + "word" + letter(c);
    };
    auto stem_of = [letter](std::size_t t) {
        return std::string("topic") + letter(t) + "stem";
    };
    auto syn_of = [letter](std::size_t t) {
        return std::string("topic") + letter(t) + "syn";
    };

    // Uneven topic weights starve the light topics of the first two
    // principal directions; the stem/syn pair of a starved topic is
    // then confusable at k = 2 while k >= 5 separates every topic.
    const std::size_t weight[5] = {6, 5, 4, 2, 1};

    std::size_t doc_no = 0;
    for (std::size_t t = 0; t < topics; ++t) {
        for (std::size_t j = 0; j < 9; ++j) {
            std::string text;
            for (std::size_t c = 0; c < core_words; ++c) {
                std::size_t reps = weight[t] * (3 + (j + c) % 3);
                for (std::size_t r = 0; r < reps; ++r) {
                    text += core(t, c);
                    text += ' ';
                }
            }
            // Stem and synonym share a level profile across the topic
            // and differ only in a weak parity pattern, so the pair
            // stays aligned until far down the spectrum.
            std::size_t stem_reps = 3 + (j % 2 == 0 ? 1 : 0);
            std::size_t syn_reps = 3 + (j % 2 == 1 ? 1 : 0);
            for (std::size_t r = 0; r < stem_reps; ++r) {
                text += stem_of(t);
                text += ' ';
            }
            for (std::size_t r = 0; r < syn_reps; ++r) {
                text += syn_of(t);
                text += ' ';
            }
            // One synonym straddles a second, non-adjacent topic: with
            // only two dimensions the bridged topics collapse and a
            // neighbouring core word outscores it.
            if (t == 0 && j % 2 == 1) {
                for (int r = 0; r < 6; ++r) {
                    text += syn_of(3);
                    text += ' ';
                }
            }
            out.docs.documents.emplace_back(std::string("doc") +
                                                static_cast<char>('a' + t) +
                                                std::to_string(doc_no++),
                                            text);
        }
    }
    // Bridge documents tie adjacent topics together so that fewer than
    // five dimensions cannot separate them cleanly.
    for (std::size_t t = 0; t < topics; ++t) {
        std::string text;
        for (std::size_t c = 0; c < core_words; ++c) {
            for (std::size_t r = 0; r < 2 * weight[t]; ++r) {
                text += core(t, c);
                text += ' ';
                text += core((t + 1) % topics, c);
                text += ' ';
            }
        }
        out.docs.documents.emplace_back("bridge" + std::to_string(t), text);
    }

    for (std::size_t t = 0; t < topics; ++t) {
        semvox::lsa::SynonymItem item;
        item.stem = stem_of(t);
        int answer = static_cast<int>(t % 4);
        std::vector<std::string> distractors = {core((t + 1) % topics, 2),
                                                core((t + 2) % topics, 4),
                                                core((t + 3) % topics, 6)};
        std::size_t d = 0;
        for (int slot = 0; slot < 4; ++slot) {
            item.choices[slot] = (slot == answer) ? syn_of(t) : distractors[d++];
        }
        item.answer_index = answer;
        out.test.items.push_back(std::move(item));
    }
    return out;
}

Mat two_gaussian_features(std::size_t n_features, std::uint64_t seed) {
    // Two cluster centres drawn N(0,1) per feature; members scatter
    // around them with sd 0.1, so the centres sit ten member standard
    // deviations apart and Pearson correlation separates the clusters.
    Mat m(10, n_features);
    RngStream centre_rng(seed, 0xCE27E, 0);
    std::vector<double> centre_a(n_features), centre_b(n_features);
    for (std::size_t f = 0; f < n_features; ++f) {
        centre_a[f] = semvox::norm_quantile(centre_rng.uniform01());
        centre_b[f] = semvox::norm_quantile(centre_rng.uniform01());
    }
    for (std::size_t i = 0; i < 10; ++i) {
        RngStream rng(seed, 0x9a55, i);
        const auto& centre = (i < 5) ? centre_a : centre_b;
        for (std::size_t f = 0; f < n_features; ++f) {
            m(i, f) = centre[f] + 0.1 * semvox::norm_quantile(rng.uniform01());
        }
    }
    return m;
}

Mat random_dense(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    Mat m(rows, cols);
    RngStream rng(seed, rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < cols; ++j) {
            m(i, j) = 2.0 * rng.uniform01() - 1.0;
        }
    }
    return m;
}

Mat random_distance_matrix(std::size_t w, std::uint64_t seed) {
    Mat d(w, w);
    RngStream rng(seed, w, 0xD157);
    for (std::size_t i = 0; i < w; ++i) {
        for (std::size_t j = i + 1; j < w; ++j) {
            double v = 0.05 + 1.9 * rng.uniform01();
            d(i, j) = v;
            d(j, i) = v;
        }
    }
    return d;
}

} // namespace testgen
