#pragma once

#include <cstdint>
#include <string>

namespace barriers {

/// Benchmark corpus where body text is class-uninformative noise and the
/// concept tokens determine the geographic barrier label deterministically:
/// crossed events span two countries and carry "Border_Dispute"-style anchor
/// concepts, not-crossed events stay in one country and carry
/// "Domestic_Affairs"-style anchors. Everything else (body words, extra
/// concepts) is drawn from pools shared by both classes.
struct SyntheticSpec {
    std::size_t events = 420;
    std::size_t articles_per_event = 2;
    std::size_t body_words = 15;
    std::size_t noise_vocab = 300;      // shared body-word pool
    std::size_t anchor_concepts = 3;    // class-determined concepts per event
    std::size_t noise_concepts_pool = 6;
    std::size_t concepts_per_event = 1; // noise concepts drawn per event
    std::uint64_t seed = 42;
};

struct SyntheticCorpus {
    std::string corpus_jsonl;
    std::string countries_csv;
    std::string publishers_csv;
};

SyntheticCorpus generate_concept_benefit_corpus(const SyntheticSpec& spec);

}  // namespace barriers
