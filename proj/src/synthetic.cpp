#include "barriers/synthetic.hpp"

#include <sstream>
#include <vector>

#include "barriers/corpus.hpp"
#include "barriers/rng.hpp"

namespace barriers {

namespace {

// Two publishers per country so crossed events can also mix publishers
// within a country without changing the geographic label.
struct SyntheticPublisher {
    const char* id;
    const char* country;
};

constexpr SyntheticPublisher kPublishers[] = {
    {"alpha-news.us", "US"}, {"beta-daily.us", "US"},
    {"gamma-post.fr", "FR"}, {"delta-journal.fr", "FR"},
    {"epsilon-times.jp", "JP"}, {"zeta-herald.jp", "JP"},
    {"eta-tribune.br", "BR"}, {"theta-gazette.br", "BR"},
};

constexpr const char* kCountries[] = {"US", "FR", "JP", "BR"};

std::string noise_word(std::size_t i) {
    // Pronounceable deterministic filler ("noka", "rilu", ...).
    static const char* syllables[] = {"ba", "de", "fi", "go", "hu", "ka", "lo", "mi",
                                      "nu", "pe", "ri", "so", "ta", "vu", "wa", "ze"};
    std::string word;
    std::size_t v = i + 17;
    for (int s = 0; s < 3; ++s) {
        word += syllables[v % 16];
        v /= 16;
    }
    return word + std::to_string(i % 10);
}

}  // namespace

SyntheticCorpus generate_concept_benefit_corpus(const SyntheticSpec& spec) {
    Rng rng(substream_seed(spec.seed, "synthetic"));
    std::ostringstream corpus;

    const std::string wiki = "https://en.wikipedia.org/wiki/";
    std::vector<std::string> noise_pool;
    noise_pool.reserve(spec.noise_vocab);
    for (std::size_t i = 0; i < spec.noise_vocab; ++i) {
        noise_pool.push_back(noise_word(i));
    }
    std::vector<std::string> concept_pool;
    for (std::size_t i = 0; i < spec.noise_concepts_pool; ++i) {
        concept_pool.push_back(wiki + "Topic_" + std::to_string(i));
    }
    static const char* kCrossedAnchors[] = {"Border_Dispute", "International_Relations",
                                            "Foreign_Policy", "Diplomacy"};
    static const char* kDomesticAnchors[] = {"Domestic_Affairs", "Local_Government",
                                             "Municipal_Politics", "Town_Council"};
    const std::size_t anchors = std::min<std::size_t>(spec.anchor_concepts, 4);

    const std::size_t publisher_count = std::size(kPublishers);
    for (std::size_t e = 0; e < spec.events; ++e) {
        const bool crossed = e % 2 == 1;  // balanced classes
        const std::string event_id = "ev-" + std::to_string(e);
        // Publisher choice fixes the geographic label: one country for
        // not-crossed, two distinct countries for crossed.
        std::size_t first = rng.next_below(publisher_count);
        std::size_t second;
        if (crossed) {
            do {
                second = rng.next_below(publisher_count);
            } while (kPublishers[second].country == kPublishers[first].country);
        } else {
            second = first % 2 == 0 ? first + 1 : first - 1;  // same country, other outlet
        }

        // Event-level concepts: the class anchors plus shared noise topics.
        std::vector<std::string> concepts;
        for (std::size_t c = 0; c < anchors; ++c) {
            concepts.push_back(wiki + (crossed ? kCrossedAnchors[c] : kDomesticAnchors[c]));
        }
        for (std::size_t c = 0; c < spec.concepts_per_event; ++c) {
            concepts.push_back(concept_pool[rng.next_below(concept_pool.size())]);
        }

        for (std::size_t a = 0; a < spec.articles_per_event; ++a) {
            const SyntheticPublisher& publisher =
                kPublishers[a % 2 == 0 ? first : second];
            std::string body;
            for (std::size_t w = 0; w < spec.body_words; ++w) {
                if (w > 0) {
                    body += ' ';
                }
                body += noise_pool[rng.next_below(noise_pool.size())];
            }
            const std::int64_t published =
                1451606400 + static_cast<std::int64_t>(e) * 3600 + static_cast<std::int64_t>(a) * 60;
            const std::string title =
                "report " + noise_pool[rng.next_below(noise_pool.size())];
            corpus << "{\"article_id\": \"" << event_id << "-a" << a << "\", \"event_id\": \""
                   << event_id << "\", \"title\": \"" << title << "\", \"body\": \"" << body
                   << "\", \"publisher_id\": \"" << publisher.id << "\", \"published_at\": \""
                   << format_timestamp(published) << "\", \"category\": \"society\", "
                   << "\"concepts\": [";
            for (std::size_t c = 0; c < concepts.size(); ++c) {
                if (c > 0) {
                    corpus << ", ";
                }
                corpus << '"' << concepts[c] << '"';
            }
            corpus << "], \"language\": \"en\"}\n";
        }
    }

    SyntheticCorpus out;
    out.corpus_jsonl = std::move(corpus).str();

    std::ostringstream countries;
    countries << "country_code,h1,h2,h3,h4,h5,h6,p1,p2,p3,p4,p5,p6,p7,p8,p9,p10,p11,p12,lat,lon\n";
    for (std::size_t c = 0; c < std::size(kCountries); ++c) {
        countries << kCountries[c];
        for (int d = 0; d < 18; ++d) {
            countries << ',' << 10 + 20 * static_cast<int>(c) + d % 3;
        }
        countries << ",0,0\n";
    }
    out.countries_csv = std::move(countries).str();

    std::ostringstream publishers;
    publishers << "publisher_id,name,country_code,political_alignment,publishing_language\n";
    for (const SyntheticPublisher& p : kPublishers) {
        publishers << p.id << ',' << p.id << ',' << p.country << ",centre,en\n";
    }
    out.publishers_csv = std::move(publishers).str();
    return out;
}

}  // namespace barriers
