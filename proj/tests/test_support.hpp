#pragma once

// Shared builders for in-memory corpora and metadata in tests.

#include <string>
#include <vector>

#include "barriers/annotator.hpp"
#include "barriers/corpus.hpp"
#include "barriers/metadata.hpp"

namespace barriers::test {

struct ArticleSpec {
    std::string event_id;
    std::string publisher_id;
    std::string language = "en";
    Category category = Category::society;
    std::string title = "a title";
    std::string body = "a body";
    std::vector<std::string> concepts = {};
};

inline CorpusIndex make_corpus(const std::vector<ArticleSpec>& specs) {
    std::vector<NewsArticle> articles;
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const ArticleSpec& spec = specs[i];
        NewsArticle a;
        a.article_id = "art-" + std::to_string(i);
        a.event_id = spec.event_id;
        a.title = spec.title;
        a.body = spec.body;
        a.publisher_id = spec.publisher_id;
        a.published_at = 1500000000 + static_cast<std::int64_t>(i) * 60;
        a.category = spec.category;
        a.concepts = spec.concepts;
        a.language = spec.language;
        articles.push_back(std::move(a));
    }
    return CorpusIndex(std::move(articles));
}

struct CountrySpec {
    std::string code;
    std::array<double, kCulturalDims> hofstede;
    std::array<double, kEconomicDims> prosperity;
};

struct PublisherSpec {
    std::string id;
    std::string country;
    std::optional<std::string> alignment = "centre";
    std::string language = "en";
};

inline MetadataKb make_kb(const std::vector<CountrySpec>& countries,
                          const std::vector<PublisherSpec>& publishers) {
    MetadataKb kb;
    for (const CountrySpec& spec : countries) {
        CountryProfile p;
        p.country_code = spec.code;
        p.hofstede = spec.hofstede;
        p.prosperity = spec.prosperity;
        kb.countries[spec.code] = p;
    }
    for (const PublisherSpec& spec : publishers) {
        Publisher p;
        p.publisher_id = spec.id;
        p.name = spec.id;
        p.headquarters_country = spec.country;
        p.political_alignment = spec.alignment;
        p.publishing_language = spec.language;
        kb.publishers[spec.id] = p;
    }
    kb.normalized = normalize_profiles(kb.countries);
    return kb;
}

}  // namespace barriers::test
