#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace barriers {

/// The ten DMOZ top categories used throughout. Enumeration order is the
/// documented tie-break order for event categories.
enum class Category {
    business,
    computers,
    games,
    health,
    home,
    recreation,
    science,
    shopping,
    society,
    sports,
};

inline constexpr int kCategoryCount = 10;

const std::vector<Category>& all_categories();
std::string_view to_string(Category category);
std::optional<Category> category_from_string(std::string_view name);

struct NewsArticle {
    std::string article_id;
    std::string event_id;
    std::string title;
    std::string body;
    std::string publisher_id;
    std::int64_t published_at = 0;  // seconds since Unix epoch, UTC
    Category category = Category::business;
    std::vector<std::string> concepts;  // absolute URIs (Wikipedia pages)
    std::string language;               // IETF tag; may be empty

    bool operator==(const NewsArticle&) const = default;
};

/// One real-world occurrence, reported by one or more articles.
struct Event {
    std::string event_id;
    std::vector<std::size_t> article_rows;  // indexes into CorpusIndex::articles()
    Category category = Category::business; // mode of members, ties by enum order
};

struct ValidationIssue {
    std::size_t line = 0;  // 1-based line number in the input stream
    std::string field;     // offending field; empty for whole-record issues
    std::string reason;

    bool operator==(const ValidationIssue&) const = default;
};

/// Immutable after construction; safe to share across threads.
class CorpusIndex {
public:
    CorpusIndex() = default;
    explicit CorpusIndex(std::vector<NewsArticle> articles);

    const std::vector<NewsArticle>& articles() const { return articles_; }
    const std::vector<Event>& events() const { return events_; }

    const NewsArticle* article_by_id(std::string_view article_id) const;
    const Event* event_by_id(std::string_view event_id) const;

    /// Rows of articles published by the given source, in corpus order.
    const std::vector<std::size_t>* articles_by_publisher(std::string_view publisher_id) const;
    /// Event rows whose aggregate category matches, in corpus order.
    const std::vector<std::size_t>& events_by_category(Category category) const;

private:
    std::vector<NewsArticle> articles_;
    std::vector<Event> events_;
    std::unordered_map<std::string, std::size_t> article_index_;
    std::unordered_map<std::string, std::size_t> event_index_;
    std::map<std::string, std::vector<std::size_t>, std::less<>> publisher_articles_;
    std::vector<std::vector<std::size_t>> category_events_;
};

struct ParseResult {
    CorpusIndex index;
    std::vector<ValidationIssue> issues;
};

/// Parses JSON Lines (one article object per line). Malformed records are
/// skipped and reported; only an unreadable stream is fatal (IoError).
/// Records whose event_id is missing or empty become singleton events whose
/// id equals the article_id. Timestamps outside 2016-2021 are accepted with
/// a "warning:" issue.
ParseResult parse_corpus(std::istream& stream);
ParseResult parse_corpus_file(const std::string& path);

/// Most frequent category among member articles; ties broken by enum order.
Category category_of_event(const Event& event, const CorpusIndex& corpus);

/// Serializes back to the JSON Lines format parse_corpus accepts.
void write_corpus_jsonl(const CorpusIndex& corpus, std::ostream& out);

/// Validation report as a JSON array of {line, field, reason}.
void write_validation_report_json(const std::vector<ValidationIssue>& issues, std::ostream& out);

/// Strict ISO-8601 timestamp ("YYYY-MM-DDTHH:MM:SS" with optional space
/// separator and optional "Z" / "+hh:mm" / "-hh:mm" suffix). UTC epoch
/// seconds, or nullopt if malformed.
std::optional<std::int64_t> parse_timestamp(std::string_view text);
std::string format_timestamp(std::int64_t epoch_seconds);

}  // namespace barriers
