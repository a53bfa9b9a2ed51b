#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"

#include "barriers/corpus.hpp"
#include "barriers/errors.hpp"

using namespace barriers;

namespace {

std::string record(const std::string& article_id, const std::string& event_id,
                   const std::string& category = "science",
                   const std::string& extra_removed_field = "") {
    std::string line = "{\"article_id\": \"" + article_id + "\"";
    if (!event_id.empty()) {
        line += ", \"event_id\": \"" + event_id + "\"";
    }
    std::map<std::string, std::string> fields = {
        {"title", "\"a title\""},
        {"body", "\"some body text\""},
        {"publisher_id", "\"example.com\""},
        {"published_at", "\"2019-03-04T05:06:07Z\""},
        {"category", "\"" + category + "\""},
        {"concepts", "[\"https://en.wikipedia.org/wiki/Thing\"]"},
        {"language", "\"en\""},
    };
    fields.erase(extra_removed_field);
    for (const auto& [key, value] : fields) {
        line += ", \"" + key + "\": " + value;
    }
    return line + "}";
}

ParseResult parse_lines(const std::vector<std::string>& lines) {
    std::string joined;
    for (const std::string& line : lines) {
        joined += line;
        joined += '\n';
    }
    std::istringstream in(joined);
    return parse_corpus(in);
}

}  // namespace

TEST_CASE("empty stream gives an empty index and no issues") {
    std::istringstream in("");
    const ParseResult result = parse_corpus(in);
    CHECK(result.index.articles().empty());
    CHECK(result.index.events().empty());
    CHECK(result.issues.empty());
}

TEST_CASE("records sharing an event_id group into one event") {
    const auto result = parse_lines({record("a1", "e1"), record("a2", "e1"), record("a3", "e1")});
    REQUIRE(result.index.events().size() == 1);
    CHECK(result.index.events()[0].event_id == "e1");
    CHECK(result.index.events()[0].article_rows.size() == 3);
    CHECK(result.issues.empty());
}

TEST_CASE("a record missing body is skipped and reported with its line") {
    const auto result = parse_lines({record("a1", "e1"), record("a2", "e1"),
                                     record("a3", "e2", "science", "body"), record("a4", "e2"),
                                     record("a5", "e3")});
    CHECK(result.index.articles().size() == 4);
    REQUIRE(result.issues.size() == 1);
    CHECK(result.issues[0].line == 3);
    CHECK(result.issues[0].field == "body");
}

TEST_CASE("absent event_id becomes a singleton event named by the article") {
    const auto result = parse_lines({record("lonely", "")});
    REQUIRE(result.index.events().size() == 1);
    CHECK(result.index.events()[0].event_id == "lonely");
    const NewsArticle& article = result.index.articles()[0];
    CHECK(article.event_id == "lonely");
}

TEST_CASE("duplicate article ids are rejected with an issue") {
    const auto result = parse_lines({record("dup", "e1"), record("dup", "e1")});
    CHECK(result.index.articles().size() == 1);
    REQUIRE(result.issues.size() == 1);
    CHECK(result.issues[0].field == "article_id");
    CHECK(result.issues[0].line == 2);
}

TEST_CASE("malformed JSON, bad category, bad timestamp, bad concept URI") {
    auto bad_category = record("a2", "e1", "astrology");
    auto bad_time = record("a3", "e1");
    const auto pos = bad_time.find("2019-03-04T05:06:07Z");
    bad_time.replace(pos, 20, "yesterday at noonish");
    std::string bad_concept = record("a4", "e1");
    const auto cpos = bad_concept.find("https://en.wikipedia.org/wiki/Thing");
    bad_concept.replace(cpos, 35, "not a uri at all");

    const auto result = parse_lines({"{ this is not json", bad_category, bad_time, bad_concept,
                                     record("ok", "e1")});
    CHECK(result.index.articles().size() == 1);
    REQUIRE(result.issues.size() == 4);
    CHECK(result.issues[0].line == 1);
    CHECK(result.issues[0].reason == "invalid JSON");
    CHECK(result.issues[1].field == "category");
    CHECK(result.issues[2].field == "published_at");
    CHECK(result.issues[3].field == "concepts");
}

TEST_CASE("timestamps outside 2016-2021 are accepted with a warning") {
    auto old_record = record("a-old", "e1");
    const auto pos = old_record.find("2019-03-04");
    old_record.replace(pos, 10, "2012-03-04");
    const auto result = parse_lines({old_record});
    CHECK(result.index.articles().size() == 1);  // accepted
    REQUIRE(result.issues.size() == 1);
    CHECK(result.issues[0].reason.starts_with("warning:"));
}

TEST_CASE("timestamp parsing handles separators and offsets") {
    CHECK(parse_timestamp("2019-01-11T00:17:00Z") == parse_timestamp("2019-01-11 00:17:00"));
    // +02:00 means the UTC instant is two hours earlier.
    const auto utc = parse_timestamp("2019-01-11T12:00:00Z");
    const auto offset = parse_timestamp("2019-01-11T14:00:00+02:00");
    REQUIRE(utc.has_value());
    CHECK(*utc == *offset);
    CHECK_FALSE(parse_timestamp("2019-02-30T00:00:00Z").has_value());
    CHECK_FALSE(parse_timestamp("2019-01-11").has_value());
    // Round trip through the formatter.
    CHECK(format_timestamp(*parse_timestamp("2020-02-29T23:59:59Z")) == "2020-02-29T23:59:59Z");
}

TEST_CASE("category_of_event: unanimity, majority, and enum-order ties") {
    const auto unanimous = parse_lines(
        {record("a1", "e1", "science"), record("a2", "e1", "science"),
         record("a3", "e1", "science")});
    CHECK(category_of_event(unanimous.index.events()[0], unanimous.index) == Category::science);

    const auto majority = parse_lines({record("b1", "e1", "business"),
                                       record("b2", "e1", "business"),
                                       record("b3", "e1", "sports")});
    CHECK(category_of_event(majority.index.events()[0], majority.index) == Category::business);

    // games precedes health in the enumeration order.
    const auto tie = parse_lines({record("c1", "e1", "games"), record("c2", "e1", "health")});
    CHECK(category_of_event(tie.index.events()[0], tie.index) == Category::games);
}

namespace {

// Order-insensitive index equality: same articles by id, same event memberships.
bool equivalent(const CorpusIndex& a, const CorpusIndex& b) {
    if (a.articles().size() != b.articles().size() || a.events().size() != b.events().size()) {
        return false;
    }
    for (const NewsArticle& article : a.articles()) {
        const NewsArticle* other = b.article_by_id(article.article_id);
        if (other == nullptr || !(article == *other)) {
            return false;
        }
    }
    for (const Event& event : a.events()) {
        const Event* other = b.event_by_id(event.event_id);
        if (other == nullptr || event.article_rows.size() != other->article_rows.size()) {
            return false;
        }
        std::set<std::string> mine, theirs;
        for (std::size_t row : event.article_rows) {
            mine.insert(a.articles()[row].article_id);
        }
        for (std::size_t row : other->article_rows) {
            theirs.insert(b.articles()[row].article_id);
        }
        if (mine != theirs) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("serialize and re-parse round-trips the index") {
    std::vector<std::string> lines;
    for (int i = 0; i < 9; ++i) {
        lines.push_back(record("art" + std::to_string(i), "e" + std::to_string(i % 3),
                               std::string(to_string(static_cast<Category>(i % 10)))));
    }
    const auto first = parse_lines(lines);
    REQUIRE(first.issues.empty());
    std::ostringstream serialized;
    write_corpus_jsonl(first.index, serialized);
    std::istringstream in(serialized.str());
    const auto second = parse_corpus(in);
    REQUIRE(second.issues.empty());
    CHECK(equivalent(first.index, second.index));
}

TEST_CASE("event member counts sum to accepted articles; parse is deterministic") {
    std::vector<std::string> lines;
    for (int i = 0; i < 12; ++i) {
        lines.push_back(record("a" + std::to_string(i), i % 4 == 0 ? "" : "e" + std::to_string(i % 5)));
    }
    lines.push_back("{ broken");
    const auto result = parse_lines(lines);
    std::size_t member_sum = 0;
    for (const Event& event : result.index.events()) {
        member_sum += event.article_rows.size();
    }
    CHECK(member_sum == result.index.articles().size());

    const auto again = parse_lines(lines);
    CHECK(equivalent(result.index, again.index));
    CHECK(result.issues == again.issues);
}

TEST_CASE("publisher and category indexes are consistent") {
    const auto result = parse_lines({record("a1", "e1", "science"), record("a2", "e1", "science"),
                                     record("a3", "e2", "sports")});
    const auto* rows = result.index.articles_by_publisher("example.com");
    REQUIRE(rows != nullptr);
    CHECK(rows->size() == 3);
    CHECK(result.index.articles_by_publisher("unknown.example") == nullptr);
    CHECK(result.index.events_by_category(Category::science).size() == 1);
    CHECK(result.index.events_by_category(Category::sports).size() == 1);
    CHECK(result.index.events_by_category(Category::home).empty());
}

TEST_CASE("validation report serializes line, field, reason") {
    std::ostringstream out;
    write_validation_report_json({{7, "body", "missing or not a string"}}, out);
    const std::string text = out.str();
    CHECK(text.find("\"line\": 7") != std::string::npos);
    CHECK(text.find("\"field\": \"body\"") != std::string::npos);
    CHECK(text.find("missing or not a string") != std::string::npos);
}

TEST_CASE("unreadable file raises IoError") {
    CHECK_THROWS_AS(parse_corpus_file("/nonexistent/corpus.jsonl"), IoError);
}
