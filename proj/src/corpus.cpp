#include "barriers/corpus.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "json.hpp"

#include "barriers/errors.hpp"
#include "barriers/io_util.hpp"

namespace barriers {

namespace {

constexpr std::array<std::string_view, kCategoryCount> kCategoryNames = {
    "business", "computers", "games",    "health",  "home",
    "recreation", "science", "shopping", "society", "sports",
};

// Dataset window of the source corpus; outside it is a warning, not an error.
constexpr std::int64_t kWindowStart = 1451606400;  // 2016-01-01T00:00:00Z
constexpr std::int64_t kWindowEnd = 1640995200;    // 2022-01-01T00:00:00Z

std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097LL + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y = static_cast<int>(yy + (m <= 2));
}

bool is_leap(int y) {
    return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
}

unsigned days_in_month(int y, unsigned m) {
    static constexpr unsigned lengths[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2 && is_leap(y)) {
        return 29;
    }
    return lengths[m - 1];
}

bool all_digits(std::string_view s) {
    return !s.empty() &&
           std::all_of(s.begin(), s.end(), [](unsigned char c) { return c >= '0' && c <= '9'; });
}

// Scheme ":" plus a non-empty remainder; scheme = ALPHA *(ALPHA/DIGIT/+/-/.).
bool is_absolute_uri(std::string_view uri) {
    const auto colon = uri.find(':');
    if (colon == std::string_view::npos || colon == 0 || colon + 1 >= uri.size()) {
        return false;
    }
    if (!std::isalpha(static_cast<unsigned char>(uri[0]))) {
        return false;
    }
    for (char c : uri.substr(1, colon - 1)) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.') {
            return false;
        }
    }
    return uri.find_first_of(" \t\n\r") == std::string_view::npos;
}

bool is_language_tag(std::string_view tag) {
    if (tag.empty()) {
        return true;  // empty means "unspecified"; the annotator falls back to the publisher
    }
    return std::all_of(tag.begin(), tag.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '-';
    });
}

}  // namespace

const std::vector<Category>& all_categories() {
    static const std::vector<Category> cats = [] {
        std::vector<Category> v;
        for (int i = 0; i < kCategoryCount; ++i) {
            v.push_back(static_cast<Category>(i));
        }
        return v;
    }();
    return cats;
}

std::string_view to_string(Category category) {
    return kCategoryNames[static_cast<std::size_t>(category)];
}

std::optional<Category> category_from_string(std::string_view name) {
    for (int i = 0; i < kCategoryCount; ++i) {
        if (kCategoryNames[static_cast<std::size_t>(i)] == name) {
            return static_cast<Category>(i);
        }
    }
    return std::nullopt;
}

std::optional<std::int64_t> parse_timestamp(std::string_view text) {
    // YYYY-MM-DD[T ]HH:MM:SS with optional Z or +hh:mm / -hh:mm.
    if (text.size() < 19) {
        return std::nullopt;
    }
    const auto num = [&](std::size_t pos, std::size_t len) -> int {
        return all_digits(text.substr(pos, len))
                   ? std::stoi(std::string(text.substr(pos, len)))
                   : -1;
    };
    if (text[4] != '-' || text[7] != '-' || (text[10] != 'T' && text[10] != ' ') ||
        text[13] != ':' || text[16] != ':') {
        return std::nullopt;
    }
    const int year = num(0, 4), month = num(5, 2), day = num(8, 2);
    const int hour = num(11, 2), minute = num(14, 2), second = num(17, 2);
    if (year < 0 || month < 1 || month > 12 || day < 1 || hour < 0 || hour > 23 ||
        minute < 0 || minute > 59 || second < 0 || second > 60) {
        return std::nullopt;
    }
    if (static_cast<unsigned>(day) > days_in_month(year, static_cast<unsigned>(month))) {
        return std::nullopt;
    }
    std::int64_t offset = 0;
    std::string_view rest = text.substr(19);
    if (rest == "Z") {
        rest = {};
    } else if (rest.size() == 6 && (rest[0] == '+' || rest[0] == '-') && rest[3] == ':') {
        const int oh = num(20, 2), om = num(23, 2);
        if (oh < 0 || oh > 23 || om < 0 || om > 59) {
            return std::nullopt;
        }
        offset = (rest[0] == '+' ? 1 : -1) * (oh * 3600LL + om * 60LL);
        rest = {};
    }
    if (!rest.empty()) {
        return std::nullopt;
    }
    const std::int64_t days =
        days_from_civil(year, static_cast<unsigned>(month), static_cast<unsigned>(day));
    return days * 86400 + hour * 3600 + minute * 60 + second - offset;
}

std::string format_timestamp(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds / 86400;
    std::int64_t rem = epoch_seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y = 0;
    unsigned m = 0, d = 0;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02lld:%02lld:%02lldZ", y, m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>(rem % 3600 / 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

CorpusIndex::CorpusIndex(std::vector<NewsArticle> articles)
    : articles_(std::move(articles)), category_events_(kCategoryCount) {
    article_index_.reserve(articles_.size());
    std::vector<std::string> event_order;
    std::unordered_map<std::string, std::vector<std::size_t>> members;
    for (std::size_t row = 0; row < articles_.size(); ++row) {
        const NewsArticle& a = articles_[row];
        article_index_.emplace(a.article_id, row);
        publisher_articles_[a.publisher_id].push_back(row);
        auto [it, inserted] = members.try_emplace(a.event_id);
        if (inserted) {
            event_order.push_back(a.event_id);
        }
        it->second.push_back(row);
    }
    events_.reserve(event_order.size());
    for (const std::string& event_id : event_order) {
        Event e;
        e.event_id = event_id;
        e.article_rows = std::move(members[event_id]);
        e.category = category_of_event(e, *this);
        event_index_.emplace(event_id, events_.size());
        category_events_[static_cast<std::size_t>(e.category)].push_back(events_.size());
        events_.push_back(std::move(e));
    }
}

const NewsArticle* CorpusIndex::article_by_id(std::string_view article_id) const {
    const auto it = article_index_.find(std::string(article_id));
    return it == article_index_.end() ? nullptr : &articles_[it->second];
}

const Event* CorpusIndex::event_by_id(std::string_view event_id) const {
    const auto it = event_index_.find(std::string(event_id));
    return it == event_index_.end() ? nullptr : &events_[it->second];
}

const std::vector<std::size_t>* CorpusIndex::articles_by_publisher(
    std::string_view publisher_id) const {
    const auto it = publisher_articles_.find(publisher_id);
    return it == publisher_articles_.end() ? nullptr : &it->second;
}

const std::vector<std::size_t>& CorpusIndex::events_by_category(Category category) const {
    return category_events_[static_cast<std::size_t>(category)];
}

Category category_of_event(const Event& event, const CorpusIndex& corpus) {
    std::array<std::size_t, kCategoryCount> counts{};
    for (std::size_t row : event.article_rows) {
        ++counts[static_cast<std::size_t>(corpus.articles()[row].category)];
    }
    std::size_t best = 0;
    for (std::size_t i = 1; i < counts.size(); ++i) {
        if (counts[i] > counts[best]) {
            best = i;  // ties keep the earlier (lower) enum value
        }
    }
    return static_cast<Category>(best);
}

namespace {

using nlohmann::json;

// Extracts one article. On the first violated field, records an issue and
// returns nullopt; one malformed record yields exactly one issue.
std::optional<NewsArticle> extract_article(const json& j, std::size_t line,
                                           std::vector<ValidationIssue>& issues) {
    const auto fail = [&](std::string field, std::string reason) {
        issues.push_back({line, std::move(field), std::move(reason)});
        return std::nullopt;
    };

    NewsArticle a;
    const auto get_string = [&](const char* key, std::string& dst, bool required_nonempty) {
        const auto it = j.find(key);
        if (it == j.end() || !it->is_string()) {
            return false;
        }
        dst = it->get<std::string>();
        return !(required_nonempty && dst.empty());
    };

    if (!get_string("article_id", a.article_id, true)) {
        return fail("article_id", "missing or not a non-empty string");
    }
    if (!get_string("title", a.title, false)) {
        return fail("title", "missing or not a string");
    }
    if (!get_string("body", a.body, false)) {
        return fail("body", "missing or not a string");
    }
    if (!get_string("publisher_id", a.publisher_id, true)) {
        return fail("publisher_id", "missing or not a non-empty string");
    }

    std::string ts;
    if (!get_string("published_at", ts, true)) {
        return fail("published_at", "missing or not a string");
    }
    const auto parsed = parse_timestamp(ts);
    if (!parsed) {
        return fail("published_at", "not an ISO-8601 timestamp: " + ts);
    }
    a.published_at = *parsed;

    std::string cat;
    if (!get_string("category", cat, true)) {
        return fail("category", "missing or not a string");
    }
    const auto category = category_from_string(cat);
    if (!category) {
        return fail("category", "not one of the ten DMOZ categories: " + cat);
    }
    a.category = *category;

    const auto concepts_it = j.find("concepts");
    if (concepts_it == j.end() || !concepts_it->is_array()) {
        return fail("concepts", "missing or not an array");
    }
    for (const auto& c : *concepts_it) {
        if (!c.is_string() || !is_absolute_uri(c.get_ref<const std::string&>())) {
            return fail("concepts", "entry is not a syntactically valid absolute URI");
        }
        a.concepts.push_back(c.get<std::string>());
    }

    std::string lang;
    const auto lang_it = j.find("language");
    if (lang_it == j.end() || !lang_it->is_string()) {
        return fail("language", "missing or not a string");
    }
    lang = lang_it->get<std::string>();
    if (!is_language_tag(lang)) {
        return fail("language", "not a plausible IETF language tag: " + lang);
    }
    a.language = lang;

    // Absent, null, or empty event_id puts the article in a singleton event.
    const auto ev_it = j.find("event_id");
    if (ev_it != j.end() && !ev_it->is_null()) {
        if (!ev_it->is_string()) {
            return fail("event_id", "not a string");
        }
        a.event_id = ev_it->get<std::string>();
    }
    if (a.event_id.empty()) {
        a.event_id = a.article_id;
    }
    return a;
}

}  // namespace

ParseResult parse_corpus(std::istream& stream) {
    std::vector<NewsArticle> articles;
    std::vector<ValidationIssue> issues;
    std::unordered_set<std::string> seen_ids;

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(stream, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;  // blank lines are not records
        }
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) {
            issues.push_back({line_no, "", "invalid JSON"});
            continue;
        }
        if (!j.is_object()) {
            issues.push_back({line_no, "", "record is not a JSON object"});
            continue;
        }
        auto article = extract_article(j, line_no, issues);
        if (!article) {
            continue;
        }
        if (!seen_ids.insert(article->article_id).second) {
            issues.push_back({line_no, "article_id", "duplicate article_id: " + article->article_id});
            continue;
        }
        if (article->published_at < kWindowStart || article->published_at >= kWindowEnd) {
            issues.push_back(
                {line_no, "published_at", "warning: timestamp outside the 2016-2021 window"});
        }
        articles.push_back(std::move(*article));
    }
    if (stream.bad()) {
        throw IoError("corpus stream read failure");
    }
    return {CorpusIndex(std::move(articles)), std::move(issues)};
}

ParseResult parse_corpus_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open corpus file: " + path);
    }
    return parse_corpus(in);
}

void write_corpus_jsonl(const CorpusIndex& corpus, std::ostream& out) {
    for (const NewsArticle& a : corpus.articles()) {
        json j;
        j["article_id"] = a.article_id;
        j["event_id"] = a.event_id;
        j["title"] = a.title;
        j["body"] = a.body;
        j["publisher_id"] = a.publisher_id;
        j["published_at"] = format_timestamp(a.published_at);
        j["category"] = std::string(to_string(a.category));
        j["concepts"] = a.concepts;
        j["language"] = a.language;
        out << j.dump() << '\n';
    }
}

void write_validation_report_json(const std::vector<ValidationIssue>& issues, std::ostream& out) {
    json arr = json::array();
    for (const ValidationIssue& issue : issues) {
        arr.push_back({{"line", issue.line}, {"field", issue.field}, {"reason", issue.reason}});
    }
    out << arr.dump(2) << '\n';
}

}  // namespace barriers
