#include "barriers/annotator.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <set>
#include <stdexcept>

#include "json.hpp"

#include "barriers/errors.hpp"

namespace barriers {

namespace {

constexpr std::array<std::string_view, kBarrierCount> kBarrierNames = {
    "cultural", "economic", "political", "linguistic", "geographic",
};

constexpr std::array<std::string_view, 5> kClassNames = {
    "information-not-crossing", "unsure", "information-crossing", "not-crossed", "crossed",
};

constexpr std::array<std::string_view, 4> kDropReasonNames = {
    "missing publisher",
    "missing country profile",
    "missing alignment",
    "missing language",
};

std::string lowercase_ascii(std::string_view text) {
    std::string out(text);
    for (char& c : out) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
    return out;
}

}  // namespace

const std::vector<BarrierKind>& all_barriers() {
    static const std::vector<BarrierKind> kinds = {
        BarrierKind::cultural, BarrierKind::economic, BarrierKind::political,
        BarrierKind::linguistic, BarrierKind::geographic,
    };
    return kinds;
}

bool is_ternary(BarrierKind kind) {
    return kind == BarrierKind::cultural || kind == BarrierKind::economic;
}

const std::vector<BarrierClass>& legal_classes(BarrierKind kind) {
    static const std::vector<BarrierClass> ternary = {
        BarrierClass::information_not_crossing, BarrierClass::unsure,
        BarrierClass::information_crossing,
    };
    static const std::vector<BarrierClass> binary = {
        BarrierClass::not_crossed, BarrierClass::crossed,
    };
    return is_ternary(kind) ? ternary : binary;
}

std::string_view to_string(BarrierKind kind) {
    return kBarrierNames[static_cast<std::size_t>(kind)];
}

std::string_view to_string(BarrierClass cls) {
    return kClassNames[static_cast<std::size_t>(cls)];
}

std::optional<BarrierKind> barrier_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kBarrierNames.size(); ++i) {
        if (kBarrierNames[i] == name) {
            return static_cast<BarrierKind>(i);
        }
    }
    return std::nullopt;
}

std::optional<BarrierClass> barrier_class_from_string(std::string_view name) {
    for (std::size_t i = 0; i < kClassNames.size(); ++i) {
        if (kClassNames[i] == name) {
            return static_cast<BarrierClass>(i);
        }
    }
    return std::nullopt;
}

std::string_view to_string(DropReason reason) {
    return kDropReasonNames[static_cast<std::size_t>(reason)];
}

void Thresholds::validate() const {
    if (!(0.0 < tau_low && tau_low < tau_high && tau_high < 1.0)) {
        throw ConfigError("thresholds must satisfy 0 < tau_low < tau_high < 1");
    }
}

double profile_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("profile_distance: dimension mismatch");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return std::sqrt(sum) / std::sqrt(static_cast<double>(a.size()));
}

BarrierClass ternary_label_from_distance(double dist, const Thresholds& thresholds) {
    if (dist <= thresholds.tau_low) {
        return BarrierClass::information_not_crossing;
    }
    if (dist <= thresholds.tau_high) {
        return BarrierClass::unsure;
    }
    return BarrierClass::information_crossing;
}

namespace {

// Distinct headquarters countries of the event's publishers, or the drop
// reason that prevents resolving them.
std::variant<std::set<std::string>, DropReason> event_countries(const Event& event,
                                                                const CorpusIndex& corpus,
                                                                const MetadataKb& kb) {
    std::set<std::string> countries;
    for (std::size_t row : event.article_rows) {
        const Publisher* publisher =
            lookup_publisher(kb.publishers, corpus.articles()[row].publisher_id);
        if (publisher == nullptr) {
            return DropReason::missing_publisher;
        }
        countries.insert(publisher->headquarters_country);
    }
    return countries;
}

// Shared ternary rule: max pairwise profile distance over the distinct
// countries, then the threshold bands. N is 6 (cultural) or 12 (economic).
template <std::size_t N>
AnnotationOutcome annotate_by_distance(
    const Event& event, const CorpusIndex& corpus, const MetadataKb& kb,
    const Thresholds& thresholds,
    const std::map<std::string, std::array<double, N>, std::less<>>& vectors) {
    const auto resolved = event_countries(event, corpus, kb);
    if (std::holds_alternative<DropReason>(resolved)) {
        return std::get<DropReason>(resolved);
    }
    const auto& countries = std::get<std::set<std::string>>(resolved);

    std::vector<const std::array<double, N>*> profiles;
    profiles.reserve(countries.size());
    for (const std::string& code : countries) {
        const auto it = vectors.find(code);
        if (it == vectors.end()) {
            return DropReason::missing_country_profile;
        }
        profiles.push_back(&it->second);
    }
    double max_dist = 0.0;  // empty pair set (single country) stays at 0
    for (std::size_t i = 0; i < profiles.size(); ++i) {
        for (std::size_t j = i + 1; j < profiles.size(); ++j) {
            max_dist = std::max(max_dist, profile_distance(*profiles[i], *profiles[j]));
        }
    }
    return ternary_label_from_distance(max_dist, thresholds);
}

}  // namespace

AnnotationOutcome annotate_cultural(const Event& event, const CorpusIndex& corpus,
                                    const MetadataKb& kb, const Thresholds& thresholds) {
    return annotate_by_distance(event, corpus, kb, thresholds, kb.normalized.cultural);
}

AnnotationOutcome annotate_economic(const Event& event, const CorpusIndex& corpus,
                                    const MetadataKb& kb, const Thresholds& thresholds) {
    return annotate_by_distance(event, corpus, kb, thresholds, kb.normalized.economic);
}

AnnotationOutcome annotate_geographic(const Event& event, const CorpusIndex& corpus,
                                      const MetadataKb& kb) {
    const auto resolved = event_countries(event, corpus, kb);
    if (std::holds_alternative<DropReason>(resolved)) {
        return std::get<DropReason>(resolved);
    }
    const auto& countries = std::get<std::set<std::string>>(resolved);
    return countries.size() <= 1 ? BarrierClass::not_crossed : BarrierClass::crossed;
}

AnnotationOutcome annotate_political(const Event& event, const CorpusIndex& corpus,
                                     const MetadataKb& kb) {
    std::set<std::string> alignments;
    for (std::size_t row : event.article_rows) {
        const Publisher* publisher =
            lookup_publisher(kb.publishers, corpus.articles()[row].publisher_id);
        if (publisher == nullptr) {
            return DropReason::missing_publisher;
        }
        if (!publisher->political_alignment) {
            return DropReason::missing_alignment;
        }
        alignments.insert(*publisher->political_alignment);
    }
    return alignments.size() <= 1 ? BarrierClass::not_crossed : BarrierClass::crossed;
}

AnnotationOutcome annotate_linguistic(const Event& event, const CorpusIndex& corpus,
                                      const MetadataKb& kb) {
    std::set<std::string> languages;
    for (std::size_t row : event.article_rows) {
        const NewsArticle& article = corpus.articles()[row];
        std::string language = article.language;
        if (language.empty()) {
            const Publisher* publisher = lookup_publisher(kb.publishers, article.publisher_id);
            if (publisher != nullptr) {
                language = publisher->publishing_language;
            }
        }
        if (language.empty()) {
            return DropReason::missing_language;
        }
        languages.insert(lowercase_ascii(language));
    }
    return languages.size() <= 1 ? BarrierClass::not_crossed : BarrierClass::crossed;
}

AnnotatedCorpus annotate_corpus(const CorpusIndex& corpus, const MetadataKb& kb,
                                const Thresholds& thresholds) {
    thresholds.validate();
    AnnotatedCorpus out;
    out.report.total_events = corpus.events().size();
    for (const Event& event : corpus.events()) {
        EventAnnotation annotation;
        for (BarrierKind kind : all_barriers()) {
            AnnotationOutcome outcome = [&] {
                switch (kind) {
                    case BarrierKind::cultural:
                        return annotate_cultural(event, corpus, kb, thresholds);
                    case BarrierKind::economic:
                        return annotate_economic(event, corpus, kb, thresholds);
                    case BarrierKind::political:
                        return annotate_political(event, corpus, kb);
                    case BarrierKind::linguistic:
                        return annotate_linguistic(event, corpus, kb);
                    case BarrierKind::geographic:
                        return annotate_geographic(event, corpus, kb);
                }
                throw std::logic_error("unreachable barrier kind");
            }();
            auto& per_barrier = out.report.barriers[static_cast<std::size_t>(kind)];
            if (std::holds_alternative<BarrierClass>(outcome)) {
                annotation.labels[static_cast<std::size_t>(kind)] =
                    std::get<BarrierClass>(outcome);
                ++per_barrier.labeled;
            } else {
                ++per_barrier.dropped;
                ++per_barrier.drop_reasons[std::get<DropReason>(outcome)];
            }
        }
        out.events.emplace(event.event_id, annotation);
    }
    return out;
}

void write_labels_jsonl(const AnnotatedCorpus& annotated, std::ostream& out) {
    for (const auto& [event_id, annotation] : annotated.events) {
        for (BarrierKind kind : all_barriers()) {
            const auto label = annotation.label(kind);
            if (!label) {
                continue;
            }
            nlohmann::json j;
            j["event_id"] = event_id;
            j["barrier"] = std::string(to_string(kind));
            j["class"] = std::string(to_string(*label));
            out << j.dump() << '\n';
        }
    }
}

void write_annotation_report_json(const AnnotationReport& report, std::ostream& out) {
    nlohmann::json j;
    j["total_events"] = report.total_events;
    nlohmann::json barriers = nlohmann::json::object();
    for (BarrierKind kind : all_barriers()) {
        const auto& per_barrier = report.barriers[static_cast<std::size_t>(kind)];
        nlohmann::json entry;
        entry["labeled"] = per_barrier.labeled;
        entry["dropped"] = per_barrier.dropped;
        nlohmann::json reasons = nlohmann::json::object();
        for (const auto& [reason, count] : per_barrier.drop_reasons) {
            reasons[std::string(to_string(reason))] = count;
        }
        entry["drop_reasons"] = reasons;
        barriers[std::string(to_string(kind))] = entry;
    }
    j["barriers"] = barriers;
    out << j.dump(2) << '\n';
}

}  // namespace barriers
