#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "barriers/corpus.hpp"
#include "barriers/metadata.hpp"

namespace barriers {

enum class BarrierKind { cultural, economic, political, linguistic, geographic };
inline constexpr int kBarrierCount = 5;

/// Cultural and economic are ternary; political, linguistic, geographic binary.
enum class BarrierClass {
    information_not_crossing,
    unsure,
    information_crossing,
    not_crossed,
    crossed,
};

const std::vector<BarrierKind>& all_barriers();
bool is_ternary(BarrierKind kind);
/// Legal classes of a kind, in severity order (not-crossing < unsure < crossing).
const std::vector<BarrierClass>& legal_classes(BarrierKind kind);

std::string_view to_string(BarrierKind kind);
std::string_view to_string(BarrierClass cls);
std::optional<BarrierKind> barrier_from_string(std::string_view name);
std::optional<BarrierClass> barrier_class_from_string(std::string_view name);

/// Distance bands for the ternary barriers: <= tau_low not-crossing,
/// <= tau_high unsure, above that crossing.
struct Thresholds {
    double tau_low = 0.1;
    double tau_high = 0.4;

    void validate() const;  // requires 0 < tau_low < tau_high < 1
};

/// Euclidean distance divided by sqrt(d), so unit-scaled inputs give a value
/// in [0, 1]. Dimension mismatch is a programming error (std::invalid_argument).
double profile_distance(std::span<const double> a, std::span<const double> b);

BarrierClass ternary_label_from_distance(double dist, const Thresholds& thresholds);

enum class DropReason {
    missing_publisher,
    missing_country_profile,
    missing_alignment,
    missing_language,
};
std::string_view to_string(DropReason reason);

using AnnotationOutcome = std::variant<BarrierClass, DropReason>;

/// Ternary label from the maximum pairwise cultural distance between the
/// distinct headquarters countries of the event's publishers; a single
/// country means an empty pair set and labels as not-crossing.
AnnotationOutcome annotate_cultural(const Event& event, const CorpusIndex& corpus,
                                    const MetadataKb& kb, const Thresholds& thresholds);
/// Same rule over the 12-dim prosperity vectors.
AnnotationOutcome annotate_economic(const Event& event, const CorpusIndex& corpus,
                                    const MetadataKb& kb, const Thresholds& thresholds);
/// not-crossed iff all headquarters countries are identical.
AnnotationOutcome annotate_geographic(const Event& event, const CorpusIndex& corpus,
                                      const MetadataKb& kb);
/// not-crossed iff all publishers share one normalized political alignment.
AnnotationOutcome annotate_political(const Event& event, const CorpusIndex& corpus,
                                     const MetadataKb& kb);
/// not-crossed iff all articles share one language (article field first,
/// publisher's publishing_language as fallback; compared lower-cased).
AnnotationOutcome annotate_linguistic(const Event& event, const CorpusIndex& corpus,
                                      const MetadataKb& kb);

struct AnnotationReport {
    struct PerBarrier {
        std::size_t labeled = 0;
        std::size_t dropped = 0;
        std::map<DropReason, std::size_t> drop_reasons;
    };
    std::array<PerBarrier, kBarrierCount> barriers{};
    std::size_t total_events = 0;
};

/// Labels per event; a barrier an event was dropped for is simply absent.
struct EventAnnotation {
    std::array<std::optional<BarrierClass>, kBarrierCount> labels{};

    std::optional<BarrierClass> label(BarrierKind kind) const {
        return labels[static_cast<std::size_t>(kind)];
    }
};

struct AnnotatedCorpus {
    std::map<std::string, EventAnnotation, std::less<>> events;  // keyed by event_id
    AnnotationReport report;
};

/// Applies all five annotators to every event. Partial labeling is allowed:
/// an event can be labeled for some barriers and dropped for others.
AnnotatedCorpus annotate_corpus(const CorpusIndex& corpus, const MetadataKb& kb,
                                const Thresholds& thresholds);

/// One JSON object per (event_id, barrier, class), events in id order.
void write_labels_jsonl(const AnnotatedCorpus& annotated, std::ostream& out);
void write_annotation_report_json(const AnnotationReport& report, std::ostream& out);

}  // namespace barriers
