#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "barriers/annotator.hpp"
#include "barriers/corpus.hpp"

namespace barriers {

struct PublisherStatsRow {
    BarrierKind barrier{};
    Category category{};
    std::size_t publishers = 0;
    double avg_articles_per_publisher = 0.0;
    double avg_events_per_publisher = 0.0;
};

/// A publisher counts toward a (barrier, category) cell iff it published at
/// least one article in an event labeled for that barrier with that category.
/// avg events = mean over publishers of the number of such events each
/// publisher appears in.
std::vector<PublisherStatsRow> publisher_stats(const CorpusIndex& corpus,
                                               const AnnotatedCorpus& annotated);

struct ConceptOverlap {
    std::vector<std::string> group_names;
    std::vector<std::size_t> sizes;                       // unique concepts per group
    std::vector<std::vector<std::size_t>> pairwise;       // [i][j], i < j filled
    std::size_t full_intersection = 0;
};

/// Exact set algebra over concept URIs; needs >= 2 groups.
ConceptOverlap concept_overlap(
    const std::vector<std::pair<std::string, std::set<std::string>>>& groups);

/// Concepts of all articles in events labeled for each barrier.
std::vector<std::pair<std::string, std::set<std::string>>> concept_groups_by_barrier(
    const CorpusIndex& corpus, const AnnotatedCorpus& annotated);
/// Concepts of all articles grouped by event category (annotation-independent).
std::vector<std::pair<std::string, std::set<std::string>>> concept_groups_by_category(
    const CorpusIndex& corpus);

struct ClassDistributionRow {
    BarrierKind barrier{};
    Category category{};
    BarrierClass cls{};
    std::size_t count = 0;  // events
};

std::vector<ClassDistributionRow> class_distribution(const CorpusIndex& corpus,
                                                     const AnnotatedCorpus& annotated);

struct ImbalanceRow {
    BarrierKind barrier{};
    Category category{};
    std::size_t max_count = 0;
    std::size_t min_count = 0;  // over the kind's legal classes; may be 0
    double ratio = 0.0;         // max/min; infinity encoded as "inf" in the CSV
};

std::vector<ImbalanceRow> imbalance_ratios(const std::vector<ClassDistributionRow>& rows);

void write_publisher_stats_csv(const std::vector<PublisherStatsRow>& rows, std::ostream& out);
void write_class_distribution_csv(const std::vector<ClassDistributionRow>& rows,
                                  std::ostream& out);
void write_imbalance_csv(const std::vector<ImbalanceRow>& rows, std::ostream& out);
void write_concept_overlap_csv(const ConceptOverlap& overlap, std::ostream& out);

/// Static grouped bar chart of one barrier's class counts per category.
void write_class_distribution_svg(BarrierKind barrier,
                                  const std::vector<ClassDistributionRow>& rows,
                                  std::ostream& out);
/// Simple 2- or 3-set Venn with region counts; larger group sets are not drawn.
void write_venn_svg(const ConceptOverlap& overlap, std::ostream& out);

}  // namespace barriers
