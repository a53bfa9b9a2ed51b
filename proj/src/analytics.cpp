#include "barriers/analytics.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "barriers/io_util.hpp"

namespace barriers {

std::vector<PublisherStatsRow> publisher_stats(const CorpusIndex& corpus,
                                               const AnnotatedCorpus& annotated) {
    struct Cell {
        std::map<std::string, std::size_t> articles_per_publisher;
        std::map<std::string, std::size_t> events_per_publisher;
    };
    std::map<std::pair<BarrierKind, Category>, Cell> cells;
    for (const Event& event : corpus.events()) {
        const auto it = annotated.events.find(event.event_id);
        if (it == annotated.events.end()) {
            continue;
        }
        for (BarrierKind kind : all_barriers()) {
            if (!it->second.label(kind)) {
                continue;
            }
            Cell& cell = cells[{kind, event.category}];
            std::set<std::string> event_publishers;
            for (std::size_t row : event.article_rows) {
                const std::string& publisher = corpus.articles()[row].publisher_id;
                ++cell.articles_per_publisher[publisher];
                event_publishers.insert(publisher);
            }
            for (const std::string& publisher : event_publishers) {
                ++cell.events_per_publisher[publisher];
            }
        }
    }
    std::vector<PublisherStatsRow> rows;
    for (BarrierKind kind : all_barriers()) {
        for (Category category : all_categories()) {
            const auto it = cells.find({kind, category});
            PublisherStatsRow row;
            row.barrier = kind;
            row.category = category;
            if (it != cells.end()) {
                const Cell& cell = it->second;
                row.publishers = cell.articles_per_publisher.size();
                std::size_t articles = 0, events = 0;
                for (const auto& [publisher, count] : cell.articles_per_publisher) {
                    articles += count;
                }
                for (const auto& [publisher, count] : cell.events_per_publisher) {
                    events += count;
                }
                row.avg_articles_per_publisher =
                    static_cast<double>(articles) / static_cast<double>(row.publishers);
                row.avg_events_per_publisher =
                    static_cast<double>(events) / static_cast<double>(row.publishers);
            }
            rows.push_back(row);
        }
    }
    return rows;
}

ConceptOverlap concept_overlap(
    const std::vector<std::pair<std::string, std::set<std::string>>>& groups) {
    if (groups.size() < 2) {
        throw std::invalid_argument("concept_overlap needs at least two groups");
    }
    ConceptOverlap overlap;
    for (const auto& [name, concepts] : groups) {
        overlap.group_names.push_back(name);
        overlap.sizes.push_back(concepts.size());
    }
    overlap.pairwise.assign(groups.size(), std::vector<std::size_t>(groups.size(), 0));
    for (std::size_t i = 0; i < groups.size(); ++i) {
        for (std::size_t j = i + 1; j < groups.size(); ++j) {
            std::size_t count = 0;
            for (const std::string& uri : groups[i].second) {
                count += groups[j].second.contains(uri);
            }
            overlap.pairwise[i][j] = count;
            overlap.pairwise[j][i] = count;
        }
    }
    std::size_t full = 0;
    for (const std::string& uri : groups[0].second) {
        bool everywhere = true;
        for (std::size_t g = 1; g < groups.size() && everywhere; ++g) {
            everywhere = groups[g].second.contains(uri);
        }
        full += everywhere;
    }
    overlap.full_intersection = full;
    return overlap;
}

std::vector<std::pair<std::string, std::set<std::string>>> concept_groups_by_barrier(
    const CorpusIndex& corpus, const AnnotatedCorpus& annotated) {
    std::vector<std::pair<std::string, std::set<std::string>>> groups;
    for (BarrierKind kind : all_barriers()) {
        std::set<std::string> concepts;
        for (const Event& event : corpus.events()) {
            const auto it = annotated.events.find(event.event_id);
            if (it == annotated.events.end() || !it->second.label(kind)) {
                continue;
            }
            for (std::size_t row : event.article_rows) {
                const auto& article_concepts = corpus.articles()[row].concepts;
                concepts.insert(article_concepts.begin(), article_concepts.end());
            }
        }
        groups.emplace_back(std::string(to_string(kind)), std::move(concepts));
    }
    return groups;
}

std::vector<std::pair<std::string, std::set<std::string>>> concept_groups_by_category(
    const CorpusIndex& corpus) {
    std::vector<std::pair<std::string, std::set<std::string>>> groups;
    for (Category category : all_categories()) {
        std::set<std::string> concepts;
        for (std::size_t event_row : corpus.events_by_category(category)) {
            for (std::size_t row : corpus.events()[event_row].article_rows) {
                const auto& article_concepts = corpus.articles()[row].concepts;
                concepts.insert(article_concepts.begin(), article_concepts.end());
            }
        }
        groups.emplace_back(std::string(to_string(category)), std::move(concepts));
    }
    return groups;
}

std::vector<ClassDistributionRow> class_distribution(const CorpusIndex& corpus,
                                                     const AnnotatedCorpus& annotated) {
    std::map<std::tuple<BarrierKind, Category, BarrierClass>, std::size_t> counts;
    for (const Event& event : corpus.events()) {
        const auto it = annotated.events.find(event.event_id);
        if (it == annotated.events.end()) {
            continue;
        }
        for (BarrierKind kind : all_barriers()) {
            const auto label = it->second.label(kind);
            if (label) {
                ++counts[{kind, event.category, *label}];
            }
        }
    }
    std::vector<ClassDistributionRow> rows;
    for (BarrierKind kind : all_barriers()) {
        for (Category category : all_categories()) {
            for (BarrierClass cls : legal_classes(kind)) {
                const auto it = counts.find({kind, category, cls});
                if (it != counts.end()) {
                    rows.push_back({kind, category, cls, it->second});
                }
            }
        }
    }
    return rows;
}

std::vector<ImbalanceRow> imbalance_ratios(const std::vector<ClassDistributionRow>& rows) {
    std::map<std::pair<BarrierKind, Category>, std::map<BarrierClass, std::size_t>> cells;
    for (const ClassDistributionRow& row : rows) {
        cells[{row.barrier, row.category}][row.cls] = row.count;
    }
    std::vector<ImbalanceRow> out;
    for (const auto& [key, by_class] : cells) {
        ImbalanceRow row;
        row.barrier = key.first;
        row.category = key.second;
        std::size_t max_count = 0;
        std::size_t min_count = std::numeric_limits<std::size_t>::max();
        for (BarrierClass cls : legal_classes(key.first)) {
            const auto it = by_class.find(cls);
            const std::size_t count = it == by_class.end() ? 0 : it->second;
            max_count = std::max(max_count, count);
            min_count = std::min(min_count, count);
        }
        row.max_count = max_count;
        row.min_count = min_count;
        row.ratio = min_count == 0 ? std::numeric_limits<double>::infinity()
                                   : static_cast<double>(max_count) / static_cast<double>(min_count);
        out.push_back(row);
    }
    return out;
}

void write_publisher_stats_csv(const std::vector<PublisherStatsRow>& rows, std::ostream& out) {
    out << "barrier,category,publishers,avg_articles_per_publisher,avg_events_per_publisher\n";
    for (const PublisherStatsRow& row : rows) {
        out << to_string(row.barrier) << ',' << to_string(row.category) << ',' << row.publishers
            << ',' << format_fixed(row.avg_articles_per_publisher, 6) << ','
            << format_fixed(row.avg_events_per_publisher, 6) << '\n';
    }
}

void write_class_distribution_csv(const std::vector<ClassDistributionRow>& rows,
                                  std::ostream& out) {
    out << "barrier,category,class,events\n";
    for (const ClassDistributionRow& row : rows) {
        out << to_string(row.barrier) << ',' << to_string(row.category) << ','
            << to_string(row.cls) << ',' << row.count << '\n';
    }
}

void write_imbalance_csv(const std::vector<ImbalanceRow>& rows, std::ostream& out) {
    out << "barrier,category,max_class_events,min_class_events,imbalance_ratio\n";
    for (const ImbalanceRow& row : rows) {
        out << to_string(row.barrier) << ',' << to_string(row.category) << ',' << row.max_count
            << ',' << row.min_count << ',';
        if (row.min_count == 0) {
            out << "inf";
        } else {
            out << format_fixed(row.ratio, 6);
        }
        out << '\n';
    }
}

void write_concept_overlap_csv(const ConceptOverlap& overlap, std::ostream& out) {
    out << "kind,group_a,group_b,count\n";
    for (std::size_t g = 0; g < overlap.group_names.size(); ++g) {
        out << "size," << overlap.group_names[g] << ",," << overlap.sizes[g] << '\n';
    }
    for (std::size_t i = 0; i < overlap.group_names.size(); ++i) {
        for (std::size_t j = i + 1; j < overlap.group_names.size(); ++j) {
            out << "pair," << overlap.group_names[i] << ',' << overlap.group_names[j] << ','
                << overlap.pairwise[i][j] << '\n';
        }
    }
    out << "full,,," << overlap.full_intersection << '\n';
}

namespace {

constexpr std::array<std::string_view, 3> kBarColors = {"#4477aa", "#ee6677", "#66aa55"};

}  // namespace

void write_class_distribution_svg(BarrierKind barrier,
                                  const std::vector<ClassDistributionRow>& rows,
                                  std::ostream& out) {
    const auto& classes = legal_classes(barrier);
    std::map<std::pair<Category, BarrierClass>, std::size_t> counts;
    std::size_t max_count = 1;
    for (const ClassDistributionRow& row : rows) {
        if (row.barrier != barrier) {
            continue;
        }
        counts[{row.category, row.cls}] = row.count;
        max_count = std::max(max_count, row.count);
    }
    const int width = 980, height = 320, base = 280, left = 40;
    const int group_width = (width - left - 20) / kCategoryCount;
    const int bar_width = std::max(4, group_width / (static_cast<int>(classes.size()) + 1));
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    out << "<text x=\"10\" y=\"20\" font-size=\"14\">" << to_string(barrier)
        << " barrier: labeled events per class</text>\n";
    for (int c = 0; c < kCategoryCount; ++c) {
        const Category category = static_cast<Category>(c);
        const int gx = left + c * group_width;
        for (std::size_t k = 0; k < classes.size(); ++k) {
            const auto it = counts.find({category, classes[k]});
            const std::size_t count = it == counts.end() ? 0 : it->second;
            const int h =
                static_cast<int>(220.0 * static_cast<double>(count) / static_cast<double>(max_count));
            const int x = gx + static_cast<int>(k) * bar_width;
            out << "<rect x=\"" << x << "\" y=\"" << base - h << "\" width=\"" << bar_width - 2
                << "\" height=\"" << h << "\" fill=\"" << kBarColors[k % kBarColors.size()]
                << "\"><title>" << to_string(category) << " / " << to_string(classes[k]) << ": "
                << count << "</title></rect>\n";
        }
        out << "<text x=\"" << gx << "\" y=\"" << base + 16 << "\" font-size=\"9\">"
            << to_string(category) << "</text>\n";
    }
    for (std::size_t k = 0; k < classes.size(); ++k) {
        out << "<rect x=\"" << left + static_cast<int>(k) * 220 << "\" y=\"300\" width=\"10\" "
            << "height=\"10\" fill=\"" << kBarColors[k % kBarColors.size()] << "\"/>\n"
            << "<text x=\"" << left + static_cast<int>(k) * 220 + 14
            << "\" y=\"309\" font-size=\"10\">" << to_string(classes[k]) << "</text>\n";
    }
    out << "</svg>\n";
}

void write_venn_svg(const ConceptOverlap& overlap, std::ostream& out) {
    const std::size_t n = overlap.group_names.size();
    if (n != 2 && n != 3) {
        throw std::invalid_argument("venn rendering supports exactly 2 or 3 groups");
    }
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"420\" height=\"360\">\n";
    const char* fills[3] = {"#4477aa", "#ee6677", "#66aa55"};
    struct Pos {
        int x, y;
    };
    const Pos centers2[2] = {{150, 170}, {260, 170}};
    const Pos centers3[3] = {{150, 140}, {260, 140}, {205, 230}};
    const Pos* centers = n == 2 ? centers2 : centers3;
    for (std::size_t g = 0; g < n; ++g) {
        out << "<circle cx=\"" << centers[g].x << "\" cy=\"" << centers[g].y
            << "\" r=\"95\" fill=\"" << fills[g] << "\" fill-opacity=\"0.35\" stroke=\"#333\"/>\n";
        out << "<text x=\"" << centers[g].x - 30 << "\" y=\"" << centers[g].y - 100
            << "\" font-size=\"12\">" << overlap.group_names[g] << " (" << overlap.sizes[g]
            << ")</text>\n";
    }
    int y = 320;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            out << "<text x=\"10\" y=\"" << y << "\" font-size=\"11\">|"
                << overlap.group_names[i] << " &#8745; " << overlap.group_names[j]
                << "| = " << overlap.pairwise[i][j] << "</text>\n";
            y += 14;
        }
    }
    if (n == 3) {
        out << "<text x=\"250\" y=\"320\" font-size=\"11\">|all| = " << overlap.full_intersection
            << "</text>\n";
    }
    out << "</svg>\n";
}

}  // namespace barriers
