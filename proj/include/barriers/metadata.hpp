#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace barriers {

inline constexpr std::size_t kCulturalDims = 6;   // Hofstede national culture dimensions
inline constexpr std::size_t kEconomicDims = 12;  // prosperity index pillar scores

struct CountryProfile {
    std::string country_code;  // ISO 3166-1 alpha-2
    std::array<double, kCulturalDims> hofstede{};
    std::array<double, kEconomicDims> prosperity{};
    double latitude = 0.0;
    double longitude = 0.0;
};

struct Publisher {
    std::string publisher_id;  // source domain, e.g. "usatoday.com"
    std::string name;
    std::string headquarters_country;                 // ISO country code
    std::optional<std::string> political_alignment;   // normalized; absent when unknown
    std::string publishing_language;                  // IETF tag
};

using CountryProfiles = std::map<std::string, CountryProfile, std::less<>>;
using PublisherRegistry = std::map<std::string, Publisher, std::less<>>;

struct CountryLoad {
    CountryProfiles profiles;
    std::vector<std::string> warnings;
};

struct PublisherLoad {
    PublisherRegistry registry;
    std::vector<std::string> warnings;
};

/// countries.csv: header country_code,h1..h6,p1..p12,lat,lon. Duplicate codes:
/// last row wins with a warning. Non-numeric cells or out-of-range lat/lon
/// skip the row with a warning; a missing required column is fatal.
CountryLoad load_country_profiles(const std::string& path);

/// publishers.csv: header publisher_id,name,country_code,political_alignment,
/// publishing_language. Blank alignment loads as absent. Publishers whose
/// country has no profile are loaded but flagged in warnings.
PublisherLoad load_publisher_registry(const std::string& path,
                                      const CountryProfiles& known_countries);

/// Lower-cases, trims, and collapses runs of spaces/underscores/hyphens to a
/// single hyphen. Blank input -> absent.
std::optional<std::string> normalize_alignment(std::string_view raw);

/// Per-dimension min-max scaling over the loaded country set; a dimension
/// with max == min maps to 0 everywhere.
struct NormalizedProfiles {
    std::array<std::pair<double, double>, kCulturalDims> cultural_range{};
    std::array<std::pair<double, double>, kEconomicDims> economic_range{};
    std::map<std::string, std::array<double, kCulturalDims>, std::less<>> cultural;
    std::map<std::string, std::array<double, kEconomicDims>, std::less<>> economic;
};

NormalizedProfiles normalize_profiles(const CountryProfiles& profiles);

/// Exact, case-sensitive key lookup; nullptr when absent.
const Publisher* lookup_publisher(const PublisherRegistry& registry, std::string_view publisher_id);

/// The whole knowledge base, built once and then shared read-only.
struct MetadataKb {
    CountryProfiles countries;
    PublisherRegistry publishers;
    NormalizedProfiles normalized;
    std::vector<std::string> warnings;
};

MetadataKb load_metadata_kb(const std::string& countries_path, const std::string& publishers_path);

}  // namespace barriers
