#include "barriers/metadata.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>

#include "barriers/errors.hpp"
#include "barriers/io_util.hpp"

namespace barriers {

namespace {

std::optional<double> parse_double(std::string_view text) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        return std::nullopt;
    }
    return value;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open file: " + path);
    }
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        lines.push_back(line);
    }
    if (in.bad()) {
        throw IoError("read failure: " + path);
    }
    return lines;
}

// Maps required column names to their positions; extra columns are tolerated.
std::vector<std::size_t> resolve_columns(const std::vector<std::string>& header,
                                         const std::vector<std::string>& required,
                                         const std::string& path) {
    std::vector<std::size_t> positions;
    positions.reserve(required.size());
    for (const std::string& name : required) {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            throw ConfigError("missing required column '" + name + "' in " + path);
        }
        positions.push_back(static_cast<std::size_t>(it - header.begin()));
    }
    return positions;
}

}  // namespace

CountryLoad load_country_profiles(const std::string& path) {
    const auto lines = read_lines(path);
    if (lines.empty()) {
        throw ConfigError("empty country profile file: " + path);
    }

    std::vector<std::string> required = {"country_code"};
    for (std::size_t i = 1; i <= kCulturalDims; ++i) {
        required.push_back("h" + std::to_string(i));
    }
    for (std::size_t i = 1; i <= kEconomicDims; ++i) {
        required.push_back("p" + std::to_string(i));
    }
    required.push_back("lat");
    required.push_back("lon");

    const auto header = csv_split(lines[0]);
    const auto cols = resolve_columns(header, required, path);

    CountryLoad out;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        if (lines[n].empty()) {
            continue;
        }
        const auto fields = csv_split(lines[n]);
        const std::string where = path + ":" + std::to_string(n + 1);
        if (fields.size() != header.size()) {
            out.warnings.push_back(where + ": wrong field count, row skipped");
            continue;
        }
        CountryProfile profile;
        profile.country_code = fields[cols[0]];
        if (profile.country_code.empty()) {
            out.warnings.push_back(where + ": empty country_code, row skipped");
            continue;
        }
        bool ok = true;
        const auto numeric = [&](std::size_t req_index) -> double {
            const auto v = parse_double(fields[cols[req_index]]);
            if (!v) {
                ok = false;
                return 0.0;
            }
            return *v;
        };
        for (std::size_t i = 0; i < kCulturalDims && ok; ++i) {
            profile.hofstede[i] = numeric(1 + i);
        }
        for (std::size_t i = 0; i < kEconomicDims && ok; ++i) {
            profile.prosperity[i] = numeric(1 + kCulturalDims + i);
        }
        if (ok) {
            profile.latitude = numeric(1 + kCulturalDims + kEconomicDims);
            profile.longitude = numeric(2 + kCulturalDims + kEconomicDims);
        }
        if (!ok) {
            out.warnings.push_back(where + ": non-numeric cell, row skipped");
            continue;
        }
        if (profile.latitude < -90.0 || profile.latitude > 90.0 || profile.longitude < -180.0 ||
            profile.longitude > 180.0) {
            out.warnings.push_back(where + ": latitude/longitude out of range, row skipped");
            continue;
        }
        if (out.profiles.contains(profile.country_code)) {
            out.warnings.push_back(where + ": duplicate country_code '" + profile.country_code +
                                   "', last row wins");
        }
        out.profiles[profile.country_code] = std::move(profile);
    }
    return out;
}

std::optional<std::string> normalize_alignment(std::string_view raw) {
    std::string result;
    bool pending_sep = false;
    for (char c : raw) {
        const auto uc = static_cast<unsigned char>(c);
        if (c == ' ' || c == '\t' || c == '_' || c == '-') {
            pending_sep = !result.empty();
            continue;
        }
        if (pending_sep) {
            result.push_back('-');
            pending_sep = false;
        }
        result.push_back(static_cast<char>(std::tolower(uc)));
    }
    if (result.empty()) {
        return std::nullopt;
    }
    return result;
}

PublisherLoad load_publisher_registry(const std::string& path,
                                      const CountryProfiles& known_countries) {
    const auto lines = read_lines(path);
    if (lines.empty()) {
        throw ConfigError("empty publisher registry file: " + path);
    }
    const std::vector<std::string> required = {"publisher_id", "name", "country_code",
                                               "political_alignment", "publishing_language"};
    const auto header = csv_split(lines[0]);
    const auto cols = resolve_columns(header, required, path);

    PublisherLoad out;
    for (std::size_t n = 1; n < lines.size(); ++n) {
        if (lines[n].empty()) {
            continue;
        }
        const auto fields = csv_split(lines[n]);
        const std::string where = path + ":" + std::to_string(n + 1);
        if (fields.size() != header.size()) {
            out.warnings.push_back(where + ": wrong field count, row skipped");
            continue;
        }
        Publisher p;
        p.publisher_id = fields[cols[0]];
        p.name = fields[cols[1]];
        p.headquarters_country = fields[cols[2]];
        p.political_alignment = normalize_alignment(fields[cols[3]]);
        p.publishing_language = fields[cols[4]];
        if (p.publisher_id.empty()) {
            out.warnings.push_back(where + ": empty publisher_id, row skipped");
            continue;
        }
        if (p.headquarters_country.empty()) {
            out.warnings.push_back(where + ": empty country_code, row skipped");
            continue;
        }
        if (!known_countries.contains(p.headquarters_country)) {
            out.warnings.push_back(where + ": publisher '" + p.publisher_id + "' country '" +
                                   p.headquarters_country + "' has no profile");
        }
        if (out.registry.contains(p.publisher_id)) {
            out.warnings.push_back(where + ": duplicate publisher_id '" + p.publisher_id +
                                   "', last row wins");
        }
        out.registry[p.publisher_id] = std::move(p);
    }
    return out;
}

namespace {

template <std::size_t N>
void scale_dimension(const CountryProfiles& profiles,
                     const std::array<double, N> CountryProfile::*member,
                     std::array<std::pair<double, double>, N>& ranges,
                     std::map<std::string, std::array<double, N>, std::less<>>& out) {
    for (std::size_t d = 0; d < N; ++d) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (const auto& [code, profile] : profiles) {
            lo = std::min(lo, (profile.*member)[d]);
            hi = std::max(hi, (profile.*member)[d]);
        }
        ranges[d] = {lo, hi};
    }
    for (const auto& [code, profile] : profiles) {
        std::array<double, N> scaled{};
        for (std::size_t d = 0; d < N; ++d) {
            const auto [lo, hi] = ranges[d];
            scaled[d] = hi == lo ? 0.0 : ((profile.*member)[d] - lo) / (hi - lo);
        }
        out.emplace(code, scaled);
    }
}

}  // namespace

NormalizedProfiles normalize_profiles(const CountryProfiles& profiles) {
    if (profiles.empty()) {
        throw ConfigError("cannot normalize an empty country profile set");
    }
    NormalizedProfiles out;
    scale_dimension(profiles, &CountryProfile::hofstede, out.cultural_range, out.cultural);
    scale_dimension(profiles, &CountryProfile::prosperity, out.economic_range, out.economic);
    return out;
}

const Publisher* lookup_publisher(const PublisherRegistry& registry,
                                  std::string_view publisher_id) {
    const auto it = registry.find(publisher_id);
    return it == registry.end() ? nullptr : &it->second;
}

MetadataKb load_metadata_kb(const std::string& countries_path, const std::string& publishers_path) {
    MetadataKb kb;
    auto countries = load_country_profiles(countries_path);
    kb.countries = std::move(countries.profiles);
    kb.warnings = std::move(countries.warnings);
    auto publishers = load_publisher_registry(publishers_path, kb.countries);
    kb.publishers = std::move(publishers.registry);
    kb.warnings.insert(kb.warnings.end(), publishers.warnings.begin(), publishers.warnings.end());
    kb.normalized = normalize_profiles(kb.countries);
    return kb;
}

}  // namespace barriers
