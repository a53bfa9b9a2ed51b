#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"

#include "barriers/errors.hpp"
#include "barriers/metadata.hpp"
#include "barriers/rng.hpp"

using namespace barriers;

namespace {

const char* kCountryHeader =
    "country_code,h1,h2,h3,h4,h5,h6,p1,p2,p3,p4,p5,p6,p7,p8,p9,p10,p11,p12,lat,lon";

std::string country_row(const std::string& code, double base) {
    std::string row = code;
    for (int i = 0; i < 18; ++i) {
        row += "," + std::to_string(base + i);
    }
    return row + ",10.0,20.0";
}

std::filesystem::path write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << content;
    return path;
}

}  // namespace

TEST_CASE("country profiles load one row per country") {
    const auto path = write_temp("kb_two_rows.csv", std::string(kCountryHeader) + "\n" +
                                                        country_row("US", 10) + "\n" +
                                                        country_row("DE", 20) + "\n");
    const CountryLoad load = load_country_profiles(path.string());
    CHECK(load.profiles.size() == 2);
    CHECK(load.warnings.empty());
    CHECK(load.profiles.at("US").hofstede[0] == doctest::Approx(10.0));
    CHECK(load.profiles.at("US").prosperity[11] == doctest::Approx(27.0));
}

TEST_CASE("wrong arity and non-numeric rows are skipped with warnings") {
    const auto path = write_temp(
        "kb_bad_rows.csv", std::string(kCountryHeader) + "\nUS,1,2,3,4,5,6,7,8,9,10.0,20.0\n" +
                               country_row("DE", 20) + "\n" +
                               "FR,a,2,3,4,5,6,1,2,3,4,5,6,7,8,9,10,11,12,10.0,20.0\n");
    const CountryLoad load = load_country_profiles(path.string());
    CHECK(load.profiles.size() == 1);
    CHECK(load.profiles.contains("DE"));
    CHECK(load.warnings.size() == 2);
}

TEST_CASE("duplicate country codes: last row wins, counted once") {
    const auto path = write_temp("kb_dup.csv", std::string(kCountryHeader) + "\n" +
                                                   country_row("US", 10) + "\n" +
                                                   country_row("US", 50) + "\n");
    const CountryLoad load = load_country_profiles(path.string());
    CHECK(load.profiles.size() == 1);
    CHECK(load.profiles.at("US").hofstede[0] == doctest::Approx(50.0));
    REQUIRE(load.warnings.size() == 1);
    CHECK(load.warnings[0].find("duplicate") != std::string::npos);
}

TEST_CASE("missing required column is fatal; bad latitude skips the row") {
    const auto no_col = write_temp("kb_nocol.csv", "country_code,h1,h2\nUS,1,2\n");
    CHECK_THROWS_AS(load_country_profiles(no_col.string()), ConfigError);

    std::string bad_lat = country_row("US", 10);
    bad_lat.replace(bad_lat.rfind("10.0,20.0"), 9, "95.0,20.0");
    const auto path =
        write_temp("kb_badlat.csv", std::string(kCountryHeader) + "\n" + bad_lat + "\n");
    const CountryLoad load = load_country_profiles(path.string());
    CHECK(load.profiles.empty());
    CHECK(load.warnings.size() == 1);
}

TEST_CASE("publisher registry basics") {
    const auto countries = write_temp("kb_pub_countries.csv", std::string(kCountryHeader) + "\n" +
                                                                  country_row("US", 10) + "\n");
    const CountryLoad cl = load_country_profiles(countries.string());

    SUBCASE("usatoday.com maps to US") {
        const auto path = write_temp(
            "kb_pub.csv",
            "publisher_id,name,country_code,political_alignment,publishing_language\n"
            "usatoday.com,USA Today,US,Centre Right,en\n");
        const PublisherLoad load = load_publisher_registry(path.string(), cl.profiles);
        REQUIRE(load.registry.contains("usatoday.com"));
        const Publisher& p = load.registry.at("usatoday.com");
        CHECK(p.headquarters_country == "US");
        CHECK(p.political_alignment == "centre-right");  // normalized
        CHECK(load.warnings.empty());
    }

    SUBCASE("empty registry file gives an empty map") {
        const auto path = write_temp(
            "kb_pub_empty.csv",
            "publisher_id,name,country_code,political_alignment,publishing_language\n");
        CHECK(load_publisher_registry(path.string(), cl.profiles).registry.empty());
    }

    SUBCASE("blank alignment loads as absent, not empty string") {
        const auto path = write_temp(
            "kb_pub_blank.csv",
            "publisher_id,name,country_code,political_alignment,publishing_language\n"
            "example.com,Example,US,,en\n");
        const PublisherLoad load = load_publisher_registry(path.string(), cl.profiles);
        CHECK_FALSE(load.registry.at("example.com").political_alignment.has_value());
    }

    SUBCASE("publisher with unprofiled country is loaded but flagged") {
        const auto path = write_temp(
            "kb_pub_nocountry.csv",
            "publisher_id,name,country_code,political_alignment,publishing_language\n"
            "somewhere.xx,Somewhere,XX,centre,en\n");
        const PublisherLoad load = load_publisher_registry(path.string(), cl.profiles);
        CHECK(load.registry.contains("somewhere.xx"));
        REQUIRE(load.warnings.size() == 1);
        CHECK(load.warnings[0].find("no profile") != std::string::npos);
    }
}

TEST_CASE("alignment normalization rules") {
    CHECK(normalize_alignment("Centre Left") == "centre-left");
    CHECK(normalize_alignment("  RIGHT__wing  ") == "right-wing");
    CHECK(normalize_alignment("centre - right") == "centre-right");
    CHECK_FALSE(normalize_alignment("").has_value());
    CHECK_FALSE(normalize_alignment("   ").has_value());
}

TEST_CASE("lookup is exact and case-sensitive") {
    PublisherRegistry registry;
    registry["usatoday.com"] = {"usatoday.com", "USA Today", "US", std::nullopt, "en"};
    CHECK(lookup_publisher(registry, "usatoday.com") != nullptr);
    CHECK(lookup_publisher(registry, "USAToday.com") == nullptr);
    CHECK(lookup_publisher(registry, "unknown.com") == nullptr);
}

namespace {

CountryProfiles make_profiles(const std::vector<std::pair<std::string, double>>& h1_values) {
    CountryProfiles profiles;
    for (const auto& [code, h1] : h1_values) {
        CountryProfile p;
        p.country_code = code;
        p.hofstede = {h1, 10, 10, 10, 10, 10};
        p.prosperity = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12};
        profiles[code] = p;
    }
    return profiles;
}

}  // namespace

TEST_CASE("normalization examples") {
    SUBCASE("single country maps every dimension to zero") {
        const auto norm = normalize_profiles(make_profiles({{"US", 42}}));
        for (double v : norm.cultural.at("US")) {
            CHECK(v == 0.0);
        }
        for (double v : norm.economic.at("US")) {
            CHECK(v == 0.0);
        }
    }
    SUBCASE("two countries at 20 and 80 scale to 0 and 1") {
        const auto norm = normalize_profiles(make_profiles({{"A", 20}, {"B", 80}}));
        CHECK(norm.cultural.at("A")[0] == doctest::Approx(0.0));
        CHECK(norm.cultural.at("B")[0] == doctest::Approx(1.0));
    }
    SUBCASE("three countries 10/40/70 scale to 0, 0.5, 1") {
        const auto norm = normalize_profiles(make_profiles({{"A", 10}, {"B", 40}, {"C", 70}}));
        CHECK(norm.cultural.at("A")[0] == doctest::Approx(0.0));
        CHECK(norm.cultural.at("B")[0] == doctest::Approx(0.5));
        CHECK(norm.cultural.at("C")[0] == doctest::Approx(1.0));
    }
    SUBCASE("empty profile set is fatal") {
        CHECK_THROWS_AS(normalize_profiles({}), ConfigError);
    }
}

TEST_CASE("normalization is idempotent and order-preserving") {
    Rng rng(20240817);
    CountryProfiles profiles;
    for (int c = 0; c < 12; ++c) {
        CountryProfile p;
        p.country_code = "C" + std::to_string(c);
        for (auto& v : p.hofstede) {
            v = rng.next_unit() * 100.0;
        }
        for (auto& v : p.prosperity) {
            v = rng.next_unit() * 100.0;
        }
        profiles[p.country_code] = p;
    }
    const auto norm = normalize_profiles(profiles);

    // Idempotence: feed the normalized values back through.
    CountryProfiles renorm_input;
    for (const auto& [code, profile] : profiles) {
        CountryProfile p = profile;
        std::copy(norm.cultural.at(code).begin(), norm.cultural.at(code).end(),
                  p.hofstede.begin());
        std::copy(norm.economic.at(code).begin(), norm.economic.at(code).end(),
                  p.prosperity.begin());
        renorm_input[code] = p;
    }
    const auto renorm = normalize_profiles(renorm_input);
    for (const auto& [code, vec] : renorm.cultural) {
        for (std::size_t d = 0; d < vec.size(); ++d) {
            CHECK(std::abs(vec[d] - norm.cultural.at(code)[d]) < 1e-12);
        }
    }

    // Monotonicity: raw ordering per dimension is preserved.
    for (std::size_t d = 0; d < kCulturalDims; ++d) {
        for (const auto& [code_a, pa] : profiles) {
            for (const auto& [code_b, pb] : profiles) {
                if (pa.hofstede[d] < pb.hofstede[d]) {
                    CHECK(norm.cultural.at(code_a)[d] <= norm.cultural.at(code_b)[d]);
                }
            }
        }
    }

    // Every component within [0,1]; each dimension attains 0 and 1.
    for (std::size_t d = 0; d < kCulturalDims; ++d) {
        double lo = 1.0, hi = 0.0;
        for (const auto& [code, vec] : norm.cultural) {
            CHECK(vec[d] >= 0.0);
            CHECK(vec[d] <= 1.0);
            lo = std::min(lo, vec[d]);
            hi = std::max(hi, vec[d]);
        }
        CHECK(lo == doctest::Approx(0.0));
        CHECK(hi == doctest::Approx(1.0));
    }
}
