#pragma once

// Report assembly and JSON serialization shared by the epv subcommands.

#include <ep/apartment.hpp>
#include <ep/cyclotomic.hpp>
#include <ep/harish_chandra.hpp>
#include <ep/rational.hpp>

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace epv {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSchema = "ep-report/1";

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    std::string command;
    std::string type = "C2";
    std::vector<int> q;
    std::optional<int> radius;
    int rho = 1;
    int r = 1;
    long cap = 0;
    std::string format = "json";
    std::uint64_t seed = 1;
    std::vector<std::string> groups;
    std::string mode = "depth-r";
    std::vector<int> probe;
    int l = 2;
    std::string pairs;
    std::string svg;
    std::string out;
    int sector = 0;
    long threshold = -1;
    bool elements = false;

    int radius_or(int fallback) const { return radius.value_or(fallback); }
};

inline Json to_json(const ep::IntVec& v) {
    Json a = Json::array();
    for (long x : v) a.push_back(x);
    return a;
}

inline Json to_json(const std::vector<int>& v) {
    Json a = Json::array();
    for (int x : v) a.push_back(x);
    return a;
}

inline Json to_json(const ep::Rational& x) { return ep::to_string(x); }

inline Json to_json(const ep::Cyclotomic& c) {
    Json coeffs = Json::array();
    for (const auto& s : c.to_strings()) coeffs.push_back(s);
    return Json{{"conductor", c.conductor()}, {"coefficients", coeffs}};
}

inline Json to_json(const ep::AffineRoot& a) { return Json{{"gradient", to_json(a.gradient)}, {"level", a.level}}; }

// Vertices in coweight coordinates, as exact rationals.
inline Json vertices_json(const std::vector<ep::IntVec>& verts, long scale) {
    Json out = Json::array();
    for (const auto& v : verts) {
        Json p = Json::array();
        for (long x : v) p.push_back(ep::to_string(ep::ratio(x, scale)));
        out.push_back(p);
    }
    return out;
}

inline Json chamber_json(const ep::Apartment& apt, const ep::Chamber& c) {
    return Json{{"key", to_json(c.key)}, {"vertices", vertices_json(c.vertices, apt.scale())}};
}

class Report {
public:
    void check(std::string identity, std::string instance, bool holds) {
        checks_.push_back({std::move(identity), std::move(instance), holds});
    }
    void append(const ep::VerificationReport& rep) {
        for (const auto& c : rep.checks) check(c.identity, rep.group + ": " + c.instance, c.holds);
    }
    // Merge another report's checks, prefixing the identity with a section name.
    void absorb(const std::string& section, const Report& other) {
        for (const auto& c : other.checks_) check(section + ": " + c.identity, c.instance, c.holds);
        results[section] = other.results;
    }

    bool all_hold() const {
        for (const auto& c : checks_)
            if (!c.holds) return false;
        return true;
    }
    std::size_t failures() const {
        std::size_t n = 0;
        for (const auto& c : checks_) n += !c.holds;
        return n;
    }

    Json to_json(const Json& config) const {
        Json checks = Json::array();
        for (const auto& c : checks_)
            checks.push_back(Json{{"identity", c.identity}, {"instance", c.instance}, {"exact-zero", c.holds}});
        Json doc;
        doc["schema"] = kSchema;
        doc["command"] = config.value("command", "");
        doc["config"] = config;
        doc["results"] = results;
        doc["checks"] = checks;
        doc["summary"] = Json{{"checks", checks_.size()}, {"failed", failures()}, {"all_hold", all_hold()}};
        return doc;
    }

    Json results = Json::object();

private:
    struct Entry {
        std::string identity, instance;
        bool holds;
    };
    std::vector<Entry> checks_;
};

}  // namespace epv
