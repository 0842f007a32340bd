#pragma once

#include <cstdint>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ensemble.hpp"
#include "gf.hpp"
#include "modulation.hpp"

namespace gfldpc {

using json = nlohmann::json;

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// unknown keys are rejected so config typos fail loudly
inline void require_keys(const json& obj, const std::vector<std::string>& allowed, const std::string& context) {
    if (!obj.is_object()) throw ConfigError(context + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const std::string& a : allowed)
            if (key == a) ok = true;
        if (!ok) throw ConfigError(context + ": unknown key '" + key + "'");
    }
}

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

// ---- Tanner graph + coset, versioned schema -------------------------------

inline json graph_to_json(const TannerGraph& g, const std::vector<int>& coset) {
    json edges = json::array();
    for (const auto& e : g.edges) edges.push_back({e.var, e.check, e.label});
    return json{{"version", 1}, {"q", g.q},         {"N", g.num_vars}, {"M", g.num_checks},
                {"edges", edges}, {"coset", coset}};
}

inline void graph_from_json(const json& j, TannerGraph& g, std::vector<int>& coset) {
    require_keys(j, {"version", "q", "N", "M", "edges", "coset"}, "graph");
    if (j.at("version").get<int>() != 1) throw ConfigError("graph: unsupported version");
    g = TannerGraph{};
    g.q = j.at("q").get<int>();
    g.num_vars = j.at("N").get<int>();
    g.num_checks = j.at("M").get<int>();
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 3) throw ConfigError("graph: edge entries are [var, check, label]");
        TannerGraph::Edge edge{e[0].get<int>(), e[1].get<int>(), e[2].get<int>()};
        if (edge.var < 0 || edge.var >= g.num_vars || edge.check < 0 || edge.check >= g.num_checks ||
            edge.label < 1 || edge.label >= g.q)
            throw ConfigError("graph: edge out of range");
        g.edges.push_back(edge);
    }
    g.finalize();
    coset = j.at("coset").get<std::vector<int>>();
    if (static_cast<int>(coset.size()) != g.num_vars) throw ConfigError("graph: coset length mismatch");
    for (int c : coset)
        if (c < 0 || c >= g.q) throw ConfigError("graph: coset symbol out of range");
}

// ---- mappings and channels --------------------------------------------------

inline json mapping_to_json(const Mapping& m) {
    if (m.is_signal()) return json{{"points", m.points}};
    return json{{"symbols", m.symbols}};
}

inline ChannelModel dmc_from_json(const json& j) {
    require_keys(j, {"transition"}, "dmc");
    return ChannelModel::dmc(j.at("transition").get<std::vector<std::vector<double>>>());
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

// ---- CSV with a metadata header --------------------------------------------

class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& meta) : out_(path) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
        out_ << "# " << meta << "\n";
    }

    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
        out_ << "\n";
    }

    template <typename... Ts>
    void row(const Ts&... vals) {
        bool first = true;
        ((out_ << (first ? "" : ","), first = false, write(vals)), ...);
        out_ << "\n";
    }

  private:
    void write(double v) {
        std::ostringstream ss;
        ss.precision(12);
        ss << v;
        out_ << ss.str();
    }
    void write(int v) { out_ << v; }
    void write(long v) { out_ << v; }
    void write(long long v) { out_ << v; }
    void write(std::uint64_t v) { out_ << v; }
    void write(const std::string& v) { out_ << v; }
    void write(const char* v) { out_ << v; }

    std::ofstream out_;
};

}  // namespace gfldpc
