#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "seqseed/errors.hpp"
#include "seqseed/experiment.hpp"
#include "seqseed/generators.hpp"
#include "seqseed/graph.hpp"
#include "seqseed/ranking.hpp"
#include "seqseed/strategies.hpp"

namespace seqseed {

/**
 * Grid configuration, JSON:
 *
 *   {
 *     "graphs": [
 *       {"name": "ba1000", "type": "ba", "n": 1000, "m": 3, "seed": 1},
 *       {"name": "er1000", "type": "er", "n": 1000, "p": 0.006, "seed": 2},
 *       {"name": "karate", "type": "file", "path": "karate.txt"}
 *     ],
 *     "pp": [0.05, 0.1],
 *     "sp": [0.01, 0.05],
 *     "rankings": ["RANDOM", "DEGREE", "D2", "PR", "EV"],
 *     "strategies": [{"kind": "SQ_kPS_R", "k": 1}, {"kind": "SQ_TSN"}, "SQ_2PS"],
 *     "replications": 100,
 *     "master_seed": 20170101
 *   }
 *
 * "replications" and "master_seed" are optional. File paths are resolved
 * against `base_dir`. Errors name the offending JSON path.
 */
inline GridSpec parse_grid_config(const nlohmann::json& doc,
                                  const std::filesystem::path& base_dir = {})
{
    using nlohmann::json;
    auto fail = [](const std::string& path, const std::string& what) {
        return ParseError("grid config " + path + ": " + what);
    };
    auto field = [&](const json& obj, const std::string& path, const char* key) -> const json& {
        if (!obj.is_object()) throw fail(path, "expected an object");
        const auto it = obj.find(key);
        if (it == obj.end()) throw fail(path + "." + key, "missing");
        return *it;
    };
    auto array = [&](const json& obj, const std::string& path, const char* key) -> const json& {
        const json& a = field(obj, path, key);
        if (!a.is_array()) throw fail(path + "." + key, "expected an array");
        return a;
    };
    auto unsigned_at = [&](const json& v, const std::string& path) -> std::uint64_t {
        if (!v.is_number_unsigned()) throw fail(path, "expected a non-negative integer");
        return v.get<std::uint64_t>();
    };
    auto number_at = [&](const json& v, const std::string& path) -> double {
        if (!v.is_number()) throw fail(path, "expected a number");
        return v.get<double>();
    };

    if (!doc.is_object()) throw fail("$", "expected an object");
    GridSpec spec;

    const json& graphs = array(doc, "$", "graphs");
    for (std::size_t i = 0; i < graphs.size(); ++i) {
        const std::string path = "$.graphs[" + std::to_string(i) + "]";
        const json& g = graphs[i];
        const json& type = field(g, path, "type");
        if (!type.is_string()) throw fail(path + ".type", "expected a string");
        const auto kind = type.get<std::string>();

        NamedGraph named;
        if (g.contains("name")) {
            if (!g["name"].is_string()) throw fail(path + ".name", "expected a string");
            named.name = g["name"].get<std::string>();
        } else {
            named.name = kind + std::to_string(i);
        }
        if (named.name.find(',') != std::string::npos) throw fail(path + ".name", "must not contain ','");

        try {
            if (kind == "ba" || kind == "er") {
                const auto n = unsigned_at(field(g, path, "n"), path + ".n");
                const auto seed = g.contains("seed") ? unsigned_at(g["seed"], path + ".seed") : 1;
                RandomStream rng(seed);
                if (kind == "ba") {
                    const auto m = unsigned_at(field(g, path, "m"), path + ".m");
                    named.graph = std::make_shared<Graph>(generate_ba(n, m, rng));
                } else {
                    const double p = number_at(field(g, path, "p"), path + ".p");
                    named.graph = std::make_shared<Graph>(generate_er(n, p, rng));
                }
            } else if (kind == "file") {
                const json& p = field(g, path, "path");
                if (!p.is_string()) throw fail(path + ".path", "expected a string");
                std::filesystem::path file = p.get<std::string>();
                if (file.is_relative() && !base_dir.empty()) file = base_dir / file;
                std::ifstream in(file);
                if (!in) throw fail(path + ".path", "cannot open " + file.string());
                named.graph = std::make_shared<Graph>(load_edge_list(in).graph);
            } else {
                throw fail(path + ".type", "unknown graph type '" + kind + "' (ba, er, file)");
            }
        } catch (const ParameterError& e) {
            throw fail(path, e.what());
        } catch (const ParseError& e) {
            const std::string what = e.what();
            if (what.rfind("grid config", 0) == 0) throw;
            throw fail(path, what);
        }
        for (const auto& other : spec.graphs)
            if (other.name == named.name) throw fail(path + ".name", "duplicate graph name");
        spec.graphs.push_back(std::move(named));
    }

    const json& pp = array(doc, "$", "pp");
    for (std::size_t i = 0; i < pp.size(); ++i) {
        const std::string path = "$.pp[" + std::to_string(i) + "]";
        const double v = number_at(pp[i], path);
        if (!(v >= 0.0 && v <= 1.0)) throw fail(path, "must lie in [0, 1]");
        spec.pp_values.push_back(v);
    }
    const json& sp = array(doc, "$", "sp");
    for (std::size_t i = 0; i < sp.size(); ++i) {
        const std::string path = "$.sp[" + std::to_string(i) + "]";
        const double v = number_at(sp[i], path);
        if (!(v > 0.0 && v <= 1.0)) throw fail(path, "must lie in (0, 1]");
        spec.sp_values.push_back(v);
    }
    const json& rankings = array(doc, "$", "rankings");
    for (std::size_t i = 0; i < rankings.size(); ++i) {
        const std::string path = "$.rankings[" + std::to_string(i) + "]";
        if (!rankings[i].is_string()) throw fail(path, "expected a string");
        const auto m = parse_ranking_method(rankings[i].get<std::string>());
        if (!m) throw fail(path, "unknown ranking '" + rankings[i].get<std::string>() + "'");
        spec.rankings.push_back(*m);
    }
    const json& strategies = array(doc, "$", "strategies");
    for (std::size_t i = 0; i < strategies.size(); ++i) {
        const std::string path = "$.strategies[" + std::to_string(i) + "]";
        const json& s = strategies[i];
        try {
            if (s.is_string()) {
                spec.strategies.push_back(parse_strategy(s.get<std::string>()));
                continue;
            }
            const json& kind = field(s, path, "kind");
            if (!kind.is_string()) throw fail(path + ".kind", "expected a string");
            std::optional<std::size_t> k, t_sn;
            if (s.contains("k")) k = unsigned_at(s["k"], path + ".k");
            if (s.contains("t_sn")) t_sn = unsigned_at(s["t_sn"], path + ".t_sn");
            spec.strategies.push_back(parse_strategy(kind.get<std::string>(), k, t_sn));
        } catch (const ParameterError& e) {
            throw fail(path, e.what());
        }
    }

    if (doc.contains("replications"))
        spec.replications = unsigned_at(doc["replications"], "$.replications");
    if (doc.contains("master_seed"))
        spec.master_seed = unsigned_at(doc["master_seed"], "$.master_seed");

    try {
        spec.validate();
    } catch (const ParameterError& e) {
        throw fail("$", e.what());
    }
    return spec;
}

inline GridSpec load_grid_config(const std::filesystem::path& file)
{
    std::ifstream in(file);
    if (!in) throw ParseError("cannot open grid config " + file.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError("grid config " + file.string() + ": " + e.what());
    }
    return parse_grid_config(doc, file.parent_path());
}

}  // namespace seqseed
