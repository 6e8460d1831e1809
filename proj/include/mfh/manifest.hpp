#pragma once

// Run manifests: the provenance record every emitted table points back to.
// A manifest plus a populated replay cache is sufficient to regenerate all
// downstream outputs byte-identically.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfh/errors.hpp"
#include "mfh/records.hpp"

namespace mfh {

struct FileRef {
    std::string path;  // relative to the run directory
    std::string digest;
};

struct RunManifest {
    std::string run_id;
    std::string created_at;
    std::string config_digest;

    std::string model;
    long long parameter_count = 0;
    double temperature = 0.0;
    int max_tokens = 64;

    FileRef prompts;
    std::vector<FileRef> scenario_files;
    std::optional<FileRef> annotations;
    std::map<std::string, FileRef> lexicons;  // keyed by lexicon id string

    std::vector<std::optional<std::string>> identities;
    std::vector<std::string> stances;
    std::vector<int> styles;

    std::map<std::string, std::string> emfd_columns;  // column mapping used at score time

    std::uint64_t sampling_seed = 0;
    std::uint64_t bootstrap_seed = 20177;
    std::size_t bootstrap_resamples = 10000;
    double ci_level = 0.95;

    std::map<std::string, std::size_t> exclusion_counts;  // filled by analyze
};

inline Json to_json(const FileRef& f) { return Json{{"path", f.path}, {"digest", f.digest}}; }

inline FileRef file_ref_from_json(const Json& j) {
    return {j.at("path").get<std::string>(), j.at("digest").get<std::string>()};
}

inline Json to_json(const RunManifest& m) {
    Json identities = Json::array();
    for (const auto& i : m.identities) identities.push_back(i ? Json(*i) : Json(nullptr));
    Json scenario_files = Json::array();
    for (const auto& f : m.scenario_files) scenario_files.push_back(to_json(f));
    Json lexicons = Json::object();
    for (const auto& [id, f] : m.lexicons) lexicons[id] = to_json(f);
    Json j{{"run_id", m.run_id},
           {"created_at", m.created_at},
           {"config_digest", m.config_digest},
           {"model", m.model},
           {"parameter_count", m.parameter_count},
           {"temperature", m.temperature},
           {"max_tokens", m.max_tokens},
           {"prompts", to_json(m.prompts)},
           {"scenario_files", scenario_files},
           {"annotations", m.annotations ? to_json(*m.annotations) : Json(nullptr)},
           {"lexicons", lexicons},
           {"identities", identities},
           {"stances", m.stances},
           {"styles", m.styles},
           {"emfd_columns", m.emfd_columns},
           {"sampling_seed", m.sampling_seed},
           {"bootstrap_seed", m.bootstrap_seed},
           {"bootstrap_resamples", m.bootstrap_resamples},
           {"ci_level", m.ci_level},
           {"exclusion_counts", m.exclusion_counts}};
    return j;
}

inline RunManifest manifest_from_json(const Json& j) {
    RunManifest m;
    m.run_id = j.at("run_id").get<std::string>();
    m.created_at = j.at("created_at").get<std::string>();
    m.config_digest = j.at("config_digest").get<std::string>();
    m.model = j.at("model").get<std::string>();
    m.parameter_count = j.at("parameter_count").get<long long>();
    m.temperature = j.at("temperature").get<double>();
    m.max_tokens = j.at("max_tokens").get<int>();
    m.prompts = file_ref_from_json(j.at("prompts"));
    for (const Json& f : j.at("scenario_files")) m.scenario_files.push_back(file_ref_from_json(f));
    if (!j.at("annotations").is_null()) m.annotations = file_ref_from_json(j.at("annotations"));
    for (auto it = j.at("lexicons").begin(); it != j.at("lexicons").end(); ++it) {
        m.lexicons[it.key()] = file_ref_from_json(it.value());
    }
    for (const Json& i : j.at("identities")) {
        m.identities.push_back(i.is_null() ? std::nullopt
                                           : std::optional<std::string>(i.get<std::string>()));
    }
    m.stances = j.at("stances").get<std::vector<std::string>>();
    m.styles = j.at("styles").get<std::vector<int>>();
    if (j.contains("emfd_columns")) {
        m.emfd_columns = j.at("emfd_columns").get<std::map<std::string, std::string>>();
    }
    m.sampling_seed = j.at("sampling_seed").get<std::uint64_t>();
    m.bootstrap_seed = j.at("bootstrap_seed").get<std::uint64_t>();
    m.bootstrap_resamples = j.at("bootstrap_resamples").get<std::size_t>();
    m.ci_level = j.at("ci_level").get<double>();
    m.exclusion_counts =
        j.at("exclusion_counts").get<std::map<std::string, std::size_t>>();
    return m;
}

inline void write_manifest(const std::filesystem::path& run_dir, const RunManifest& m) {
    write_file(run_dir / "manifest.json", to_json(m).dump(2) + "\n");
}

inline RunManifest read_manifest(const std::filesystem::path& run_dir) {
    auto path = run_dir / "manifest.json";
    if (!std::filesystem::exists(path)) {
        throw Error("no manifest at " + path.string() + "; run the complete stage first");
    }
    try {
        return manifest_from_json(Json::parse(slurp_file(path)));
    } catch (const Json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

}  // namespace mfh
