#pragma once

// Line-delimited record files: generic JSONL helpers plus the canonical
// serializations for scenarios, annotation sets, and prompt records.

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfh/corpus.hpp"
#include "mfh/errors.hpp"
#include "mfh/prompting.hpp"

namespace mfh {

inline std::string slurp_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_file(const std::filesystem::path& path, std::string_view contents) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path.string());
    out << contents;
    out.flush();
    if (!out) throw Error("write failed: " + path.string());
}

inline std::vector<Json> read_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open file: " + path.string());
    std::vector<Json> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            records.push_back(Json::parse(line));
        } catch (const Json::parse_error& e) {
            throw ParseError(path.string() + ": " + e.what(), line_no);
        }
    }
    return records;
}

inline void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& records) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write file: " + path.string());
    for (const Json& r : records) out << r.dump() << '\n';
    out.flush();
    if (!out) throw Error("write failed: " + path.string());
}

// --- scenarios --------------------------------------------------------------

inline Json to_json(const Scenario& s) {
    Json j{{"id", s.id},
           {"text", s.text},
           {"source", to_string(s.source)},
           {"kind", to_string(s.kind)},
           {"acceptability", s.acceptability ? Json(to_string(*s.acceptability)) : Json("unknown")}};
    j["foundation_label"] =
        s.foundation_label ? Json(to_string(*s.foundation_label)) : Json(nullptr);
    return j;
}

inline Scenario scenario_from_json(const Json& j) {
    Scenario s;
    s.id = j.at("id").get<std::string>();
    s.text = j.at("text").get<std::string>();
    auto source = parse_source(j.at("source").get<std::string>());
    if (!source) throw ValidationError("unknown scenario source: " + j.at("source").dump());
    s.source = *source;
    s.kind = j.at("kind").get<std::string>() == "action" ? ScenarioKind::Action
                                                         : ScenarioKind::Situation;
    s.acceptability = parse_stance(j.at("acceptability").get<std::string>());
    if (j.contains("foundation_label") && !j.at("foundation_label").is_null()) {
        s.foundation_label = foundation_from_string(j.at("foundation_label").get<std::string>());
    }
    validate(s);
    return s;
}

inline void write_scenarios(const std::filesystem::path& path, const std::vector<Scenario>& list) {
    std::vector<Json> rows;
    rows.reserve(list.size());
    for (const Scenario& s : list) rows.push_back(to_json(s));
    write_jsonl(path, rows);
}

inline std::vector<Scenario> read_scenarios(const std::filesystem::path& path) {
    std::vector<Scenario> out;
    for (const Json& j : read_jsonl(path)) out.push_back(scenario_from_json(j));
    return out;
}

// --- human annotation sets ---------------------------------------------------

inline Json to_json(const HumanAnnotationSet& a) {
    Json judgements = Json::array();
    for (const auto& j : a.judgements) {
        judgements.push_back(j ? Json(to_string(*j)) : Json(nullptr));
    }
    return Json{{"scenario_id", a.scenario_id},
                {"rot_texts", a.rot_texts},
                {"judgements", judgements}};
}

inline HumanAnnotationSet annotation_set_from_json(const Json& j) {
    HumanAnnotationSet a;
    a.scenario_id = j.at("scenario_id").get<std::string>();
    a.rot_texts = j.at("rot_texts").get<std::vector<std::string>>();
    for (const Json& v : j.at("judgements")) {
        a.judgements.push_back(v.is_null() ? std::nullopt
                                           : parse_stance(v.get<std::string>()));
    }
    return a;
}

inline void write_annotation_sets(const std::filesystem::path& path,
                                  const std::vector<HumanAnnotationSet>& list) {
    std::vector<Json> rows;
    rows.reserve(list.size());
    for (const auto& a : list) rows.push_back(to_json(a));
    write_jsonl(path, rows);
}

inline std::vector<HumanAnnotationSet> read_annotation_sets(const std::filesystem::path& path) {
    std::vector<HumanAnnotationSet> out;
    for (const Json& j : read_jsonl(path)) out.push_back(annotation_set_from_json(j));
    return out;
}

// --- prompt records -----------------------------------------------------------

inline Json to_json(const PromptRecord& p) {
    return Json{{"prompt_id", p.prompt_id},
                {"scenario_id", p.scenario_id},
                {"identity", p.identity ? Json(*p.identity) : Json(nullptr)},
                {"stance", to_string(p.stance)},
                {"style", p.style},
                {"rendered_text", p.rendered_text}};
}

inline PromptRecord prompt_from_json(const Json& j) {
    PromptRecord p;
    p.prompt_id = j.at("prompt_id").get<std::string>();
    p.scenario_id = j.at("scenario_id").get<std::string>();
    if (!j.at("identity").is_null()) p.identity = j.at("identity").get<std::string>();
    auto stance = parse_stance(j.at("stance").get<std::string>());
    if (!stance) throw ValidationError("unknown stance in prompt record: " + j.dump());
    p.stance = *stance;
    p.style = j.at("style").get<int>();
    p.rendered_text = j.at("rendered_text").get<std::string>();
    return p;
}

inline void write_prompts(const std::filesystem::path& path, const std::vector<PromptRecord>& list) {
    std::vector<Json> rows;
    rows.reserve(list.size());
    for (const auto& p : list) rows.push_back(to_json(p));
    write_jsonl(path, rows);
}

inline std::vector<PromptRecord> read_prompts(const std::filesystem::path& path) {
    std::vector<PromptRecord> out;
    for (const Json& j : read_jsonl(path)) out.push_back(prompt_from_json(j));
    return out;
}

}  // namespace mfh
