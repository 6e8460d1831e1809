#pragma once

// Scenario corpus construction: ingest the four source datasets from
// line-delimited records and apply the preprocessing filters that produce
// scenario sets and human annotation sets. All sampling is seeded and
// single-threaded so identical inputs yield identical outputs.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfh/digest.hpp"
#include "mfh/errors.hpp"
#include "mfh/foundations.hpp"
#include "mfh/lexicon.hpp"
#include "mfh/rng.hpp"

namespace mfh {

using Json = nlohmann::json;

enum class Source { MoralStories, EthicsCs, ScActions, ScSituations };

inline std::string_view to_string(Source s) {
    switch (s) {
        case Source::MoralStories: return "moral_stories";
        case Source::EthicsCs: return "ethics_cs";
        case Source::ScActions: return "sc_actions";
        case Source::ScSituations: return "sc_situations";
    }
    return "?";
}

inline std::optional<Source> parse_source(std::string_view s) {
    if (s == "moral_stories") return Source::MoralStories;
    if (s == "ethics_cs") return Source::EthicsCs;
    if (s == "sc_actions") return Source::ScActions;
    if (s == "sc_situations") return Source::ScSituations;
    return std::nullopt;
}

enum class ScenarioKind { Situation, Action };

inline std::string_view to_string(ScenarioKind k) {
    return k == ScenarioKind::Situation ? "situation" : "action";
}

enum class Stance { Moral, Immoral };

inline std::string_view to_string(Stance s) { return s == Stance::Moral ? "moral" : "immoral"; }

inline std::optional<Stance> parse_stance(std::string_view s) {
    if (s == "moral") return Stance::Moral;
    if (s == "immoral") return Stance::Immoral;
    return std::nullopt;
}

struct Scenario {
    std::string id;
    std::string text;
    Source source = Source::MoralStories;
    ScenarioKind kind = ScenarioKind::Situation;
    std::optional<Stance> acceptability;  // nullopt = unknown
    std::optional<Foundation> foundation_label;
};

inline void validate(const Scenario& s) {
    if (s.text.empty()) throw ValidationError("scenario " + s.id + " has empty text");
    if (s.source == Source::ScActions && (!s.foundation_label || !s.acceptability)) {
        throw ValidationError("sc_actions scenario " + s.id +
                              " must carry a foundation label and acceptability");
    }
}

// Human rationalizations for one scenario, used to estimate consensus
// foundation use. The corpus filter guarantees at least four RoTs.
struct HumanAnnotationSet {
    std::string scenario_id;
    std::vector<std::string> rot_texts;
    std::vector<std::optional<Stance>> judgements;  // per-RoT collapsed label
};

// ---------------------------------------------------------------------------
// Field mappings: the published column names differ per dataset, so each
// ingest operation takes a mapping from the logical fields it needs to the
// actual record fields. Defaults follow the published releases.

struct MoralStoriesFields {
    std::string id = "ID";
    std::string situation = "situation";
    std::string intent = "intent";
    std::string moral_action = "moral_action";
    std::string immoral_action = "immoral_action";
};

struct EthicsFields {
    std::string text = "input";
    std::string label = "label";
    std::string is_short = "is_short";
    std::string immoral_label_value = "1";
};

struct SocialChemFields {
    std::string situation_id = "situation-short-id";
    std::string situation_text = "situation";
    std::string rot_id = "rot-id";
    std::string rot_text = "rot";
    std::string rot_categories = "rot-categorization";
    std::string action_text = "action";
    std::string judgement = "action-moral-judgment";
    std::string foundations = "rot-moral-foundations";
    std::string action_count = "m";
    char list_delimiter = '|';
    std::string morality_category = "morality-ethics";
};

namespace detail {

inline std::string field_as_string(const Json& record, const std::string& field,
                                   std::size_t record_no) {
    if (!record.contains(field)) {
        throw ParseError("record is missing field '" + field + "'", record_no);
    }
    const Json& v = record.at(field);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_float()) return std::to_string(v.get<double>());
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_null()) return "";
    throw ParseError("field '" + field + "' has unsupported type", record_no);
}

inline std::optional<std::string> optional_field(const Json& record, const std::string& field,
                                                 std::size_t record_no) {
    if (!record.contains(field) || record.at(field).is_null()) return std::nullopt;
    std::string s = field_as_string(record, field, record_no);
    if (s.empty()) return std::nullopt;
    return s;
}

inline bool field_as_bool(const Json& record, const std::string& field, std::size_t record_no) {
    std::string s = field_as_string(record, field, record_no);
    for (char& c : s) c = ascii_lower(c);
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no" || s.empty()) return false;
    throw ParseError("field '" + field + "' is not a boolean: '" + s + "'", record_no);
}

// Five-level judgement scale, accepted both as text and as -2..2 integers.
enum class JudgementLevel { VeryBad, Bad, ExpectedOk, Good, VeryGood };

inline JudgementLevel parse_judgement(const std::string& raw, std::size_t record_no) {
    std::string key;
    for (char c : raw) {
        if (is_ascii_letter(c) || c == '-' || (c >= '0' && c <= '9')) key.push_back(ascii_lower(c));
    }
    if (key == "-2" || key == "verybad" || key == "very-bad") return JudgementLevel::VeryBad;
    if (key == "-1" || key == "bad") return JudgementLevel::Bad;
    if (key == "0" || key == "expectedok" || key == "expected-ok" || key == "ok" ||
        key == "expected") {
        return JudgementLevel::ExpectedOk;
    }
    if (key == "1" || key == "good") return JudgementLevel::Good;
    if (key == "2" || key == "verygood" || key == "very-good") return JudgementLevel::VeryGood;
    throw ParseError("unrecognized judgement '" + raw + "'", record_no);
}

// very bad / bad -> immoral, good / very good -> moral, expected/OK -> nullopt
inline std::optional<Stance> collapse_judgement(JudgementLevel level) {
    switch (level) {
        case JudgementLevel::VeryBad:
        case JudgementLevel::Bad: return Stance::Immoral;
        case JudgementLevel::ExpectedOk: return std::nullopt;
        case JudgementLevel::Good:
        case JudgementLevel::VeryGood: return Stance::Moral;
    }
    return std::nullopt;
}

inline std::vector<std::string> split_list(const std::string& raw, char delim) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : raw) {
        if (c == delim) {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

// Accepts dataset-style names ("care-harm") and canonical names
// ("care_harm") alike.
inline Foundation parse_loose_foundation(const std::string& raw, std::size_t record_no) {
    std::string key;
    for (char c : raw) {
        if (is_ascii_letter(c)) key.push_back(ascii_lower(c));
    }
    auto contains = [&key](std::string_view needle) {
        return key.find(needle) != std::string::npos;
    };
    if (contains("care") || contains("harm")) return Foundation::CareHarm;
    if (contains("fair") || contains("cheat")) return Foundation::FairnessCheating;
    if (contains("loyal") || contains("betray") || contains("ingroup")) {
        return Foundation::LoyaltyBetrayal;
    }
    if (contains("authority") || contains("subver")) return Foundation::AuthoritySubversion;
    if (contains("sanctity") || contains("purity") || contains("degrad")) {
        return Foundation::SanctityDegradation;
    }
    throw ParseError("unrecognized foundation label '" + raw + "'", record_no);
}

// Draws exactly n_per_stance of each stance uniformly without replacement.
// Sampled items keep their input order within each stance.
inline std::vector<Scenario> sample_balanced(std::vector<Scenario> moral,
                                             std::vector<Scenario> immoral,
                                             std::size_t n_per_stance, std::uint64_t seed,
                                             std::string_view dataset) {
    if (n_per_stance == 0) {
        throw ValidationError(std::string(dataset) + ": n_per_stance must be at least 1");
    }
    auto check = [&](const std::vector<Scenario>& pool, std::string_view stance) {
        if (pool.size() < n_per_stance) {
            throw ValidationError(std::string(dataset) + ": requested " +
                                  std::to_string(n_per_stance) + " " + std::string(stance) +
                                  " scenarios but only " + std::to_string(pool.size()) +
                                  " available");
        }
    };
    check(moral, "moral");
    check(immoral, "immoral");
    Rng rng(seed);
    std::vector<Scenario> out;
    out.reserve(2 * n_per_stance);
    for (auto* pool : {&moral, &immoral}) {
        for (std::size_t i : rng.sample_indices(pool->size(), n_per_stance)) {
            out.push_back(std::move((*pool)[i]));
        }
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Moral Stories: each record yields up to two scenarios, the concatenation of
// situation, intent, and one of the two actions. Norms and consequences are
// never included.
inline std::vector<Scenario> ingest_moral_stories(const std::vector<Json>& records,
                                                  std::size_t n_per_stance, std::uint64_t seed,
                                                  const MoralStoriesFields& fields = {}) {
    std::vector<Scenario> moral, immoral;
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::size_t record_no = i + 1;
        const Json& r = records[i];
        std::string base_id = detail::optional_field(r, fields.id, record_no)
                                  .value_or(std::to_string(record_no));
        std::string situation = detail::field_as_string(r, fields.situation, record_no);
        std::string intent = detail::field_as_string(r, fields.intent, record_no);
        auto add = [&](const std::string& field, Stance stance, std::vector<Scenario>& pool) {
            auto action = detail::optional_field(r, field, record_no);
            if (!action) return;
            Scenario s;
            s.id = "moral_stories:" + base_id + ":" + std::string(to_string(stance));
            s.text = situation + " " + intent + " " + *action;
            s.source = Source::MoralStories;
            s.kind = ScenarioKind::Situation;
            s.acceptability = stance;
            pool.push_back(std::move(s));
        };
        add(fields.moral_action, Stance::Moral, moral);
        add(fields.immoral_action, Stance::Immoral, immoral);
    }
    return detail::sample_balanced(std::move(moral), std::move(immoral), n_per_stance, seed,
                                   "moral_stories");
}

// ---------------------------------------------------------------------------
// ETHICS commonsense: keep only the short crowdworker examples, then sample
// n_per_stance per acceptability. Long Reddit examples are excluded.
inline std::vector<Scenario> ingest_ethics_commonsense(const std::vector<Json>& records,
                                                       std::size_t n_per_stance,
                                                       std::uint64_t seed,
                                                       const EthicsFields& fields = {}) {
    std::vector<Scenario> moral, immoral;
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::size_t record_no = i + 1;
        const Json& r = records[i];
        if (!detail::field_as_bool(r, fields.is_short, record_no)) continue;
        std::string label = detail::field_as_string(r, fields.label, record_no);
        Stance stance = label == fields.immoral_label_value ? Stance::Immoral : Stance::Moral;
        Scenario s;
        s.id = "ethics_cs:" + std::to_string(record_no);
        s.text = detail::field_as_string(r, fields.text, record_no);
        s.source = Source::EthicsCs;
        s.kind = ScenarioKind::Situation;
        s.acceptability = stance;
        (stance == Stance::Moral ? moral : immoral).push_back(std::move(s));
    }
    return detail::sample_balanced(std::move(moral), std::move(immoral), n_per_stance, seed,
                                   "ethics_cs");
}

// ---------------------------------------------------------------------------
// Social Chemistry shared parse: one input record per RoT breakdown.

namespace detail {

struct ScBreakdown {
    std::string situation_id;
    std::string situation_text;
    std::string rot_id;
    std::string rot_text;
    bool morality_ethics = false;
    std::string action_text;
    std::optional<Stance> collapsed_judgement;  // nullopt = expected/OK
    std::vector<Foundation> foundations;
    long action_count = 1;
};

inline std::vector<ScBreakdown> parse_social_chem(const std::vector<Json>& records,
                                                  const SocialChemFields& fields) {
    std::vector<ScBreakdown> out;
    out.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        std::size_t record_no = i + 1;
        const Json& r = records[i];
        ScBreakdown b;
        b.situation_id = field_as_string(r, fields.situation_id, record_no);
        b.situation_text = field_as_string(r, fields.situation_text, record_no);
        b.rot_id = field_as_string(r, fields.rot_id, record_no);
        b.rot_text = field_as_string(r, fields.rot_text, record_no);
        std::string cats = field_as_string(r, fields.rot_categories, record_no);
        for (const std::string& c : split_list(cats, fields.list_delimiter)) {
            if (c == fields.morality_category) b.morality_ethics = true;
        }
        b.action_text = field_as_string(r, fields.action_text, record_no);
        b.collapsed_judgement = collapse_judgement(
            parse_judgement(field_as_string(r, fields.judgement, record_no), record_no));
        for (const std::string& f :
             split_list(field_as_string(r, fields.foundations, record_no), fields.list_delimiter)) {
            b.foundations.push_back(parse_loose_foundation(f, record_no));
        }
        std::string count = field_as_string(r, fields.action_count, record_no);
        try {
            b.action_count = count.empty() ? 1 : std::stol(count);
        } catch (const std::exception&) {
            throw ParseError("field '" + fields.action_count + "' is not an integer: '" + count +
                                 "'",
                             record_no);
        }
        out.push_back(std::move(b));
    }
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Social Chemistry Actions: morality-ethics RoTs over unanimously
// single-action situations, actions with unanimous foundation label and
// unanimous collapsed acceptability, balanced per (foundation, stance) cell
// by seeded downsampling to the minimum cell count.
inline std::vector<Scenario> ingest_social_chem_actions(const std::vector<Json>& records,
                                                        std::uint64_t seed = 0,
                                                        const SocialChemFields& fields = {}) {
    auto breakdowns = detail::parse_social_chem(records, fields);

    // morality-ethics RoTs only
    std::erase_if(breakdowns, [](const detail::ScBreakdown& b) { return !b.morality_ethics; });

    // situations unanimously annotated as single-action
    std::map<std::string, bool> single_action;
    for (const auto& b : breakdowns) {
        auto [it, inserted] = single_action.try_emplace(b.situation_id, b.action_count == 1);
        if (!inserted) it->second = it->second && b.action_count == 1;
    }
    std::erase_if(breakdowns,
                  [&](const detail::ScBreakdown& b) { return !single_action.at(b.situation_id); });

    // per-action unanimity on foundation label and collapsed acceptability;
    // expected/OK breakdowns are discarded before the unanimity checks
    struct ActionGroup {
        std::string text;
        std::vector<Foundation> labels;
        std::vector<Stance> stances;
        bool multi_label = false;  // some annotator tagged more than one foundation
    };
    std::map<std::pair<std::string, std::string>, ActionGroup> actions;
    for (const auto& b : breakdowns) {
        if (!b.collapsed_judgement) continue;
        ActionGroup& g = actions[{b.situation_id, b.action_text}];
        g.text = b.action_text;
        if (b.foundations.size() == 1) {
            g.labels.push_back(b.foundations[0]);
        } else {
            g.multi_label = true;  // a single salient foundation is required
        }
        g.stances.push_back(*b.collapsed_judgement);
    }

    std::map<std::pair<Foundation, Stance>, std::vector<Scenario>> cells;
    for (const auto& [key, g] : actions) {
        if (g.multi_label || g.labels.empty()) continue;
        bool unanimous_label =
            std::all_of(g.labels.begin(), g.labels.end(), [&](Foundation f) { return f == g.labels[0]; });
        bool unanimous_stance =
            std::all_of(g.stances.begin(), g.stances.end(), [&](Stance s) { return s == g.stances[0]; });
        if (!unanimous_label || !unanimous_stance) continue;
        Scenario s;
        s.id = "sc_actions:" + content_digest(key.first + "\x1f" + key.second, 16);
        s.text = g.text;
        s.source = Source::ScActions;
        s.kind = ScenarioKind::Action;
        s.acceptability = g.stances[0];
        s.foundation_label = g.labels[0];
        cells[{g.labels[0], g.stances[0]}].push_back(std::move(s));
    }

    std::vector<std::string> empty_cells;
    std::size_t min_count = SIZE_MAX;
    for (Foundation f : all_foundations()) {
        for (Stance st : {Stance::Moral, Stance::Immoral}) {
            auto it = cells.find({f, st});
            std::size_t n = it == cells.end() ? 0 : it->second.size();
            if (n == 0) {
                empty_cells.push_back(std::string(to_string(f)) + "/" + std::string(to_string(st)));
            }
            min_count = std::min(min_count, n);
        }
    }
    if (!empty_cells.empty()) {
        std::string msg = "sc_actions: empty (foundation, acceptability) cells:";
        for (const auto& c : empty_cells) msg += " " + c;
        throw ValidationError(msg);
    }

    Rng rng(seed);
    std::vector<Scenario> out;
    for (Foundation f : all_foundations()) {
        for (Stance st : {Stance::Moral, Stance::Immoral}) {
            auto& cell = cells.at({f, st});
            for (std::size_t i : rng.sample_indices(cell.size(), min_count)) {
                out.push_back(std::move(cell[i]));
            }
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Social Chemistry Situations: situations with at least four RoTs that each
// have at least four breakdowns. Scenario acceptability is the majority of
// the per-RoT collapsed judgements; ties exclude the scenario. This corpus
// is not foundationally balanced by design.
inline std::vector<std::pair<Scenario, HumanAnnotationSet>> ingest_social_chem_situations(
    const std::vector<Json>& records, const SocialChemFields& fields = {}) {
    auto breakdowns = detail::parse_social_chem(records, fields);

    struct RotGroup {
        std::string text;
        std::size_t n_breakdowns = 0;
        std::size_t moral_votes = 0;
        std::size_t immoral_votes = 0;
    };
    struct SituationGroup {
        std::string text;
        std::map<std::string, RotGroup> rots;  // keyed by rot id, insertion-stable via map order
    };
    std::map<std::string, SituationGroup> situations;
    for (const auto& b : breakdowns) {
        SituationGroup& sg = situations[b.situation_id];
        sg.text = b.situation_text;
        RotGroup& rg = sg.rots[b.rot_id];
        rg.text = b.rot_text;
        ++rg.n_breakdowns;
        if (b.collapsed_judgement == Stance::Moral) ++rg.moral_votes;
        if (b.collapsed_judgement == Stance::Immoral) ++rg.immoral_votes;
    }

    std::vector<std::pair<Scenario, HumanAnnotationSet>> out;
    for (const auto& [sid, sg] : situations) {
        HumanAnnotationSet annotations;
        annotations.scenario_id = "sc_situations:" + sid;
        std::size_t scenario_moral = 0, scenario_immoral = 0;
        for (const auto& [rot_id, rg] : sg.rots) {
            if (rg.n_breakdowns < 4) continue;  // usable RoTs need >= 4 breakdowns
            std::optional<Stance> rot_label;
            if (rg.moral_votes > rg.immoral_votes) rot_label = Stance::Moral;
            if (rg.immoral_votes > rg.moral_votes) rot_label = Stance::Immoral;
            annotations.rot_texts.push_back(rg.text);
            annotations.judgements.push_back(rot_label);
            if (rot_label == Stance::Moral) ++scenario_moral;
            if (rot_label == Stance::Immoral) ++scenario_immoral;
        }
        if (annotations.rot_texts.size() < 4) continue;
        if (scenario_moral == scenario_immoral) continue;  // tie: no majority acceptability
        Scenario s;
        s.id = annotations.scenario_id;
        s.text = sg.text;
        s.source = Source::ScSituations;
        s.kind = ScenarioKind::Situation;
        s.acceptability = scenario_moral > scenario_immoral ? Stance::Moral : Stance::Immoral;
        out.emplace_back(std::move(s), std::move(annotations));
    }
    return out;
}

}  // namespace mfh
