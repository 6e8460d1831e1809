#pragma once

// Prompt rendering: the embedded template table (five styles, two stances,
// two scenario kinds) and the Cartesian prompt-set builder.

#include <optional>
#include <string>
#include <unordered_set>
#include <vector>

#include "mfh/corpus.hpp"
#include "mfh/digest.hpp"
#include "mfh/errors.hpp"

namespace mfh {

inline constexpr int kTemplateTableVersion = 1;
inline constexpr int kMinStyle = 1;
inline constexpr int kMaxStyle = 5;

struct PromptTemplate {
    int style;  // 1..5
    Stance stance;
    ScenarioKind kind;
    std::string pattern;  // contains the identity slot and one scenario-or-action slot
};

namespace detail {

inline constexpr std::string_view kIdentitySlot = "[POLITICAL_IDENTITY_PHRASE]";
inline constexpr std::string_view kIdentityClause = "As a/an [POLITICAL_IDENTITY_PHRASE], ";
inline constexpr std::string_view kScenarioSlot = "[SCENARIO]";
inline constexpr std::string_view kActionSlot = "[ACTION]";

// Style-indexed phrasing shared by both tables. Style 1/immoral keeps the
// original published wording verbatim, missing "do" included; the flag
// switches to the corrected form.
inline std::string style_phrase(int style, Stance stance, bool fix_style1_typo) {
    bool moral = stance == Stance::Moral;
    switch (style) {
        case 1:
            if (moral) return "is a moral thing to do because";
            return fix_style1_typo ? "is an immoral thing to do because"
                                   : "is an immoral thing to because";
        case 2:
            return moral ? "is a moral thing to do:" : "is an immoral thing to do:";
        case 3:
            return moral ? "is acceptable behavior:" : "is unacceptable behavior:";
        case 4:
            return moral ? "is a good thing to do:" : "is a bad thing to do:";
        case 5:
            return moral ? "is the right thing to do:" : "is the wrong thing to do:";
        default:
            throw ValidationError("prompt style must be in [1,5], got " + std::to_string(style));
    }
}

}  // namespace detail

inline PromptTemplate prompt_template(int style, Stance stance, ScenarioKind kind,
                                      bool fix_style1_typo = false) {
    std::string phrase = detail::style_phrase(style, stance, fix_style1_typo);
    std::string lead_in;
    if (style == 2) lead_in = "here are the moral arguments for why ";
    else if (style >= 3) lead_in = "here's why ";

    std::string pattern;
    if (kind == ScenarioKind::Situation) {
        pattern = std::string(detail::kScenarioSlot) + " " + std::string(detail::kIdentityClause) +
                  lead_in + "this " + phrase;
    } else {
        pattern = std::string(detail::kIdentityClause) + lead_in +
                  std::string(detail::kActionSlot) + " " + phrase;
    }
    return PromptTemplate{style, stance, kind, std::move(pattern)};
}

inline std::vector<PromptTemplate> all_templates(bool fix_style1_typo = false) {
    std::vector<PromptTemplate> out;
    for (ScenarioKind kind : {ScenarioKind::Situation, ScenarioKind::Action}) {
        for (int style = kMinStyle; style <= kMaxStyle; ++style) {
            for (Stance stance : {Stance::Moral, Stance::Immoral}) {
                out.push_back(prompt_template(style, stance, kind, fix_style1_typo));
            }
        }
    }
    return out;
}

// "a" or "an" by the leading vowel letter of the identity phrase. A letter
// heuristic, not a sound heuristic; deterministic by construction.
inline std::string_view indefinite_article(std::string_view identity) {
    if (identity.empty()) return "a";
    char c = detail::ascii_lower(identity.front());
    return (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') ? "an" : "a";
}

// Renders one prompt. A nullopt identity renders the identity-free variant:
// the "As a/an ...," clause is removed and the clause that followed it is
// capitalized.
inline std::string render(const PromptTemplate& tpl, const Scenario& scenario,
                          const std::optional<std::string>& identity, Stance stance) {
    if (tpl.kind != scenario.kind) {
        throw ValidationError("template kind " + std::string(to_string(tpl.kind)) +
                              " does not match scenario kind " +
                              std::string(to_string(scenario.kind)) + " for " + scenario.id);
    }
    if (tpl.stance != stance) {
        throw ValidationError("template stance does not match requested stance");
    }
    if (identity && identity->empty()) throw ValidationError("identity phrase must be non-empty");

    std::string work = tpl.pattern;
    bool capitalize_clause = false;
    std::size_t clause_pos = 0;
    if (identity) {
        const std::string slot = "a/an " + std::string(detail::kIdentitySlot);
        std::size_t pos = work.find(slot);
        work.replace(pos, slot.size(), std::string(indefinite_article(*identity)) + " " + *identity);
    } else {
        std::size_t pos = work.find(detail::kIdentityClause);
        work.erase(pos, detail::kIdentityClause.size());
        capitalize_clause = true;
        clause_pos = pos;
    }

    std::string_view slot =
        tpl.kind == ScenarioKind::Situation ? detail::kScenarioSlot : detail::kActionSlot;
    std::size_t slot_pos = work.find(slot);
    work.replace(slot_pos, slot.size(), scenario.text);

    if (capitalize_clause) {
        if (slot_pos < clause_pos) clause_pos += scenario.text.size() - slot.size();
        if (clause_pos < work.size() && detail::is_ascii_letter(work[clause_pos])) {
            work[clause_pos] = static_cast<char>(work[clause_pos] - 'a' + 'A');
        }
    }
    return work;
}

struct PromptRecord {
    std::string prompt_id;  // content digest of the rendered text
    std::string scenario_id;
    std::optional<std::string> identity;  // nullopt = identity-free
    Stance stance = Stance::Moral;
    int style = 2;
    std::string rendered_text;
};

inline std::string prompt_id_for(std::string_view rendered_text) {
    return content_digest(rendered_text);
}

// Full Cartesian product over scenarios x identities x stances x styles,
// deduplicated by prompt id, in deterministic (scenario, identity, stance,
// style) order. Identical rendered texts collide intentionally.
inline std::vector<PromptRecord> build_prompt_set(
    const std::vector<Scenario>& scenarios,
    const std::vector<std::optional<std::string>>& identities, const std::vector<Stance>& stances,
    const std::vector<int>& styles, bool fix_style1_typo = false) {
    if (scenarios.empty() || identities.empty() || stances.empty() || styles.empty()) {
        throw ValidationError("build_prompt_set requires non-empty scenario, identity, stance, "
                              "and style lists");
    }
    std::vector<PromptRecord> out;
    out.reserve(scenarios.size() * identities.size() * stances.size() * styles.size());
    std::unordered_set<std::string> seen;
    for (const Scenario& scenario : scenarios) {
        for (const auto& identity : identities) {
            for (Stance stance : stances) {
                for (int style : styles) {
                    PromptTemplate tpl =
                        prompt_template(style, stance, scenario.kind, fix_style1_typo);
                    PromptRecord rec;
                    rec.scenario_id = scenario.id;
                    rec.identity = identity;
                    rec.stance = stance;
                    rec.style = style;
                    rec.rendered_text = render(tpl, scenario, identity, stance);
                    rec.prompt_id = prompt_id_for(rec.rendered_text);
                    if (seen.insert(rec.prompt_id).second) out.push_back(std::move(rec));
                }
            }
        }
    }
    return out;
}

}  // namespace mfh
