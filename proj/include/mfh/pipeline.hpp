#pragma once

// Stage orchestration behind the CLI subcommands. Each stage reads and
// writes files under a run directory laid out as
//   runs/<run_id>/{manifest.json, inputs/, completions.jsonl, estimates/,
//                  tables/, plots/}
// so that a manifest plus the completion cache reproduces everything
// downstream.

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mfh/analysis.hpp"
#include "mfh/config.hpp"
#include "mfh/corpus.hpp"
#include "mfh/gateway.hpp"
#include "mfh/lexicon.hpp"
#include "mfh/manifest.hpp"
#include "mfh/prompting.hpp"
#include "mfh/records.hpp"
#include "mfh/report.hpp"

namespace mfh::pipeline {

namespace fs = std::filesystem;

// --- config-driven field mappings -------------------------------------------

inline MoralStoriesFields moral_stories_fields(const Config& cfg) {
    MoralStoriesFields f;
    f.id = cfg.get_or("fields.moral_stories", "id", f.id);
    f.situation = cfg.get_or("fields.moral_stories", "situation", f.situation);
    f.intent = cfg.get_or("fields.moral_stories", "intent", f.intent);
    f.moral_action = cfg.get_or("fields.moral_stories", "moral_action", f.moral_action);
    f.immoral_action = cfg.get_or("fields.moral_stories", "immoral_action", f.immoral_action);
    return f;
}

inline EthicsFields ethics_fields(const Config& cfg) {
    EthicsFields f;
    f.text = cfg.get_or("fields.ethics_cs", "text", f.text);
    f.label = cfg.get_or("fields.ethics_cs", "label", f.label);
    f.is_short = cfg.get_or("fields.ethics_cs", "is_short", f.is_short);
    f.immoral_label_value =
        cfg.get_or("fields.ethics_cs", "immoral_label_value", f.immoral_label_value);
    return f;
}

inline SocialChemFields social_chem_fields(const Config& cfg) {
    SocialChemFields f;
    f.situation_id = cfg.get_or("fields.social_chem", "situation_id", f.situation_id);
    f.situation_text = cfg.get_or("fields.social_chem", "situation_text", f.situation_text);
    f.rot_id = cfg.get_or("fields.social_chem", "rot_id", f.rot_id);
    f.rot_text = cfg.get_or("fields.social_chem", "rot_text", f.rot_text);
    f.rot_categories = cfg.get_or("fields.social_chem", "rot_categories", f.rot_categories);
    f.action_text = cfg.get_or("fields.social_chem", "action_text", f.action_text);
    f.judgement = cfg.get_or("fields.social_chem", "judgement", f.judgement);
    f.foundations = cfg.get_or("fields.social_chem", "foundations", f.foundations);
    f.action_count = cfg.get_or("fields.social_chem", "action_count", f.action_count);
    std::string delim = cfg.get_or("fields.social_chem", "list_delimiter", "|");
    if (!delim.empty()) f.list_delimiter = delim[0];
    f.morality_category =
        cfg.get_or("fields.social_chem", "morality_category", f.morality_category);
    return f;
}

inline EmfdColumns emfd_columns_from_config(const Config& cfg) {
    EmfdColumns c;
    c.word = cfg.get_or("emfd_columns", "word", c.word);
    c.foundation_prob[0] = cfg.get_or("emfd_columns", "care", c.foundation_prob[0]);
    c.foundation_prob[1] = cfg.get_or("emfd_columns", "fairness", c.foundation_prob[1]);
    c.foundation_prob[2] = cfg.get_or("emfd_columns", "loyalty", c.foundation_prob[2]);
    c.foundation_prob[3] = cfg.get_or("emfd_columns", "authority", c.foundation_prob[3]);
    c.foundation_prob[4] = cfg.get_or("emfd_columns", "sanctity", c.foundation_prob[4]);
    std::string delim = cfg.get_or("emfd_columns", "delimiter", std::string(1, c.delimiter));
    if (!delim.empty()) c.delimiter = delim[0];
    return c;
}

inline std::map<std::string, std::string> emfd_columns_to_map(const EmfdColumns& c) {
    return {{"word", c.word},
            {"care", c.foundation_prob[0]},
            {"fairness", c.foundation_prob[1]},
            {"loyalty", c.foundation_prob[2]},
            {"authority", c.foundation_prob[3]},
            {"sanctity", c.foundation_prob[4]},
            {"delimiter", std::string(1, c.delimiter)}};
}

inline EmfdColumns emfd_columns_from_map(const std::map<std::string, std::string>& m) {
    EmfdColumns c;
    auto get = [&](const char* key, std::string fallback) {
        auto it = m.find(key);
        return it == m.end() ? fallback : it->second;
    };
    c.word = get("word", c.word);
    c.foundation_prob[0] = get("care", c.foundation_prob[0]);
    c.foundation_prob[1] = get("fairness", c.foundation_prob[1]);
    c.foundation_prob[2] = get("loyalty", c.foundation_prob[2]);
    c.foundation_prob[3] = get("authority", c.foundation_prob[3]);
    c.foundation_prob[4] = get("sanctity", c.foundation_prob[4]);
    std::string delim = get("delimiter", std::string(1, c.delimiter));
    if (!delim.empty()) c.delimiter = delim[0];
    return c;
}

// Parameter counts for the model variants reported in the source study;
// --params overrides for anything else.
inline std::optional<long long> known_model_parameters(const std::string& model) {
    static const std::map<std::string, long long> table = {
        {"text-ada-001", 350'000'000LL},      {"text-babbage-001", 1'300'000'000LL},
        {"text-curie-001", 6'700'000'000LL},  {"text-davinci-001", 175'000'000'000LL},
        {"text-davinci-002", 175'000'000'000LL}, {"text-davinci-003", 175'000'000'000LL},
        {"opt-350m", 350'000'000LL},          {"opt-1.3b", 1'300'000'000LL},
        {"opt-6.7b", 6'700'000'000LL},        {"opt-13b", 13'000'000'000LL},
        {"opt-30b", 30'000'000'000LL},
    };
    auto it = table.find(model);
    if (it == table.end()) return std::nullopt;
    return it->second;
}

// --- ingest -------------------------------------------------------------------

struct IngestOptions {
    Source dataset = Source::MoralStories;
    fs::path input;
    fs::path output;
    std::optional<fs::path> annotations_output;  // sc_situations only
    std::size_t n_per_stance = 1000;
    std::uint64_t seed = 42;
};

inline void run_ingest(const IngestOptions& opt, const Config& cfg) {
    std::vector<Json> records = read_jsonl(opt.input);
    switch (opt.dataset) {
        case Source::MoralStories:
            write_scenarios(opt.output, ingest_moral_stories(records, opt.n_per_stance, opt.seed,
                                                             moral_stories_fields(cfg)));
            break;
        case Source::EthicsCs:
            write_scenarios(opt.output, ingest_ethics_commonsense(records, opt.n_per_stance,
                                                                  opt.seed, ethics_fields(cfg)));
            break;
        case Source::ScActions:
            write_scenarios(opt.output,
                            ingest_social_chem_actions(records, opt.seed, social_chem_fields(cfg)));
            break;
        case Source::ScSituations: {
            if (!opt.annotations_output) {
                throw ConfigError("sc_situations ingest needs an annotations output path");
            }
            auto pairs = ingest_social_chem_situations(records, social_chem_fields(cfg));
            std::vector<Scenario> scenarios;
            std::vector<HumanAnnotationSet> annotations;
            for (auto& [s, a] : pairs) {
                scenarios.push_back(std::move(s));
                annotations.push_back(std::move(a));
            }
            write_scenarios(opt.output, scenarios);
            write_annotation_sets(*opt.annotations_output, annotations);
            break;
        }
    }
}

// --- build-prompts ---------------------------------------------------------------

struct BuildPromptsOptions {
    std::vector<fs::path> scenario_files;
    std::vector<std::optional<std::string>> identities;
    std::vector<Stance> stances{Stance::Moral, Stance::Immoral};
    std::vector<int> styles{2};
    bool fix_style1_typo = false;
    fs::path output;
};

inline void run_build_prompts(const BuildPromptsOptions& opt) {
    std::vector<Scenario> scenarios;
    for (const auto& file : opt.scenario_files) {
        for (Scenario& s : read_scenarios(file)) scenarios.push_back(std::move(s));
    }
    write_prompts(opt.output, build_prompt_set(scenarios, opt.identities, opt.stances, opt.styles,
                                               opt.fix_style1_typo));
}

// --- complete ----------------------------------------------------------------------

struct CompleteOptions {
    fs::path run_dir;
    fs::path prompts;
    std::vector<fs::path> scenario_files;
    std::optional<fs::path> annotations;

    ProviderKind provider = ProviderKind::Stub;
    std::optional<fs::path> stub_config;
    std::string endpoint;
    std::string api_key_env = "OPENAI_API_KEY";
    int timeout_s = 60;
    RetryPolicy retry{};
    int max_in_flight = 1;

    DecodingConfig decoding;
    long long parameter_count = 0;  // 0 = look up the model, else require --params
    std::string run_id;             // derived from content when empty

    std::uint64_t sampling_seed = 0;
    std::uint64_t bootstrap_seed = 20177;
    std::size_t bootstrap_resamples = 10000;
    double ci_level = 0.95;
    std::string config_digest;
};

namespace detail {

// Inputs are copied verbatim so the run directory is self-contained; a
// re-run with different input bytes is refused rather than silently mixed.
inline FileRef copy_input(const fs::path& run_dir, const fs::path& source,
                          const std::string& rel_dest) {
    std::string bytes = slurp_file(source);
    fs::path dest = run_dir / rel_dest;
    if (fs::exists(dest)) {
        if (slurp_file(dest) != bytes) {
            throw Error("run dir input " + dest.string() + " differs from " + source.string() +
                        "; refusing to mix runs");
        }
    } else {
        write_file(dest, bytes);
    }
    return FileRef{rel_dest, sha256_hex(bytes)};
}

inline void configure_stub_provider(StubProvider& stub,
                                    const std::optional<fs::path>& config_path) {
    if (!config_path) return;
    Json doc = Json::parse(slurp_file(*config_path));
    if (doc.contains("map")) {
        for (auto it = doc.at("map").begin(); it != doc.at("map").end(); ++it) {
            stub.add_digest_mapping(it.key(), it.value().get<std::string>());
        }
    }
    if (doc.contains("rules")) {
        for (const Json& rule : doc.at("rules")) {
            stub.add_rule(rule.at("contains").get<std::string>(),
                          rule.at("text").get<std::string>());
        }
    }
    if (doc.contains("default")) stub.set_default_text(doc.at("default").get<std::string>());
}

}  // namespace detail

inline RunManifest run_complete(const CompleteOptions& opt) {
    std::vector<PromptRecord> prompts = read_prompts(opt.prompts);
    if (prompts.empty()) throw ValidationError("prompt set is empty");

    std::string prompts_digest = sha256_hex(slurp_file(opt.prompts));
    std::string run_id = opt.run_id;
    if (run_id.empty()) {
        Json key{{"model", opt.decoding.model},
                 {"prompts", prompts_digest},
                 {"temperature", opt.decoding.temperature},
                 {"max_tokens", opt.decoding.max_tokens}};
        run_id = content_digest(key.dump(), 12);
    }

    RunManifest manifest;
    bool existing = fs::exists(opt.run_dir / "manifest.json");
    if (existing) {
        manifest = read_manifest(opt.run_dir);
        if (manifest.run_id != run_id) {
            throw Error("run dir " + opt.run_dir.string() + " belongs to run " + manifest.run_id +
                        ", not " + run_id);
        }
    } else {
        manifest.run_id = run_id;
        manifest.created_at = utc_timestamp();
        manifest.config_digest = opt.config_digest;
        manifest.model = opt.decoding.model;
        long long params = opt.parameter_count;
        if (params == 0) params = known_model_parameters(opt.decoding.model).value_or(0);
        manifest.parameter_count = params;
        manifest.temperature = opt.decoding.temperature;
        manifest.max_tokens = opt.decoding.max_tokens;
        manifest.prompts = detail::copy_input(opt.run_dir, opt.prompts, "inputs/prompts.jsonl");
        for (std::size_t i = 0; i < opt.scenario_files.size(); ++i) {
            char name[64];
            std::snprintf(name, sizeof(name), "inputs/scenarios_%03zu.jsonl", i);
            manifest.scenario_files.push_back(
                detail::copy_input(opt.run_dir, opt.scenario_files[i], name));
        }
        if (opt.annotations) {
            manifest.annotations =
                detail::copy_input(opt.run_dir, *opt.annotations, "inputs/annotations.jsonl");
        }
        std::set<std::string> seen_identity;
        bool seen_free = false;
        std::set<std::string> stances;
        std::set<int> styles;
        for (const PromptRecord& p : prompts) {
            if (p.identity) {
                if (seen_identity.insert(*p.identity).second) manifest.identities.push_back(p.identity);
            } else if (!seen_free) {
                seen_free = true;
                manifest.identities.push_back(std::nullopt);
            }
            stances.insert(std::string(to_string(p.stance)));
            styles.insert(p.style);
        }
        manifest.stances.assign(stances.begin(), stances.end());
        manifest.styles.assign(styles.begin(), styles.end());
        manifest.sampling_seed = opt.sampling_seed;
        manifest.bootstrap_seed = opt.bootstrap_seed;
        manifest.bootstrap_resamples = opt.bootstrap_resamples;
        manifest.ci_level = opt.ci_level;
        write_manifest(opt.run_dir, manifest);
    }

    CompletionStore store(opt.run_dir / "completions.jsonl");
    switch (opt.provider) {
        case ProviderKind::Stub: {
            StubProvider stub;
            detail::configure_stub_provider(stub, opt.stub_config);
            run_batch(prompts, stub, opt.decoding, store, opt.max_in_flight);
            break;
        }
        case ProviderKind::Replay: {
            ReplayProvider replay(store);
            run_batch(prompts, replay, opt.decoding, store, opt.max_in_flight);
            break;
        }
        case ProviderKind::Http: {
            if (opt.endpoint.empty()) throw ConfigError("http provider needs an endpoint URL");
            HttpProvider http(opt.endpoint, api_key_from_env(opt.api_key_env), opt.timeout_s,
                              opt.retry);
            run_batch(prompts, http, opt.decoding, store, opt.max_in_flight);
            break;
        }
    }
    return manifest;
}

// --- score -----------------------------------------------------------------------

struct ScoreOptions {
    fs::path run_dir;
    std::map<LexiconId, fs::path> lexicon_files;
    std::optional<EmfdColumns> emfd_columns;  // defaults to config/published names
};

namespace detail {

inline Lexicon load_lexicon_ref(const fs::path& run_dir, LexiconId id, const FileRef& ref,
                                const EmfdColumns& columns) {
    std::string bytes = slurp_file(run_dir / ref.path);
    if (sha256_hex(bytes) != ref.digest) {
        throw Error("lexicon file " + ref.path + " does not match its manifest digest");
    }
    return load_lexicon(id, bytes, columns);
}

inline void score_from_manifest(const fs::path& run_dir, const RunManifest& manifest) {
    CompletionStore store(run_dir / "completions.jsonl");
    std::vector<CompletionRecord> completions = store.records();
    if (completions.empty()) {
        throw Error("no completions in " + run_dir.string() + "; run the complete stage first");
    }
    EmfdColumns columns = emfd_columns_from_map(manifest.emfd_columns);
    for (const auto& [id_str, ref] : manifest.lexicons) {
        auto id = parse_lexicon_id(id_str);
        if (!id) throw ValidationError("manifest names unknown lexicon '" + id_str + "'");
        Lexicon lexicon = load_lexicon_ref(run_dir, *id, ref, columns);
        std::vector<Json> rows;
        rows.reserve(completions.size());
        for (const CompletionRecord& c : completions) {
            rows.push_back(to_json(expression(c, lexicon)));
        }
        write_jsonl(run_dir / "estimates" / (id_str + ".jsonl"), rows);
    }
}

}  // namespace detail

inline void run_score(const ScoreOptions& opt) {
    if (opt.lexicon_files.empty()) throw ConfigError("score needs at least one lexicon file");
    RunManifest manifest = read_manifest(opt.run_dir);
    EmfdColumns columns = opt.emfd_columns.value_or(EmfdColumns{});
    manifest.emfd_columns = emfd_columns_to_map(columns);
    for (const auto& [id, path] : opt.lexicon_files) {
        std::string id_str(to_string(id));
        FileRef ref = detail::copy_input(opt.run_dir, path, "inputs/lexicon_" + id_str + ".src");
        // Validate eagerly so a bad dictionary fails here, not mid-analysis.
        load_lexicon(id, slurp_file(opt.run_dir / ref.path), columns);
        manifest.lexicons[id_str] = ref;
    }
    write_manifest(opt.run_dir, manifest);
    detail::score_from_manifest(opt.run_dir, manifest);
}

// --- analyze ---------------------------------------------------------------------

struct AnalyzeOptions {
    fs::path run_dir;
    std::optional<std::string> identity_1;  // defaults: first two identities in the manifest
    std::optional<std::string> identity_2;
};

inline AnalyzeTables run_analyze(const AnalyzeOptions& opt) {
    RunManifest manifest = read_manifest(opt.run_dir);
    std::vector<PromptRecord> prompts = read_prompts(opt.run_dir / manifest.prompts.path);
    std::vector<Scenario> scenarios;
    for (const FileRef& ref : manifest.scenario_files) {
        for (Scenario& s : read_scenarios(opt.run_dir / ref.path)) scenarios.push_back(std::move(s));
    }
    if (manifest.lexicons.empty()) {
        throw Error("manifest lists no lexicons; run the score stage first");
    }
    std::vector<ExpressionEstimate> estimates;
    for (const auto& [id_str, ref] : manifest.lexicons) {
        fs::path path = opt.run_dir / "estimates" / (id_str + ".jsonl");
        if (!fs::exists(path)) {
            throw Error("missing " + path.string() + "; run the score stage first");
        }
        for (const Json& j : read_jsonl(path)) estimates.push_back(estimate_from_json(j));
    }

    AnalyzeTables tables;
    tables.run_id = manifest.run_id;
    tables.model = manifest.model;

    BootstrapConfig boot{manifest.bootstrap_resamples, manifest.ci_level,
                         manifest.bootstrap_seed};

    // Exclusion diagnostics: Absent profiles per dictionary.
    for (const auto& [id_str, ref] : manifest.lexicons) {
        std::size_t absent = 0;
        for (const ExpressionEstimate& e : estimates) {
            if (std::string(to_string(e.lexicon_id)) == id_str && !e.profile) ++absent;
        }
        tables.exclusion_counts["absent_profiles_" + id_str] = absent;
    }

    // Paired effect sizes for the ordered identity pair (i1, i2).
    std::vector<std::string> named_identities;
    for (const auto& i : manifest.identities) {
        if (i) named_identities.push_back(*i);
    }
    std::string i1 = opt.identity_1.value_or(named_identities.size() > 0 ? named_identities[0] : "");
    std::string i2 = opt.identity_2.value_or(named_identities.size() > 1 ? named_identities[1] : "");
    if (!i1.empty() && !i2.empty() && i1 != i2) {
        auto observations = build_pair_observations(prompts, estimates, scenarios, i1, i2);
        std::vector<EffectSizeCell> cells;
        for (GroupBy mode : {GroupBy::Overall, GroupBy::Dataset, GroupBy::Style}) {
            for (EffectSizeCell& c : mean_effect(observations, mode, boot)) {
                cells.push_back(std::move(c));
            }
        }
        std::vector<EffectSizeCell> aggregates = aggregate_lexicons(cells, &observations, boot);
        std::size_t excluded_total = 0;
        for (const PairObservation& obs : observations) {
            if (!obs.delta) ++excluded_total;
        }
        tables.exclusion_counts["excluded_pairs"] = excluded_total;

        std::map<Foundation, double> overall_means;
        std::size_t n_min = SIZE_MAX;
        std::size_t excluded = 0;
        for (const EffectSizeCell& c : aggregates) {
            if (c.group_kind == "overall") {
                overall_means[c.foundation] = c.mean_delta;
                n_min = std::min(n_min, c.n_pairs);
                excluded = c.excluded_pairs;
            }
        }
        tables.effect_cells = std::move(cells);
        for (EffectSizeCell& c : aggregates) tables.effect_cells.push_back(std::move(c));
        if (overall_means.size() == kFoundationCount) {
            if (manifest.parameter_count <= 0) {
                throw ConfigError("model '" + manifest.model +
                                  "' has no known parameter count; pass --params to complete");
            }
            tables.mfh = mfh_score(overall_means, manifest.model, manifest.parameter_count);
            tables.mfh_n_pairs = n_min;
            tables.mfh_excluded_pairs = excluded;
        }
    }

    // Criterion evaluators run over identity-free prompts when present.
    std::map<std::string, const Scenario*> scenario_by_id;
    for (const Scenario& s : scenarios) scenario_by_id[s.id] = &s;
    std::vector<const PromptRecord*> identity_free;
    for (const PromptRecord& p : prompts) {
        if (!p.identity) identity_free.push_back(&p);
    }
    if (!identity_free.empty()) {
        std::map<std::pair<std::string, std::string>, const ExpressionEstimate*> estimate_index;
        for (const ExpressionEstimate& e : estimates) {
            estimate_index[{e.prompt_id, std::string(to_string(e.lexicon_id))}] = &e;
        }
        auto estimate_for = [&](const PromptRecord& p,
                                const std::string& lexicon) -> const ExpressionEstimate* {
            auto it = estimate_index.find({p.prompt_id, lexicon});
            if (it == estimate_index.end()) {
                throw ValidationError("prompt " + p.prompt_id + " has no estimate for " + lexicon);
            }
            return it->second;
        };

        bool any_labels = std::any_of(scenarios.begin(), scenarios.end(),
                                      [](const Scenario& s) { return s.foundation_label.has_value(); });
        if (any_labels) {
            for (const auto& [id_str, ref] : manifest.lexicons) {
                std::vector<LabeledProfile> labeled;
                for (const PromptRecord* p : identity_free) {
                    auto sit = scenario_by_id.find(p->scenario_id);
                    if (sit == scenario_by_id.end() || !sit->second->foundation_label) continue;
                    labeled.push_back(LabeledProfile{p->scenario_id,
                                                     *sit->second->foundation_label,
                                                     estimate_for(*p, id_str)->profile});
                }
                if (!labeled.empty()) tables.criterion_a_rows[id_str] = criterion_a(labeled);
            }
        }

        if (manifest.annotations) {
            std::vector<HumanAnnotationSet> annotations =
                read_annotation_sets(opt.run_dir / manifest.annotations->path);
            EmfdColumns columns = emfd_columns_from_map(manifest.emfd_columns);
            for (const auto& [id_str, ref] : manifest.lexicons) {
                auto id = parse_lexicon_id(id_str);
                Lexicon lexicon = detail::load_lexicon_ref(opt.run_dir, *id, ref, columns);
                // Model profile per scenario: the identity-free prompt whose
                // stance matches the scenario's normative acceptability
                // (lowest style when several styles were rendered).
                std::map<std::string, const PromptRecord*> chosen;
                for (const PromptRecord* p : identity_free) {
                    auto sit = scenario_by_id.find(p->scenario_id);
                    if (sit == scenario_by_id.end()) continue;
                    const Scenario& s = *sit->second;
                    if (!s.acceptability || *s.acceptability != p->stance) continue;
                    auto [it, inserted] = chosen.try_emplace(p->scenario_id, p);
                    if (!inserted && p->style < it->second->style) it->second = p;
                }
                std::map<std::string, std::optional<FoundationProfile>> lm_profiles;
                for (const auto& [scenario_id, p] : chosen) {
                    lm_profiles[scenario_id] = estimate_for(*p, id_str)->profile;
                }
                if (!lm_profiles.empty()) {
                    CriterionBRow row;
                    row.lexicon = *id;
                    row.report = criterion_b(lm_profiles, annotations, lexicon);
                    tables.exclusion_counts["criterion_b_excluded_" + id_str] =
                        row.report.excluded_scenarios;
                    tables.criterion_b_rows.push_back(std::move(row));
                }
            }
        }
    }

    write_analyze_tables(opt.run_dir, tables);
    manifest.exclusion_counts = tables.exclusion_counts;
    write_manifest(opt.run_dir, manifest);
    return tables;
}

// --- report ----------------------------------------------------------------------

struct ReportOptions {
    fs::path run_dir;
    std::vector<fs::path> scale_run_dirs;  // defaults to just this run
};

inline void run_report(const ReportOptions& opt) {
    write_csv_tables(opt.run_dir);
    write_plot_data(opt.run_dir);
    std::vector<fs::path> dirs = opt.scale_run_dirs;
    if (dirs.empty()) dirs.push_back(opt.run_dir);
    bool all_have_scores = std::all_of(dirs.begin(), dirs.end(), [](const fs::path& d) {
        return fs::exists(d / "tables" / "mfh_scores.json");
    });
    if (all_have_scores) write_scale_trend(opt.run_dir, dirs);
}

// --- reproduce --------------------------------------------------------------------

// Re-derives everything downstream of the manifest against the replay cache:
// every prompt must hit the cache, then score, analyze, and report run with
// the manifest's seeds and parameters. Outputs are byte-stable.
inline void run_reproduce(const fs::path& run_dir) {
    RunManifest manifest = read_manifest(run_dir);
    std::vector<PromptRecord> prompts = read_prompts(run_dir / manifest.prompts.path);
    CompletionStore store(run_dir / "completions.jsonl");
    ReplayProvider replay(store);
    DecodingConfig decoding{manifest.temperature, manifest.max_tokens, manifest.model};
    run_batch(prompts, replay, decoding, store, 1);
    detail::score_from_manifest(run_dir, manifest);
    run_analyze(AnalyzeOptions{run_dir, std::nullopt, std::nullopt});
    run_report(ReportOptions{run_dir, {}});
}

}  // namespace mfh::pipeline
