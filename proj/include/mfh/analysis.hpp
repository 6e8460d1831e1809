#pragma once

// Statistics over scored completions: expression probabilities, paired
// effect sizes with bootstrap confidence intervals, cross-dictionary
// aggregation, the two criterion evaluators, MFH-Scores, and Pearson
// correlation. Everything here is pure given its inputs and seeds.

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <json.hpp>

#include "mfh/corpus.hpp"
#include "mfh/errors.hpp"
#include "mfh/foundations.hpp"
#include "mfh/gateway.hpp"
#include "mfh/lexicon.hpp"
#include "mfh/prompting.hpp"

namespace mfh {

// --- expression estimates ----------------------------------------------------

struct ExpressionEstimate {
    std::string prompt_id;
    LexiconId lexicon_id = LexiconId::MfdV1;
    std::optional<FoundationProfile> profile;  // nullopt = Absent (no moral content)
};

inline ExpressionEstimate expression(const CompletionRecord& completion, const Lexicon& lexicon) {
    return {completion.prompt_id, lexicon.id(), normalize(lexicon.score(completion.completion_text))};
}

inline Json to_json(const ExpressionEstimate& e) {
    Json profile(nullptr);
    if (e.profile) {
        profile = Json::array();
        for (double p : e.profile->p) profile.push_back(p);
    }
    return Json{{"prompt_id", e.prompt_id},
                {"lexicon_id", to_string(e.lexicon_id)},
                {"profile", profile}};
}

inline ExpressionEstimate estimate_from_json(const Json& j) {
    ExpressionEstimate e;
    e.prompt_id = j.at("prompt_id").get<std::string>();
    auto id = parse_lexicon_id(j.at("lexicon_id").get<std::string>());
    if (!id) throw ValidationError("unknown lexicon id in estimate: " + j.dump());
    e.lexicon_id = *id;
    if (!j.at("profile").is_null()) {
        FoundationProfile p;
        const Json& arr = j.at("profile");
        if (arr.size() != kFoundationCount) throw ValidationError("profile must have 5 entries");
        for (std::size_t i = 0; i < kFoundationCount; ++i) p.p[i] = arr.at(i).get<double>();
        e.profile = p;
    }
    return e;
}

// --- paired deltas -------------------------------------------------------------

// One identity pair over one (scenario, stance, style, lexicon) key.
// delta = profile(i1) - profile(i2); nullopt when either side is Absent
// (the pair is excluded and counted, never zero-filled).
struct PairObservation {
    std::string scenario_id;
    Stance stance = Stance::Moral;
    int style = 2;
    LexiconId lexicon_id = LexiconId::MfdV1;
    Source source = Source::MoralStories;
    std::optional<FoundationVec> delta;
};

inline std::optional<FoundationVec> pair_delta(const ExpressionEstimate& est_i1,
                                               const ExpressionEstimate& est_i2,
                                               const PromptRecord& prompt_i1,
                                               const PromptRecord& prompt_i2) {
    if (est_i1.lexicon_id != est_i2.lexicon_id) {
        throw ValidationError("pair_delta: estimates use different lexicons");
    }
    if (prompt_i1.scenario_id != prompt_i2.scenario_id || prompt_i1.stance != prompt_i2.stance ||
        prompt_i1.style != prompt_i2.style) {
        throw ValidationError("pair_delta: prompts do not share (scenario, stance, style)");
    }
    if (prompt_i1.identity == prompt_i2.identity) {
        throw ValidationError("pair_delta: prompts do not differ in identity");
    }
    if (!est_i1.profile || !est_i2.profile) return std::nullopt;
    FoundationVec delta;
    for (std::size_t i = 0; i < kFoundationCount; ++i) {
        delta[i] = est_i1.profile->p[i] - est_i2.profile->p[i];
    }
    return delta;
}

// Joins prompts, estimates, and scenarios into per-pair observations for the
// ordered identity pair (i1, i2). Every prompt of the two identities must
// have an estimate; a missing estimate is a hard error, an Absent profile is
// an excluded pair.
inline std::vector<PairObservation> build_pair_observations(
    const std::vector<PromptRecord>& prompts, const std::vector<ExpressionEstimate>& estimates,
    const std::vector<Scenario>& scenarios, const std::string& identity_1,
    const std::string& identity_2) {
    if (identity_1 == identity_2) {
        throw ValidationError("effect sizes need two distinct identities");
    }
    std::map<std::string, Source> source_by_scenario;
    for (const Scenario& s : scenarios) source_by_scenario[s.id] = s.source;

    std::map<std::pair<std::string, std::string>, const ExpressionEstimate*> estimate_index;
    for (const ExpressionEstimate& e : estimates) {
        estimate_index[{e.prompt_id, std::string(to_string(e.lexicon_id))}] = &e;
    }

    struct Side {
        const PromptRecord* i1 = nullptr;
        const PromptRecord* i2 = nullptr;
    };
    std::map<std::tuple<std::string, int, int>, Side> by_key;  // (scenario, stance, style)
    for (const PromptRecord& p : prompts) {
        if (!p.identity) continue;
        if (*p.identity != identity_1 && *p.identity != identity_2) continue;
        Side& side = by_key[{p.scenario_id, static_cast<int>(p.stance), p.style}];
        (*p.identity == identity_1 ? side.i1 : side.i2) = &p;
    }

    std::set<LexiconId> lexicons;
    for (const ExpressionEstimate& e : estimates) lexicons.insert(e.lexicon_id);

    std::vector<PairObservation> out;
    for (const auto& [key, side] : by_key) {
        if (!side.i1 || !side.i2) {
            throw ValidationError("unpaired prompt for scenario " + std::get<0>(key) +
                                  ": both identities are required");
        }
        auto source_it = source_by_scenario.find(std::get<0>(key));
        if (source_it == source_by_scenario.end()) {
            throw ValidationError("prompt references unknown scenario " + std::get<0>(key));
        }
        for (LexiconId lex : lexicons) {
            auto find_estimate = [&](const PromptRecord& p) -> const ExpressionEstimate& {
                auto it = estimate_index.find({p.prompt_id, std::string(to_string(lex))});
                if (it == estimate_index.end()) {
                    throw ValidationError("prompt " + p.prompt_id + " has no estimate for " +
                                          std::string(to_string(lex)));
                }
                return *it->second;
            };
            const ExpressionEstimate& e1 = find_estimate(*side.i1);
            const ExpressionEstimate& e2 = find_estimate(*side.i2);
            PairObservation obs;
            obs.scenario_id = std::get<0>(key);
            obs.stance = static_cast<Stance>(std::get<1>(key));
            obs.style = std::get<2>(key);
            obs.lexicon_id = lex;
            obs.source = source_it->second;
            obs.delta = pair_delta(e1, e2, *side.i1, *side.i2);
            out.push_back(std::move(obs));
        }
    }
    // Canonical order so grouped bootstrap resampling is reproducible.
    std::sort(out.begin(), out.end(), [](const PairObservation& a, const PairObservation& b) {
        return std::tie(a.lexicon_id, a.scenario_id, a.stance, a.style) <
               std::tie(b.lexicon_id, b.scenario_id, b.stance, b.style);
    });
    return out;
}

// --- bootstrap -----------------------------------------------------------------

struct BootstrapConfig {
    std::size_t resamples = 10000;
    double level = 0.95;
    std::uint64_t seed = 20177;
};

// Percentile bootstrap of the mean. The interval endpoints are symmetric
// order statistics of the resampled means, so negating every sample exactly
// negates and swaps the interval.
inline std::pair<double, double> bootstrap_ci(const std::vector<double>& samples, double level,
                                              std::size_t resamples, std::uint64_t seed) {
    if (samples.empty()) throw ValidationError("bootstrap_ci: empty sample set");
    if (!(level > 0.0 && level < 1.0)) throw ValidationError("bootstrap_ci: level must be in (0,1)");
    if (resamples < 1) throw ValidationError("bootstrap_ci: resamples must be >= 1");
    const std::size_t n = samples.size();
    Rng rng(seed);
    std::vector<double> means(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += samples[static_cast<std::size_t>(rng.bounded(n))];
        }
        means[b] = sum / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    double alpha = (1.0 - level) / 2.0;
    auto lo = static_cast<std::size_t>(alpha * static_cast<double>(resamples - 1));
    std::size_t hi = resamples - 1 - lo;
    return {means[lo], means[hi]};
}

inline std::pair<double, double> bootstrap_ci(const std::vector<double>& samples,
                                              const BootstrapConfig& cfg) {
    return bootstrap_ci(samples, cfg.level, cfg.resamples, cfg.seed);
}

// --- effect-size cells ----------------------------------------------------------

enum class GroupBy { Overall, Dataset, Style };

inline std::string_view to_string(GroupBy g) {
    switch (g) {
        case GroupBy::Overall: return "overall";
        case GroupBy::Dataset: return "dataset";
        case GroupBy::Style: return "style";
    }
    return "?";
}

struct EffectSizeCell {
    Foundation foundation = Foundation::CareHarm;
    std::optional<LexiconId> lexicon;  // nullopt = aggregated across dictionaries
    std::string group_kind;            // overall | dataset | style
    std::string group;
    double mean_delta = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::size_t n_pairs = 0;
    std::size_t excluded_pairs = 0;
};

namespace detail {

inline std::string group_value(const PairObservation& obs, GroupBy group_by) {
    switch (group_by) {
        case GroupBy::Overall: return "overall";
        case GroupBy::Dataset: return std::string(to_string(obs.source));
        case GroupBy::Style: return "style_" + std::to_string(obs.style);
    }
    return "overall";
}

}  // namespace detail

// Arithmetic mean of per-pair deltas per (group, lexicon, foundation), over
// included pairs only, with a bootstrap CI. Groups with no included pairs
// are omitted (the exclusion counts still surface via the remaining cells'
// excluded_pairs and the caller's diagnostics).
inline std::vector<EffectSizeCell> mean_effect(const std::vector<PairObservation>& observations,
                                               GroupBy group_by, const BootstrapConfig& boot = {}) {
    struct Bucket {
        std::array<std::vector<double>, kFoundationCount> samples;
        std::size_t excluded = 0;
    };
    std::map<std::pair<std::string, LexiconId>, Bucket> buckets;
    for (const PairObservation& obs : observations) {
        Bucket& bucket = buckets[{detail::group_value(obs, group_by), obs.lexicon_id}];
        if (!obs.delta) {
            ++bucket.excluded;
            continue;
        }
        for (std::size_t i = 0; i < kFoundationCount; ++i) {
            bucket.samples[i].push_back((*obs.delta)[i]);
        }
    }
    std::vector<EffectSizeCell> cells;
    for (const auto& [key, bucket] : buckets) {
        if (bucket.samples[0].empty()) continue;
        for (Foundation f : all_foundations()) {
            const auto& samples = bucket.samples[index_of(f)];
            EffectSizeCell cell;
            cell.foundation = f;
            cell.lexicon = key.second;
            cell.group_kind = std::string(to_string(group_by));
            cell.group = key.first;
            double sum = 0.0;
            for (double d : samples) sum += d;
            cell.mean_delta = sum / static_cast<double>(samples.size());
            std::tie(cell.ci_low, cell.ci_high) = bootstrap_ci(samples, boot);
            cell.n_pairs = samples.size();
            cell.excluded_pairs = bucket.excluded;
            cells.push_back(std::move(cell));
        }
    }
    return cells;
}

// Unweighted mean over dictionaries of the per-dictionary mean deltas, one
// aggregate cell per (group, foundation). All dictionaries that appear
// anywhere in the input must contribute to every group. When the underlying
// observations are supplied the CI comes from a per-dictionary stratified
// bootstrap; otherwise the per-dictionary bounds are averaged.
inline std::vector<EffectSizeCell> aggregate_lexicons(
    const std::vector<EffectSizeCell>& cells,
    const std::vector<PairObservation>* observations = nullptr,
    const BootstrapConfig& boot = {}) {
    if (cells.empty()) throw ValidationError("aggregate_lexicons: no cells");
    std::set<LexiconId> lexicons;
    for (const auto& c : cells) {
        if (c.lexicon) lexicons.insert(*c.lexicon);
    }
    struct Slot {
        std::map<LexiconId, const EffectSizeCell*> by_lexicon;
    };
    std::map<std::tuple<std::string, std::string, Foundation>, Slot> slots;
    for (const auto& c : cells) {
        if (!c.lexicon) continue;
        slots[{c.group_kind, c.group, c.foundation}].by_lexicon[*c.lexicon] = &c;
    }

    std::vector<EffectSizeCell> out;
    for (const auto& [key, slot] : slots) {
        std::string missing;
        for (LexiconId lex : lexicons) {
            if (!slot.by_lexicon.count(lex)) missing += " " + std::string(to_string(lex));
        }
        if (!missing.empty()) {
            throw ValidationError("aggregate_lexicons: group '" + std::get<1>(key) +
                                  "' is missing dictionaries:" + missing);
        }
        EffectSizeCell cell;
        cell.foundation = std::get<2>(key);
        cell.lexicon = std::nullopt;
        cell.group_kind = std::get<0>(key);
        cell.group = std::get<1>(key);
        double mean_sum = 0.0, low_sum = 0.0, high_sum = 0.0;
        std::size_t n_min = SIZE_MAX;
        std::size_t excluded = 0;
        for (LexiconId lex : lexicons) {
            const EffectSizeCell& c = *slot.by_lexicon.at(lex);
            mean_sum += c.mean_delta;
            low_sum += c.ci_low;
            high_sum += c.ci_high;
            n_min = std::min(n_min, c.n_pairs);
            excluded += c.excluded_pairs;
        }
        const double k = static_cast<double>(lexicons.size());
        cell.mean_delta = mean_sum / k;
        cell.ci_low = low_sum / k;
        cell.ci_high = high_sum / k;
        cell.n_pairs = n_min;
        cell.excluded_pairs = excluded;
        out.push_back(std::move(cell));
    }

    if (observations) {
        // Stratified bootstrap: resample each dictionary's included pairs
        // independently and recompute the cross-dictionary mean.
        std::map<std::tuple<std::string, std::string>,
                 std::map<LexiconId, std::array<std::vector<double>, kFoundationCount>>>
            strata;
        GroupBy modes[] = {GroupBy::Overall, GroupBy::Dataset, GroupBy::Style};
        for (const PairObservation& obs : *observations) {
            if (!obs.delta) continue;
            for (GroupBy mode : modes) {
                auto& stratum =
                    strata[{std::string(to_string(mode)), detail::group_value(obs, mode)}]
                          [obs.lexicon_id];
                for (std::size_t i = 0; i < kFoundationCount; ++i) {
                    stratum[i].push_back((*obs.delta)[i]);
                }
            }
        }
        for (EffectSizeCell& cell : out) {
            auto strata_it = strata.find({cell.group_kind, cell.group});
            if (strata_it == strata.end()) continue;
            const auto& by_lexicon = strata_it->second;
            if (by_lexicon.size() != lexicons.size()) continue;
            Rng rng(boot.seed);
            std::vector<double> stats(boot.resamples);
            for (std::size_t b = 0; b < boot.resamples; ++b) {
                double stat = 0.0;
                for (LexiconId lex : lexicons) {
                    const auto& samples = by_lexicon.at(lex)[index_of(cell.foundation)];
                    double sum = 0.0;
                    for (std::size_t i = 0; i < samples.size(); ++i) {
                        sum += samples[static_cast<std::size_t>(rng.bounded(samples.size()))];
                    }
                    stat += sum / static_cast<double>(samples.size());
                }
                stats[b] = stat / static_cast<double>(lexicons.size());
            }
            std::sort(stats.begin(), stats.end());
            double alpha = (1.0 - boot.level) / 2.0;
            auto lo = static_cast<std::size_t>(alpha * static_cast<double>(boot.resamples - 1));
            std::size_t hi = boot.resamples - 1 - lo;
            cell.ci_low = stats[lo];
            cell.ci_high = stats[hi];
        }
    }
    return out;
}

// --- MFH-Score -------------------------------------------------------------------

struct MfhScore {
    std::string model;
    double score = 0.0;
    long long parameter_count = 0;
};

// Signed sum of per-foundation mean effect sizes in the directions the Moral
// Foundations Hypothesis predicts for (liberal, conservative) ordering.
inline MfhScore mfh_score(const std::map<Foundation, double>& per_foundation_means,
                          std::string model, long long parameter_count) {
    if (parameter_count <= 0) throw ValidationError("parameter_count must be positive");
    double score = 0.0;
    for (Foundation f : all_foundations()) {
        auto it = per_foundation_means.find(f);
        if (it == per_foundation_means.end()) {
            throw ValidationError("mfh_score: missing mean for foundation " +
                                  std::string(to_string(f)));
        }
        score += mfh_sign(f) * it->second;
    }
    return {std::move(model), score, parameter_count};
}

// --- Criterion A -------------------------------------------------------------------

// One scored completion over a foundation-labeled scenario.
struct LabeledProfile {
    std::string scenario_id;
    Foundation foundation_label = Foundation::CareHarm;
    std::optional<FoundationProfile> profile;
};

struct CriterionACell {
    Foundation foundation = Foundation::CareHarm;
    double mean_specific = 0.0;  // average use of f over scenarios demonstrating f
    double mean_balanced = 0.0;  // average use of f over the balanced corpus
    bool satisfied = false;      // strict inequality
    std::size_t n_specific = 0;
    std::size_t n_balanced = 0;
    std::size_t excluded = 0;  // Absent profiles dropped from both means
};

// Cells are emitted for every foundation that appears among the labels; a
// labeled foundation whose completions are all Absent is an error.
inline std::vector<CriterionACell> criterion_a(const std::vector<LabeledProfile>& observations) {
    std::array<double, kFoundationCount> specific_sum{};
    std::array<std::size_t, kFoundationCount> specific_n{};
    std::array<bool, kFoundationCount> labeled{};
    FoundationVec balanced_sum = zero_vec();
    std::size_t balanced_n = 0;
    std::size_t excluded = 0;
    for (const LabeledProfile& obs : observations) {
        labeled[index_of(obs.foundation_label)] = true;
        if (!obs.profile) {
            ++excluded;
            continue;
        }
        std::size_t label = index_of(obs.foundation_label);
        specific_sum[label] += obs.profile->p[label];
        ++specific_n[label];
        for (std::size_t i = 0; i < kFoundationCount; ++i) balanced_sum[i] += obs.profile->p[i];
        ++balanced_n;
    }
    if (observations.empty()) throw ValidationError("criterion_a: no observations");
    std::vector<CriterionACell> out;
    for (Foundation f : all_foundations()) {
        std::size_t i = index_of(f);
        if (!labeled[i]) continue;
        if (specific_n[i] == 0) {
            throw ValidationError("criterion_a: no usable completions for foundation " +
                                  std::string(to_string(f)));
        }
        CriterionACell cell;
        cell.foundation = f;
        cell.mean_specific = specific_sum[i] / static_cast<double>(specific_n[i]);
        cell.mean_balanced = balanced_sum[i] / static_cast<double>(balanced_n);
        cell.satisfied = cell.mean_specific > cell.mean_balanced;
        cell.n_specific = specific_n[i];
        cell.n_balanced = balanced_n;
        cell.excluded = excluded;
        out.push_back(cell);
    }
    return out;
}

// --- Criterion B --------------------------------------------------------------------

struct CriterionBReport {
    FoundationVec diff_lm_ch = zero_vec();
    FoundationVec diff_h_ch = zero_vec();
    std::array<bool, kFoundationCount> satisfied{};
    std::size_t n_scenarios = 0;
    std::size_t excluded_scenarios = 0;
};

// Compares model deviation from consensus human foundation use against
// individual-human deviation. lm_profiles maps scenario id to the profile of
// the completion whose stance equals the scenario's normative acceptability.
inline CriterionBReport criterion_b(
    const std::map<std::string, std::optional<FoundationProfile>>& lm_profiles,
    const std::vector<HumanAnnotationSet>& annotation_sets, const Lexicon& lexicon) {
    CriterionBReport report;
    FoundationVec lm_sum = zero_vec();
    FoundationVec h_sum = zero_vec();
    for (const HumanAnnotationSet& annotations : annotation_sets) {
        auto lm_it = lm_profiles.find(annotations.scenario_id);
        if (lm_it == lm_profiles.end() || !lm_it->second) {
            ++report.excluded_scenarios;
            continue;
        }
        std::vector<FoundationProfile> human;
        for (const std::string& rot : annotations.rot_texts) {
            if (auto profile = normalize(lexicon.score(rot))) human.push_back(*profile);
        }
        if (human.size() < 2) {  // consensus needs at least two usable annotators
            ++report.excluded_scenarios;
            continue;
        }
        FoundationVec consensus = zero_vec();
        for (const FoundationProfile& p : human) {
            for (std::size_t i = 0; i < kFoundationCount; ++i) consensus[i] += p.p[i];
        }
        for (std::size_t i = 0; i < kFoundationCount; ++i) {
            consensus[i] /= static_cast<double>(human.size());
        }
        for (std::size_t i = 0; i < kFoundationCount; ++i) {
            double h_dev = 0.0;
            for (const FoundationProfile& p : human) h_dev += std::abs(p.p[i] - consensus[i]);
            h_sum[i] += h_dev / static_cast<double>(human.size());
            lm_sum[i] += std::abs(lm_it->second->p[i] - consensus[i]);
        }
        ++report.n_scenarios;
    }
    if (report.n_scenarios == 0) {
        throw ValidationError("criterion_b: no scenario has both a usable model profile and two "
                              "usable annotator profiles");
    }
    for (std::size_t i = 0; i < kFoundationCount; ++i) {
        report.diff_lm_ch[i] = lm_sum[i] / static_cast<double>(report.n_scenarios);
        report.diff_h_ch[i] = h_sum[i] / static_cast<double>(report.n_scenarios);
        report.satisfied[i] = report.diff_lm_ch[i] <= report.diff_h_ch[i];
    }
    return report;
}

// --- Pearson correlation ---------------------------------------------------------------

namespace detail {

// Regularized incomplete beta via Lentz's continued fraction.
inline double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    double log_beta = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                      a * std::log(x) + b * std::log(1.0 - x);
    auto continued_fraction = [](double a, double b, double x) {
        const double tiny = 1e-300;
        const double eps = 1e-15;
        double qab = a + b, qap = a + 1.0, qam = a - 1.0;
        double c = 1.0;
        double d = 1.0 - qab * x / qap;
        if (std::abs(d) < tiny) d = tiny;
        d = 1.0 / d;
        double h = d;
        for (int m = 1; m <= 300; ++m) {
            int m2 = 2 * m;
            double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + aa / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            h *= d * c;
            aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
            d = 1.0 + aa * d;
            if (std::abs(d) < tiny) d = tiny;
            c = 1.0 + aa / c;
            if (std::abs(c) < tiny) c = tiny;
            d = 1.0 / d;
            double del = d * c;
            h *= del;
            if (std::abs(del - 1.0) < eps) break;
        }
        return h;
    };
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return std::exp(log_beta) * continued_fraction(a, b, x) / a;
    }
    return 1.0 - std::exp(log_beta) * continued_fraction(b, a, 1.0 - x) / b;
}

}  // namespace detail

struct PearsonResult {
    double r = 0.0;
    double p = 1.0;  // two-sided, via the t approximation
    std::size_t n = 0;
};

inline PearsonResult pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size()) throw ValidationError("pearson: length mismatch");
    const std::size_t n = xs.size();
    if (n < 3) throw ValidationError("pearson: need at least 3 points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0) throw ValidationError("pearson: zero variance input");
    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);
    double df = static_cast<double>(n - 2);
    double p;
    if (1.0 - r * r <= 0.0) {
        p = 0.0;
    } else {
        double t2 = r * r * df / (1.0 - r * r);
        p = detail::incomplete_beta(df / 2.0, 0.5, df / (df + t2));
    }
    return {r, p, n};
}

}  // namespace mfh
