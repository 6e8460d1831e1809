#pragma once

// Table and plot-data emission. Analyze writes canonical JSON tables; report
// renders them to CSV plus plot-data files in the standard figure layouts
// for this audit. All serialization here is deterministic: sorted rows,
// shortest round-trip float formatting, no timestamps.

#include <array>
#include <charconv>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mfh/analysis.hpp"
#include "mfh/errors.hpp"
#include "mfh/records.hpp"

namespace mfh {

inline std::string format_double(double v) {
    std::array<char, 40> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) throw Error("float formatting failed");
    return std::string(buf.data(), ptr);
}

inline std::string csv_field(std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += "\"";
    return out;
}

// --- analyze output bundle -----------------------------------------------------

struct CriterionBRow {
    LexiconId lexicon = LexiconId::MfdV1;
    CriterionBReport report;
};

struct AnalyzeTables {
    std::string run_id;
    std::string model;
    std::vector<EffectSizeCell> effect_cells;  // per-lexicon and aggregate rows
    std::optional<MfhScore> mfh;
    std::size_t mfh_n_pairs = 0;
    std::size_t mfh_excluded_pairs = 0;
    std::map<std::string, std::vector<CriterionACell>> criterion_a_rows;  // by lexicon id
    std::vector<CriterionBRow> criterion_b_rows;
    std::map<std::string, std::size_t> exclusion_counts;
};

namespace detail {

inline int lexicon_order(const std::optional<LexiconId>& id) {
    if (!id) return 3;  // aggregate rows sort after the per-dictionary rows
    return static_cast<int>(*id);
}

inline std::string lexicon_label(const std::optional<LexiconId>& id) {
    return id ? std::string(to_string(*id)) : "aggregate";
}

inline std::optional<LexiconId> lexicon_from_label(const std::string& label) {
    if (label == "aggregate") return std::nullopt;
    auto id = parse_lexicon_id(label);
    if (!id) throw ValidationError("unknown lexicon label: " + label);
    return id;
}

inline void sort_cells(std::vector<EffectSizeCell>& cells) {
    std::sort(cells.begin(), cells.end(), [](const EffectSizeCell& a, const EffectSizeCell& b) {
        return std::tuple(a.group_kind, a.group, lexicon_order(a.lexicon), index_of(a.foundation)) <
               std::tuple(b.group_kind, b.group, lexicon_order(b.lexicon), index_of(b.foundation));
    });
}

}  // namespace detail

// --- JSON tables (written by analyze) --------------------------------------------

inline Json to_json(const EffectSizeCell& c) {
    return Json{{"group_kind", c.group_kind},
                {"group", c.group},
                {"lexicon", detail::lexicon_label(c.lexicon)},
                {"foundation", to_string(c.foundation)},
                {"mean_delta", c.mean_delta},
                {"ci_low", c.ci_low},
                {"ci_high", c.ci_high},
                {"n_pairs", c.n_pairs},
                {"excluded_pairs", c.excluded_pairs}};
}

inline EffectSizeCell effect_cell_from_json(const Json& j) {
    EffectSizeCell c;
    c.group_kind = j.at("group_kind").get<std::string>();
    c.group = j.at("group").get<std::string>();
    c.lexicon = detail::lexicon_from_label(j.at("lexicon").get<std::string>());
    c.foundation = foundation_from_string(j.at("foundation").get<std::string>());
    c.mean_delta = j.at("mean_delta").get<double>();
    c.ci_low = j.at("ci_low").get<double>();
    c.ci_high = j.at("ci_high").get<double>();
    c.n_pairs = j.at("n_pairs").get<std::size_t>();
    c.excluded_pairs = j.at("excluded_pairs").get<std::size_t>();
    return c;
}

inline void write_analyze_tables(const std::filesystem::path& run_dir, const AnalyzeTables& t) {
    auto tables = run_dir / "tables";
    {
        auto cells = t.effect_cells;
        detail::sort_cells(cells);
        Json rows = Json::array();
        for (const auto& c : cells) rows.push_back(to_json(c));
        write_file(tables / "effect_sizes.json",
                   Json{{"run_id", t.run_id}, {"model", t.model}, {"rows", rows}}.dump(2) + "\n");
    }
    if (t.mfh) {
        write_file(tables / "mfh_scores.json",
                   Json{{"run_id", t.run_id},
                        {"model", t.mfh->model},
                        {"parameter_count", t.mfh->parameter_count},
                        {"score", t.mfh->score},
                        {"n_pairs", t.mfh_n_pairs},
                        {"excluded_pairs", t.mfh_excluded_pairs}}
                           .dump(2) +
                       "\n");
    }
    if (!t.criterion_a_rows.empty()) {
        Json rows = Json::array();
        for (const auto& [lexicon, cells] : t.criterion_a_rows) {
            for (const auto& c : cells) {
                rows.push_back(Json{{"lexicon", lexicon},
                                    {"foundation", to_string(c.foundation)},
                                    {"mean_specific", c.mean_specific},
                                    {"mean_balanced", c.mean_balanced},
                                    {"satisfied", c.satisfied},
                                    {"n_specific", c.n_specific},
                                    {"n_balanced", c.n_balanced},
                                    {"excluded", c.excluded}});
            }
        }
        write_file(tables / "criterion_a.json",
                   Json{{"run_id", t.run_id}, {"rows", rows}}.dump(2) + "\n");
    }
    if (!t.criterion_b_rows.empty()) {
        Json rows = Json::array();
        for (const auto& row : t.criterion_b_rows) {
            for (Foundation f : all_foundations()) {
                std::size_t i = index_of(f);
                rows.push_back(Json{{"lexicon", to_string(row.lexicon)},
                                    {"foundation", to_string(f)},
                                    {"diff_lm_ch", row.report.diff_lm_ch[i]},
                                    {"diff_h_ch", row.report.diff_h_ch[i]},
                                    {"satisfied", row.report.satisfied[i]},
                                    {"n_scenarios", row.report.n_scenarios},
                                    {"excluded_scenarios", row.report.excluded_scenarios}});
            }
        }
        write_file(tables / "criterion_b.json",
                   Json{{"run_id", t.run_id}, {"rows", rows}}.dump(2) + "\n");
    }
    write_file(tables / "diagnostics.json",
               Json{{"run_id", t.run_id}, {"exclusion_counts", t.exclusion_counts}}.dump(2) + "\n");
}

// --- report stage: CSV tables + plot data ------------------------------------------

namespace detail {

inline Json load_table(const std::filesystem::path& run_dir, const std::string& name,
                       bool required) {
    auto path = run_dir / "tables" / name;
    if (!std::filesystem::exists(path)) {
        if (required) {
            throw Error("missing " + path.string() + "; run the analyze stage first");
        }
        return Json(nullptr);
    }
    return Json::parse(slurp_file(path));
}

inline std::string csv_number(const Json& v) {
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
}

}  // namespace detail

// Renders analyze's JSON tables to CSV. Every row carries its denominators
// and the run id that produced it.
inline void write_csv_tables(const std::filesystem::path& run_dir) {
    Json effects = detail::load_table(run_dir, "effect_sizes.json", /*required=*/true);
    const std::string run_id = effects.at("run_id").get<std::string>();
    {
        std::string csv =
            "group_kind,group,lexicon,foundation,mean_delta,ci_low,ci_high,n_pairs,"
            "excluded_pairs,run_id\n";
        for (const Json& r : effects.at("rows")) {
            csv += csv_field(r.at("group_kind").get<std::string>()) + "," +
                   csv_field(r.at("group").get<std::string>()) + "," +
                   csv_field(r.at("lexicon").get<std::string>()) + "," +
                   csv_field(r.at("foundation").get<std::string>()) + "," +
                   detail::csv_number(r.at("mean_delta")) + "," +
                   detail::csv_number(r.at("ci_low")) + "," +
                   detail::csv_number(r.at("ci_high")) + "," +
                   detail::csv_number(r.at("n_pairs")) + "," +
                   detail::csv_number(r.at("excluded_pairs")) + "," + csv_field(run_id) + "\n";
        }
        write_file(run_dir / "tables" / "effect_sizes.csv", csv);
    }
    Json mfh = detail::load_table(run_dir, "mfh_scores.json", /*required=*/false);
    if (!mfh.is_null()) {
        std::string csv = "model,parameter_count,mfh_score,n_pairs,excluded_pairs,run_id\n";
        csv += csv_field(mfh.at("model").get<std::string>()) + "," +
               detail::csv_number(mfh.at("parameter_count")) + "," +
               detail::csv_number(mfh.at("score")) + "," + detail::csv_number(mfh.at("n_pairs")) +
               "," + detail::csv_number(mfh.at("excluded_pairs")) + "," + csv_field(run_id) + "\n";
        write_file(run_dir / "tables" / "mfh_scores.csv", csv);
    }
    Json crit_a = detail::load_table(run_dir, "criterion_a.json", /*required=*/false);
    if (!crit_a.is_null()) {
        std::string csv =
            "lexicon,foundation,mean_specific,mean_balanced,satisfied,n_specific,n_balanced,"
            "excluded,run_id\n";
        for (const Json& r : crit_a.at("rows")) {
            csv += csv_field(r.at("lexicon").get<std::string>()) + "," +
                   csv_field(r.at("foundation").get<std::string>()) + "," +
                   detail::csv_number(r.at("mean_specific")) + "," +
                   detail::csv_number(r.at("mean_balanced")) + "," +
                   (r.at("satisfied").get<bool>() ? "true" : "false") + "," +
                   detail::csv_number(r.at("n_specific")) + "," +
                   detail::csv_number(r.at("n_balanced")) + "," +
                   detail::csv_number(r.at("excluded")) + "," + csv_field(run_id) + "\n";
        }
        write_file(run_dir / "tables" / "criterion_a.csv", csv);
    }
    Json crit_b = detail::load_table(run_dir, "criterion_b.json", /*required=*/false);
    if (!crit_b.is_null()) {
        std::string csv =
            "lexicon,foundation,diff_lm_ch,diff_h_ch,satisfied,n_scenarios,excluded_scenarios,"
            "run_id\n";
        for (const Json& r : crit_b.at("rows")) {
            csv += csv_field(r.at("lexicon").get<std::string>()) + "," +
                   csv_field(r.at("foundation").get<std::string>()) + "," +
                   detail::csv_number(r.at("diff_lm_ch")) + "," +
                   detail::csv_number(r.at("diff_h_ch")) + "," +
                   (r.at("satisfied").get<bool>() ? "true" : "false") + "," +
                   detail::csv_number(r.at("n_scenarios")) + "," +
                   detail::csv_number(r.at("excluded_scenarios")) + "," + csv_field(run_id) + "\n";
        }
        write_file(run_dir / "tables" / "criterion_b.csv", csv);
    }
}

// Plot-data emission. Layouts:
//   effect_by_foundation: per-foundation effect sizes with CIs and the
//     MFH-expected shading direction, per dictionary plus the aggregate.
//   effect_by_dataset / effect_by_style: the same cells grouped by source
//     dataset and by prompt style.
//   criteria: criterion A/B bar data.
//   scale_trend: MFH-Score and per-foundation effects vs parameter count,
//     with Pearson r/p when at least three models are supplied.
inline void write_plot_data(const std::filesystem::path& run_dir) {
    Json effects = detail::load_table(run_dir, "effect_sizes.json", /*required=*/true);
    const std::string run_id = effects.at("run_id").get<std::string>();
    const std::string model = effects.value("model", std::string{});

    auto rows_for = [&](const std::string& group_kind) {
        Json rows = Json::array();
        for (const Json& r : effects.at("rows")) {
            if (r.at("group_kind").get<std::string>() != group_kind) continue;
            Json row = r;
            Foundation f = foundation_from_string(r.at("foundation").get<std::string>());
            row["expected_direction"] = mfh_sign(f);
            rows.push_back(row);
        }
        return rows;
    };

    write_file(run_dir / "plots" / "effect_by_foundation.json",
               Json{{"layout", "effect_by_foundation"},
                    {"run_id", run_id},
                    {"model", model},
                    {"rows", rows_for("overall")}}
                       .dump(2) +
                   "\n");
    write_file(run_dir / "plots" / "effect_by_dataset.json",
               Json{{"layout", "effect_by_dataset"},
                    {"run_id", run_id},
                    {"model", model},
                    {"rows", rows_for("dataset")}}
                       .dump(2) +
                   "\n");
    write_file(run_dir / "plots" / "effect_by_style.json",
               Json{{"layout", "effect_by_style"},
                    {"run_id", run_id},
                    {"model", model},
                    {"rows", rows_for("style")}}
                       .dump(2) +
                   "\n");

    Json crit_a = detail::load_table(run_dir, "criterion_a.json", /*required=*/false);
    Json crit_b = detail::load_table(run_dir, "criterion_b.json", /*required=*/false);
    if (!crit_a.is_null() || !crit_b.is_null()) {
        write_file(run_dir / "plots" / "criteria.json",
                   Json{{"layout", "criteria"},
                        {"run_id", run_id},
                        {"criterion_a", crit_a.is_null() ? Json::array() : crit_a.at("rows")},
                        {"criterion_b", crit_b.is_null() ? Json::array() : crit_b.at("rows")}}
                           .dump(2) +
                       "\n");
    }
}

// Cross-run scale trend (one point per model/run). Pearson correlation of
// MFH-Score against parameter count is attached when three or more points
// with non-constant inputs are available; with the handful of models typical
// here the p-value is flagged low-power.
inline void write_scale_trend(const std::filesystem::path& out_run_dir,
                              const std::vector<std::filesystem::path>& run_dirs) {
    Json points = Json::array();
    std::vector<double> params, scores;
    for (const auto& dir : run_dirs) {
        Json mfh = detail::load_table(dir, "mfh_scores.json", /*required=*/true);
        Json effects = detail::load_table(dir, "effect_sizes.json", /*required=*/true);
        Json foundations = Json::array();
        for (const Json& r : effects.at("rows")) {
            if (r.at("group_kind") == "overall" && r.at("lexicon") == "aggregate") {
                foundations.push_back(r);
            }
        }
        points.push_back(Json{{"run_id", mfh.at("run_id")},
                              {"model", mfh.at("model")},
                              {"parameter_count", mfh.at("parameter_count")},
                              {"mfh_score", mfh.at("score")},
                              {"n_pairs", mfh.at("n_pairs")},
                              {"excluded_pairs", mfh.at("excluded_pairs")},
                              {"foundation_effects", foundations}});
        params.push_back(mfh.at("parameter_count").get<double>());
        scores.push_back(mfh.at("score").get<double>());
    }
    Json correlation(nullptr);
    if (params.size() >= 3) {
        bool constant_x = std::all_of(params.begin(), params.end(),
                                      [&](double v) { return v == params[0]; });
        bool constant_y = std::all_of(scores.begin(), scores.end(),
                                      [&](double v) { return v == scores[0]; });
        if (!constant_x && !constant_y) {
            PearsonResult pr = pearson(params, scores);
            correlation = Json{{"r", pr.r}, {"p", pr.p}, {"n", pr.n}, {"low_power", pr.n <= 6}};
        }
    }
    write_file(out_run_dir / "plots" / "scale_trend.json",
               Json{{"layout", "scale_trend"}, {"points", points}, {"pearson", correlation}}
                       .dump(2) +
                   "\n");
    if (!correlation.is_null()) {
        Json own = detail::load_table(out_run_dir, "mfh_scores.json", /*required=*/true);
        std::string csv = "x,y_variable,r,p,n,low_power,run_id\n";
        csv += "parameter_count,mfh_score," + format_double(correlation.at("r").get<double>()) +
               "," + format_double(correlation.at("p").get<double>()) + "," +
               std::to_string(correlation.at("n").get<std::size_t>()) + "," +
               (correlation.at("low_power").get<bool>() ? "true" : "false") + "," +
               csv_field(own.at("run_id").get<std::string>()) + "\n";
        write_file(out_run_dir / "tables" / "correlations.csv", csv);
    }
}

}  // namespace mfh
