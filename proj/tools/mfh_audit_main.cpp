// mfh-audit: batch pipeline for measuring how prompted political identity
// shifts moral-foundation vocabulary in model completions.
//
// Subcommands: ingest, build-prompts, complete, score, analyze, report,
// reproduce. Exit codes: 0 success, 1 pipeline failure (stderr names the
// failing stage), 2 usage error.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "mfh/pipeline.hpp"

namespace fs = std::filesystem;
using namespace mfh;

namespace {

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<std::optional<std::string>> parse_identities(const std::string& csv) {
    std::vector<std::optional<std::string>> out;
    for (const std::string& token : split_csv(csv)) {
        if (token == "none") out.push_back(std::nullopt);
        else out.push_back(token);
    }
    return out;
}

std::vector<Stance> parse_stances(const std::string& csv) {
    std::vector<Stance> out;
    for (const std::string& token : split_csv(csv)) {
        auto stance = parse_stance(token);
        if (!stance) throw ConfigError("unknown stance '" + token + "'");
        out.push_back(*stance);
    }
    return out;
}

std::vector<int> parse_styles(const std::string& csv) {
    std::vector<int> out;
    for (const std::string& token : split_csv(csv)) {
        try {
            out.push_back(std::stoi(token));
        } catch (const std::exception&) {
            throw ConfigError("style is not an integer: '" + token + "'");
        }
    }
    return out;
}

struct ConfigState {
    Config config;
    std::string digest;
};

ConfigState load_config(const std::string& path) {
    ConfigState state;
    if (path.empty()) {
        state.digest = sha256_hex("");
        return state;
    }
    std::string bytes = slurp_file(path);
    state.config = Config::parse(bytes, path);
    state.digest = sha256_hex(bytes);
    return state;
}

int run_stage(const char* stage, const std::function<void()>& body) {
    try {
        body();
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error [" << stage << "]: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"moral-foundations audit pipeline for completion models"};
    app.require_subcommand(1);

    // --- ingest ---------------------------------------------------------------
    auto* ingest = app.add_subcommand("ingest", "preprocess a source dataset into scenarios");
    std::string ingest_dataset, ingest_input, ingest_out, ingest_annotations_out;
    std::string ingest_config;
    std::size_t ingest_n_per_stance = 1000;
    std::uint64_t ingest_seed = 42;
    ingest->add_option("--dataset", ingest_dataset,
                       "moral_stories|ethics_cs|sc_actions|sc_situations")
        ->required();
    ingest->add_option("--input", ingest_input, "line-delimited source records")->required();
    ingest->add_option("--out", ingest_out, "scenario output file")->required();
    ingest->add_option("--annotations-out", ingest_annotations_out,
                       "annotation-set output (sc_situations)");
    ingest->add_option("--n-per-stance", ingest_n_per_stance,
                       "scenarios sampled per acceptability");
    ingest->add_option("--seed", ingest_seed, "sampling seed");
    ingest->add_option("--config", ingest_config, "config file with field mappings");

    // --- build-prompts ----------------------------------------------------------
    auto* build = app.add_subcommand("build-prompts", "render the prompt grid");
    std::string build_scenarios, build_identities = "liberal,conservative";
    std::string build_stances = "moral,immoral", build_styles = "2", build_out;
    bool build_fix_typo = false;
    build->add_option("--scenarios", build_scenarios, "scenario file(s), comma-separated")
        ->required();
    build->add_option("--identities", build_identities,
                      "identity phrases, comma-separated ('none' = identity-free)");
    build->add_option("--stances", build_stances, "stances, comma-separated");
    build->add_option("--styles", build_styles, "template styles, comma-separated");
    build->add_flag("--fix-style1-typo", build_fix_typo,
                    "correct the style-1 immoral template wording");
    build->add_option("--out", build_out, "prompt output file")->required();

    // --- complete ----------------------------------------------------------------
    auto* complete = app.add_subcommand("complete", "obtain completions for a prompt set");
    std::string complete_run_dir, complete_prompts, complete_scenarios, complete_annotations;
    std::string complete_provider = "stub", complete_stub_config, complete_endpoint;
    std::string complete_model, complete_run_id, complete_config;
    long long complete_params = 0;
    double complete_temperature = 0.0;
    int complete_max_tokens = 64, complete_max_in_flight = 1, complete_timeout = 60;
    int complete_retry_attempts = 5;
    long long complete_retry_base_ms = 1000;
    std::uint64_t complete_sampling_seed = 0, complete_bootstrap_seed = 20177;
    std::size_t complete_bootstrap_resamples = 10000;
    double complete_ci_level = 0.95;
    complete->add_option("--run-dir", complete_run_dir, "run directory")->required();
    complete->add_option("--prompts", complete_prompts, "prompt file")->required();
    complete->add_option("--scenarios", complete_scenarios, "scenario file(s), comma-separated")
        ->required();
    complete->add_option("--annotations", complete_annotations, "annotation-set file");
    complete->add_option("--provider", complete_provider, "http|replay|stub");
    complete->add_option("--stub-config", complete_stub_config,
                         "stub mapping file (JSON: map/rules/default)");
    complete->add_option("--endpoint", complete_endpoint, "completions endpoint URL");
    complete->add_option("--model", complete_model, "model name");
    complete->add_option("--params", complete_params, "model parameter count");
    complete->add_option("--temperature", complete_temperature, "sampling temperature");
    complete->add_option("--max-tokens", complete_max_tokens, "completion token budget");
    complete->add_option("--max-in-flight", complete_max_in_flight, "concurrent requests");
    complete->add_option("--timeout", complete_timeout, "request timeout, seconds");
    complete->add_option("--retry-max-attempts", complete_retry_attempts, "retry budget");
    complete->add_option("--retry-base-delay-ms", complete_retry_base_ms, "backoff base delay");
    complete->add_option("--run-id", complete_run_id, "explicit run id");
    complete->add_option("--sampling-seed", complete_sampling_seed, "provenance: corpus seed");
    complete->add_option("--bootstrap-seed", complete_bootstrap_seed, "bootstrap seed");
    complete->add_option("--bootstrap-resamples", complete_bootstrap_resamples,
                         "bootstrap resample count");
    complete->add_option("--ci-level", complete_ci_level, "confidence level");
    complete->add_option("--config", complete_config, "config file");

    // --- score ----------------------------------------------------------------------
    auto* score_cmd = app.add_subcommand("score", "score completions with the dictionaries");
    std::string score_run_dir, score_mfd_v1, score_mfd_v2, score_emfd, score_config;
    score_cmd->add_option("--run-dir", score_run_dir, "run directory")->required();
    score_cmd->add_option("--mfd-v1", score_mfd_v1, "MFDv1 dictionary file");
    score_cmd->add_option("--mfd-v2", score_mfd_v2, "MFDv2 dictionary file");
    score_cmd->add_option("--emfd", score_emfd, "eMFD table file");
    score_cmd->add_option("--config", score_config, "config file with eMFD column mapping");

    // --- analyze ---------------------------------------------------------------------
    auto* analyze = app.add_subcommand("analyze", "compute effect sizes and criteria");
    std::string analyze_run_dir, analyze_i1, analyze_i2;
    analyze->add_option("--run-dir", analyze_run_dir, "run directory")->required();
    analyze->add_option("--i1", analyze_i1, "first identity of the ordered pair");
    analyze->add_option("--i2", analyze_i2, "second identity of the ordered pair");

    // --- report ----------------------------------------------------------------------
    auto* report = app.add_subcommand("report", "emit CSV tables and plot data");
    std::string report_run_dir, report_scale_runs;
    report->add_option("--run-dir", report_run_dir, "run directory")->required();
    report->add_option("--scale-runs", report_scale_runs,
                       "run directories for the scale trend, comma-separated");

    // --- reproduce --------------------------------------------------------------------
    auto* reproduce = app.add_subcommand("reproduce", "re-derive outputs from manifest + cache");
    std::string reproduce_run_dir;
    reproduce->add_option("--run-dir", reproduce_run_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    if (ingest->parsed()) {
        return run_stage("ingest", [&] {
            auto source = parse_source(ingest_dataset);
            if (!source) throw ConfigError("unknown dataset '" + ingest_dataset + "'");
            ConfigState cfg = load_config(ingest_config);
            pipeline::IngestOptions opt;
            opt.dataset = *source;
            opt.input = ingest_input;
            opt.output = ingest_out;
            if (!ingest_annotations_out.empty()) opt.annotations_output = ingest_annotations_out;
            opt.n_per_stance = ingest_n_per_stance;
            opt.seed = ingest_seed;
            pipeline::run_ingest(opt, cfg.config);
        });
    }
    if (build->parsed()) {
        return run_stage("build-prompts", [&] {
            pipeline::BuildPromptsOptions opt;
            for (const std::string& f : split_csv(build_scenarios)) opt.scenario_files.emplace_back(f);
            opt.identities = parse_identities(build_identities);
            opt.stances = parse_stances(build_stances);
            opt.styles = parse_styles(build_styles);
            opt.fix_style1_typo = build_fix_typo;
            opt.output = build_out;
            pipeline::run_build_prompts(opt);
        });
    }
    if (complete->parsed()) {
        return run_stage("complete", [&] {
            ConfigState cfg = load_config(complete_config);
            pipeline::CompleteOptions opt;
            opt.run_dir = complete_run_dir;
            opt.prompts = complete_prompts;
            for (const std::string& f : split_csv(complete_scenarios)) {
                opt.scenario_files.emplace_back(f);
            }
            if (!complete_annotations.empty()) opt.annotations = complete_annotations;
            auto provider = parse_provider_kind(complete_provider);
            if (!provider) throw ConfigError("unknown provider '" + complete_provider + "'");
            opt.provider = *provider;
            if (!complete_stub_config.empty()) opt.stub_config = complete_stub_config;
            opt.endpoint = !complete_endpoint.empty()
                               ? complete_endpoint
                               : cfg.config.get_or("gateway", "endpoint", "");
            opt.api_key_env = cfg.config.get_or("gateway", "api_key_env", "OPENAI_API_KEY");
            opt.timeout_s = complete->count("--timeout")
                                ? complete_timeout
                                : static_cast<int>(cfg.config.get_int_or("gateway", "timeout_s",
                                                                         complete_timeout));
            opt.retry.max_attempts = complete_retry_attempts;
            opt.retry.base_delay = std::chrono::milliseconds(complete_retry_base_ms);
            opt.max_in_flight = complete_max_in_flight;
            opt.decoding.model = !complete_model.empty()
                                     ? complete_model
                                     : cfg.config.get_or("gateway", "model", "");
            if (opt.decoding.model.empty()) {
                throw ConfigError("no model named; pass --model or set gateway.model");
            }
            opt.decoding.temperature = complete->count("--temperature")
                                           ? complete_temperature
                                           : cfg.config.get_double_or("gateway", "temperature",
                                                                      complete_temperature);
            opt.decoding.max_tokens =
                complete->count("--max-tokens")
                    ? complete_max_tokens
                    : static_cast<int>(cfg.config.get_int_or("gateway", "max_tokens",
                                                             complete_max_tokens));
            opt.parameter_count = complete_params;
            opt.run_id = complete_run_id;
            opt.sampling_seed = complete_sampling_seed;
            opt.bootstrap_seed =
                complete->count("--bootstrap-seed")
                    ? complete_bootstrap_seed
                    : static_cast<std::uint64_t>(cfg.config.get_int_or(
                          "analysis", "bootstrap_seed",
                          static_cast<long long>(complete_bootstrap_seed)));
            opt.bootstrap_resamples =
                complete->count("--bootstrap-resamples")
                    ? complete_bootstrap_resamples
                    : static_cast<std::size_t>(cfg.config.get_int_or(
                          "analysis", "bootstrap_resamples",
                          static_cast<long long>(complete_bootstrap_resamples)));
            opt.ci_level = complete->count("--ci-level")
                               ? complete_ci_level
                               : cfg.config.get_double_or("analysis", "ci_level",
                                                          complete_ci_level);
            opt.config_digest = cfg.digest;
            pipeline::run_complete(opt);
        });
    }
    if (score_cmd->parsed()) {
        return run_stage("score", [&] {
            ConfigState cfg = load_config(score_config);
            pipeline::ScoreOptions opt;
            opt.run_dir = score_run_dir;
            if (!score_mfd_v1.empty()) opt.lexicon_files[LexiconId::MfdV1] = score_mfd_v1;
            if (!score_mfd_v2.empty()) opt.lexicon_files[LexiconId::MfdV2] = score_mfd_v2;
            if (!score_emfd.empty()) opt.lexicon_files[LexiconId::Emfd] = score_emfd;
            opt.emfd_columns = pipeline::emfd_columns_from_config(cfg.config);
            pipeline::run_score(opt);
        });
    }
    if (analyze->parsed()) {
        return run_stage("analyze", [&] {
            pipeline::AnalyzeOptions opt;
            opt.run_dir = analyze_run_dir;
            if (!analyze_i1.empty()) opt.identity_1 = analyze_i1;
            if (!analyze_i2.empty()) opt.identity_2 = analyze_i2;
            pipeline::run_analyze(opt);
        });
    }
    if (report->parsed()) {
        return run_stage("report", [&] {
            pipeline::ReportOptions opt;
            opt.run_dir = report_run_dir;
            for (const std::string& d : split_csv(report_scale_runs)) {
                opt.scale_run_dirs.emplace_back(d);
            }
            pipeline::run_report(opt);
        });
    }
    if (reproduce->parsed()) {
        return run_stage("reproduce", [&] { pipeline::run_reproduce(reproduce_run_dir); });
    }
    return 2;
}
