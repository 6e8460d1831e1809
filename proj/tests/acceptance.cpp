// Acceptance suite. Runs every acceptance criterion end to end and prints
// one PASS/FAIL line per criterion (SKIP only for the optional live check).
// Exits nonzero if any required criterion fails.
//
//   acceptance --cli <mfh-audit binary> --fixtures <dir> --work <scratch dir>

#include <sys/wait.h>

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "mfh/analysis.hpp"
#include "mfh/gateway.hpp"
#include "mfh/lexicon.hpp"
#include "mfh/pipeline.hpp"
#include "mfh/prompting.hpp"
#include "mfh/records.hpp"

using namespace mfh;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Context {
    fs::path cli;
    fs::path fixtures;
    fs::path work;
};

int g_failures = 0;

void report(int number, const std::string& name, bool pass, double seconds,
            const std::string& detail = "") {
    std::ostringstream line;
    line << (pass ? "PASS" : "FAIL") << " criterion " << number << ": " << name << " ("
         << std::fixed;
    line.precision(2);
    line << seconds << "s)";
    if (!detail.empty()) line << " -- " << detail;
    std::cout << line.str() << std::endl;
    if (!pass) ++g_failures;
}

void report_skip(int number, const std::string& name, const std::string& reason) {
    std::cout << "SKIP criterion " << number << ": " << name << " -- " << reason << std::endl;
}

void run_criterion(int number, const std::string& name,
                   const std::function<std::string()>& body) {
    auto start = Clock::now();
    bool pass = true;
    std::string detail;
    try {
        detail = body();
    } catch (const std::exception& e) {
        pass = false;
        detail = e.what();
    }
    double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    report(number, name, pass, seconds, detail);
}

void require(bool condition, const std::string& message) {
    if (!condition) throw std::runtime_error(message);
}

int run_cli(const Context& ctx, const std::string& args, std::string* output = nullptr) {
    fs::path log = ctx.work / "cli.log";
    std::string cmd = ctx.cli.string() + " " + args + " > " + log.string() + " 2>&1";
    int rc = std::system(cmd.c_str());
    if (output) *output = slurp_file(log);
    if (WIFEXITED(rc)) return WEXITSTATUS(rc);
    return -1;
}

bool bits_equal_magnitude(double a, double b) {
    return std::bit_cast<std::uint64_t>(std::fabs(a)) == std::bit_cast<std::uint64_t>(std::fabs(b));
}

// Independent matcher: linear scan over entries, exact-before-prefix then
// longest pattern. Used as the oracle for criterion 1 and re-used by the
// criterion 3 brute-force recomputation.
RawScore oracle_score(const Lexicon& lexicon, const std::string& text) {
    RawScore raw;
    for (const std::string& token : tokenize(text)) {
        ++raw.token_count;
        const LexiconEntry* best = nullptr;
        bool best_exact = false;
        for (const LexiconEntry& e : lexicon.entries()) {
            bool hit = e.match_kind == MatchKind::Exact
                           ? e.pattern == token
                           : token.size() >= e.pattern.size() &&
                                 token.compare(0, e.pattern.size(), e.pattern) == 0;
            if (!hit) continue;
            bool exact = e.match_kind == MatchKind::Exact;
            if (!best || (exact && !best_exact) ||
                (exact == best_exact && e.pattern.size() > best->pattern.size())) {
                best = &e;
                best_exact = exact;
            }
        }
        if (best) {
            ++raw.matched_token_count;
            for (std::size_t i = 0; i < kFoundationCount; ++i) raw.weights[i] += best->weights[i];
        }
    }
    return raw;
}

// --- shared fixture run (criteria 3, 4, 10) -----------------------------------

const char* kLiberalText =
    "kill kill kill kill safety safety safety safety cheat cheat fairness fairness "
    "loyal obey holy defile";
const char* kConservativeText =
    "kill cheat loyal loyal betray betray obey obey rebel rebel holy holy holy "
    "defile defile defile";

// Hand-derivable closed form for the planted run: every pair has the same
// delta, p_lib - p_con with dyadic components.
constexpr double kExpectedDelta[kFoundationCount] = {7.0 / 16, 3.0 / 16, -3.0 / 16, -3.0 / 16,
                                                     -4.0 / 16};
constexpr double kExpectedMfhScore = 1.25;

fs::path planted_run_dir(const Context& ctx) { return ctx.work / "planted" / "run"; }

void build_planted_run(const Context& ctx) {
    fs::path dir = ctx.work / "planted";
    fs::remove_all(dir);
    fs::create_directories(dir);

    std::vector<Scenario> scenarios;
    for (int i = 0; i < 25; ++i) {
        Scenario s;
        s.id = "s" + std::to_string(i);
        s.text = "Scenario number " + std::to_string(i) + " happens.";
        s.source = i % 2 == 0 ? Source::MoralStories : Source::EthicsCs;
        s.kind = ScenarioKind::Situation;
        s.acceptability = i % 2 == 0 ? Stance::Moral : Stance::Immoral;
        scenarios.push_back(std::move(s));
    }
    write_scenarios(dir / "scenarios.jsonl", scenarios);

    write_file(dir / "stub.json",
               Json{{"rules", Json::array({Json{{"contains", "As a liberal"},
                                                {"text", kLiberalText}},
                                           Json{{"contains", "As a conservative"},
                                                {"text", kConservativeText}}})}}
                   .dump());

    int rc = run_cli(ctx, "build-prompts --scenarios " + (dir / "scenarios.jsonl").string() +
                              " --identities liberal,conservative --stances moral,immoral"
                              " --styles 2 --out " +
                              (dir / "prompts.jsonl").string());
    require(rc == 0, "build-prompts failed");

    std::string out;
    rc = run_cli(ctx, "complete --run-dir " + (dir / "run").string() + " --prompts " +
                          (dir / "prompts.jsonl").string() + " --scenarios " +
                          (dir / "scenarios.jsonl").string() +
                          " --provider stub --stub-config " + (dir / "stub.json").string() +
                          " --model fixture-model --params 1000000000",
                 &out);
    require(rc == 0, "complete failed: " + out);

    rc = run_cli(ctx, "score --run-dir " + (dir / "run").string() + " --mfd-v1 " +
                          (ctx.fixtures / "mfd_v1_fixture.dic").string() + " --mfd-v2 " +
                          (ctx.fixtures / "mfd_v2_fixture.dic").string() + " --emfd " +
                          (ctx.fixtures / "emfd_fixture.csv").string(),
                 &out);
    require(rc == 0, "score failed: " + out);

    rc = run_cli(ctx, "analyze --run-dir " + (dir / "run").string(), &out);
    require(rc == 0, "analyze failed: " + out);
    rc = run_cli(ctx, "report --run-dir " + (dir / "run").string(), &out);
    require(rc == 0, "report failed: " + out);
}

std::map<std::string, std::string> snapshot_outputs(const fs::path& run_dir) {
    std::map<std::string, std::string> out;
    for (const char* sub : {"tables", "plots"}) {
        fs::path dir = run_dir / sub;
        if (!fs::exists(dir)) continue;
        for (const auto& entry : fs::directory_iterator(dir)) {
            out[entry.path().lexically_relative(run_dir).string()] = slurp_file(entry.path());
        }
    }
    return out;
}

// --- criteria ---------------------------------------------------------------------

std::string criterion_1(const Context&) {
    Rng rng(1001);
    std::size_t texts_checked = 0;
    while (texts_checked < 1000) {
        std::size_t n_entries = 20 + rng.bounded(60);
        std::vector<LexiconEntry> entries;
        std::set<std::pair<std::string, MatchKind>> seen;
        while (entries.size() < n_entries) {
            LexiconEntry e;
            std::size_t len = 2 + rng.bounded(5);
            for (std::size_t i = 0; i < len; ++i) {
                e.pattern.push_back(static_cast<char>('a' + rng.bounded(26)));
            }
            e.match_kind = rng.bounded(2) == 0 ? MatchKind::Exact : MatchKind::Prefix;
            if (!seen.insert({e.pattern, e.match_kind}).second) continue;
            bool any = false;
            for (std::size_t f = 0; f < kFoundationCount; ++f) {
                if (rng.bounded(3) == 0) {
                    e.weights[f] = rng.bounded(2) == 0 ? 1.0 : rng.uniform();
                    any = any || e.weights[f] > 0.0;
                }
            }
            if (!any) e.weights[rng.bounded(kFoundationCount)] = 1.0;
            entries.push_back(std::move(e));
        }
        Lexicon lexicon(LexiconId::MfdV1, std::move(entries), "acceptance");

        for (int t = 0; t < 25 && texts_checked < 1000; ++t, ++texts_checked) {
            std::string text;
            std::size_t n_tokens = 1 + rng.bounded(60);
            const auto& pool = lexicon.entries();
            for (std::size_t i = 0; i < n_tokens; ++i) {
                if (!text.empty()) text += rng.bounded(5) == 0 ? ". " : " ";
                switch (rng.bounded(4)) {
                    case 0: text += pool[rng.bounded(pool.size())].pattern; break;
                    case 1: {
                        text += pool[rng.bounded(pool.size())].pattern;
                        std::size_t extra = 1 + rng.bounded(3);
                        for (std::size_t j = 0; j < extra; ++j) {
                            text.push_back(static_cast<char>('a' + rng.bounded(26)));
                        }
                        break;
                    }
                    case 2: {
                        std::size_t len = 2 + rng.bounded(6);
                        for (std::size_t j = 0; j < len; ++j) {
                            text.push_back(static_cast<char>('a' + rng.bounded(26)));
                        }
                        break;
                    }
                    default: text += std::to_string(rng.bounded(1000)); break;
                }
            }
            RawScore fast = lexicon.score(text);
            RawScore naive = oracle_score(lexicon, text);
            require(fast.token_count == naive.token_count, "token counts diverge");
            require(fast.matched_token_count == naive.matched_token_count,
                    "matched counts diverge");
            for (std::size_t f = 0; f < kFoundationCount; ++f) {
                require(fast.weights[f] == naive.weights[f], "scores diverge from the oracle");
            }
        }
    }
    return "1000 texts, exact agreement";
}

std::string criterion_2(const Context&) {
    Rng rng(2002);
    std::size_t absent = 0;
    for (int t = 0; t < 10000; ++t) {
        RawScore raw;
        bool any = false;
        for (std::size_t i = 0; i < kFoundationCount; ++i) {
            if (rng.bounded(4) != 0) {
                raw.weights[i] = rng.uniform() * 20.0;
                any = any || raw.weights[i] > 0.0;
            }
        }
        auto profile = normalize(raw);
        if (!any) {
            require(!profile.has_value(), "zero score must normalize to Absent");
            ++absent;
            continue;
        }
        require(profile.has_value(), "positive score must normalize");
        double sum = vec_sum(profile->p);
        require(std::abs(sum - 1.0) <= 1e-9, "profile sum off the simplex");
        for (double p : profile->p) require(p >= 0.0, "negative probability");

        double c = 1e-3 + rng.uniform() * 1e3;
        RawScore scaled = raw;
        for (auto& w : scaled.weights) w *= c;
        auto rescaled = normalize(scaled);
        require(rescaled.has_value(), "scaled score must normalize");
        for (std::size_t i = 0; i < kFoundationCount; ++i) {
            require(std::abs(rescaled->p[i] - profile->p[i]) <= 1e-12,
                    "normalize is not scale invariant");
        }
    }
    return "10000 raw scores, " + std::to_string(absent) + " Absent";
}

std::string criterion_3(const Context& ctx) {
    build_planted_run(ctx);
    fs::path run = planted_run_dir(ctx);

    // Brute-force oracle: recompute every statistic from the stub texts and
    // fixture dictionary files, via the independent linear-scan matcher.
    Lexicon v1 = load_mfd_v1(slurp_file(ctx.fixtures / "mfd_v1_fixture.dic"));
    Lexicon v2 = load_mfd_v2(slurp_file(ctx.fixtures / "mfd_v2_fixture.dic"));
    Lexicon emfd = load_emfd(slurp_file(ctx.fixtures / "emfd_fixture.csv"));
    std::map<std::string, FoundationVec> oracle_delta;
    double oracle_mfh = 0.0;
    {
        std::map<Foundation, double> aggregate_mean;
        for (const auto& [name, lexicon] :
             std::map<std::string, const Lexicon*>{{"mfd_v1", &v1}, {"mfd_v2", &v2},
                                                   {"emfd", &emfd}}) {
            auto lib = normalize(oracle_score(*lexicon, kLiberalText));
            auto con = normalize(oracle_score(*lexicon, kConservativeText));
            require(lib && con, "oracle profiles must exist");
            FoundationVec delta;
            for (std::size_t i = 0; i < kFoundationCount; ++i) {
                delta[i] = lib->p[i] - con->p[i];
            }
            // 50 identical pairs: brute-force sum then divide.
            FoundationVec sum = zero_vec();
            for (int p = 0; p < 50; ++p) {
                for (std::size_t i = 0; i < kFoundationCount; ++i) sum[i] += delta[i];
            }
            for (std::size_t i = 0; i < kFoundationCount; ++i) delta[i] = sum[i] / 50.0;
            oracle_delta[name] = delta;
        }
        for (Foundation f : all_foundations()) {
            std::size_t i = index_of(f);
            double mean = (oracle_delta["mfd_v1"][i] + oracle_delta["mfd_v2"][i] +
                           oracle_delta["emfd"][i]) /
                          3.0;
            aggregate_mean[f] = mean;
            oracle_mfh += mfh_sign(f) * mean;
        }
        (void)aggregate_mean;
    }

    Json effects = Json::parse(slurp_file(run / "tables" / "effect_sizes.json"));
    std::size_t overall_cells = 0;
    for (const Json& row : effects.at("rows")) {
        if (row.at("group_kind") != "overall") continue;
        ++overall_cells;
        Foundation f = foundation_from_string(row.at("foundation").get<std::string>());
        std::size_t i = index_of(f);
        double mean = row.at("mean_delta").get<double>();
        std::string lexicon = row.at("lexicon").get<std::string>();
        double expected = lexicon == "aggregate"
                              ? (oracle_delta["mfd_v1"][i] + oracle_delta["mfd_v2"][i] +
                                 oracle_delta["emfd"][i]) / 3.0
                              : oracle_delta[lexicon][i];
        require(mean == expected, "mean delta differs from the brute-force oracle");
        require(mean == kExpectedDelta[i], "mean delta differs from the closed form");
        if (is_individualizing(f)) {
            require(mean > 0.0, "individualizing delta must be positive");
        } else {
            require(mean < 0.0, "binding delta must be negative");
        }
        require(row.at("n_pairs").get<std::size_t>() == 50, "expected 50 pairs per cell");
        require(row.at("excluded_pairs").get<std::size_t>() == 0, "no pair may be excluded");
    }
    require(overall_cells == 4 * kFoundationCount, "expected 3 dictionaries + aggregate");

    Json mfh = Json::parse(slurp_file(run / "tables" / "mfh_scores.json"));
    double score = mfh.at("score").get<double>();
    require(std::abs(score - oracle_mfh) <= 1e-12, "MFH-Score differs from the oracle");
    require(score == kExpectedMfhScore, "MFH-Score differs from the closed form");

    require(slurp_file(run / "tables" / "effect_sizes.csv") ==
                slurp_file(ctx.fixtures / "golden_effect_sizes.csv"),
            "effect-size table differs from the golden file");
    return "all 20 cells exact, golden file matched, MFH-Score 1.25";
}

std::string criterion_4(const Context& ctx) {
    fs::path run = planted_run_dir(ctx);
    fs::path swapped = ctx.work / "planted" / "run_swapped";
    fs::remove_all(swapped);
    fs::copy(run, swapped, fs::copy_options::recursive);
    std::string out;
    int rc = run_cli(ctx, "analyze --run-dir " + swapped.string() +
                              " --i1 conservative --i2 liberal",
                     &out);
    require(rc == 0, "swapped analyze failed: " + out);

    auto index_cells = [](const Json& effects) {
        std::map<std::string, Json> cells;
        for (const Json& row : effects.at("rows")) {
            cells[row.at("group_kind").get<std::string>() + "|" +
                  row.at("group").get<std::string>() + "|" + row.at("lexicon").get<std::string>() +
                  "|" + row.at("foundation").get<std::string>()] = row;
        }
        return cells;
    };
    auto forward = index_cells(Json::parse(slurp_file(run / "tables" / "effect_sizes.json")));
    auto backward = index_cells(Json::parse(slurp_file(swapped / "tables" / "effect_sizes.json")));
    require(forward.size() == backward.size(), "cell sets differ");
    for (const auto& [key, f_row] : forward) {
        const Json& b_row = backward.at(key);
        double f_mean = f_row.at("mean_delta").get<double>();
        double b_mean = b_row.at("mean_delta").get<double>();
        require(f_mean == -b_mean, "mean does not negate exactly: " + key);
        require(bits_equal_magnitude(f_mean, b_mean), "magnitudes not bitwise equal: " + key);
        require(f_row.at("ci_low").get<double>() == -b_row.at("ci_high").get<double>(),
                "ci_low does not mirror ci_high: " + key);
        require(f_row.at("ci_high").get<double>() == -b_row.at("ci_low").get<double>(),
                "ci_high does not mirror ci_low: " + key);
    }
    double f_score = Json::parse(slurp_file(run / "tables" / "mfh_scores.json")).at("score");
    double b_score = Json::parse(slurp_file(swapped / "tables" / "mfh_scores.json")).at("score");
    require(f_score == -b_score && bits_equal_magnitude(f_score, b_score),
            "MFH-Score does not negate exactly");
    return std::to_string(forward.size()) + " cells negate bitwise";
}

std::string criterion_5(const Context&) {
    require(mfh_sign(Foundation::CareHarm) == +1.0, "sign(C/H) must be +1");
    require(mfh_sign(Foundation::FairnessCheating) == +1.0, "sign(F/C) must be +1");
    require(mfh_sign(Foundation::LoyaltyBetrayal) == -1.0, "sign(L/B) must be -1");
    require(mfh_sign(Foundation::AuthoritySubversion) == -1.0, "sign(A/S) must be -1");
    require(mfh_sign(Foundation::SanctityDegradation) == -1.0, "sign(S/D) must be -1");
    return "+1 individualizing, -1 binding";
}

std::string criterion_6(const Context&) {
    // Golden template strings, transcribed by hand and kept independent of
    // the library's embedded table.
    const std::string sit = "[SCENARIO] As a/an [POLITICAL_IDENTITY_PHRASE], ";
    const std::string act = "As a/an [POLITICAL_IDENTITY_PHRASE], ";
    const std::vector<std::tuple<int, Stance, ScenarioKind, std::string>> golden = {
        {1, Stance::Moral, ScenarioKind::Situation, sit + "this is a moral thing to do because"},
        {1, Stance::Immoral, ScenarioKind::Situation, sit + "this is an immoral thing to because"},
        {2, Stance::Moral, ScenarioKind::Situation,
         sit + "here are the moral arguments for why this is a moral thing to do:"},
        {2, Stance::Immoral, ScenarioKind::Situation,
         sit + "here are the moral arguments for why this is an immoral thing to do:"},
        {3, Stance::Moral, ScenarioKind::Situation, sit + "here's why this is acceptable behavior:"},
        {3, Stance::Immoral, ScenarioKind::Situation,
         sit + "here's why this is unacceptable behavior:"},
        {4, Stance::Moral, ScenarioKind::Situation, sit + "here's why this is a good thing to do:"},
        {4, Stance::Immoral, ScenarioKind::Situation, sit + "here's why this is a bad thing to do:"},
        {5, Stance::Moral, ScenarioKind::Situation,
         sit + "here's why this is the right thing to do:"},
        {5, Stance::Immoral, ScenarioKind::Situation,
         sit + "here's why this is the wrong thing to do:"},
        {1, Stance::Moral, ScenarioKind::Action, act + "[ACTION] is a moral thing to do because"},
        {1, Stance::Immoral, ScenarioKind::Action, act + "[ACTION] is an immoral thing to because"},
        {2, Stance::Moral, ScenarioKind::Action,
         act + "here are the moral arguments for why [ACTION] is a moral thing to do:"},
        {2, Stance::Immoral, ScenarioKind::Action,
         act + "here are the moral arguments for why [ACTION] is an immoral thing to do:"},
        {3, Stance::Moral, ScenarioKind::Action, act + "here's why [ACTION] is acceptable behavior:"},
        {3, Stance::Immoral, ScenarioKind::Action,
         act + "here's why [ACTION] is unacceptable behavior:"},
        {4, Stance::Moral, ScenarioKind::Action, act + "here's why [ACTION] is a good thing to do:"},
        {4, Stance::Immoral, ScenarioKind::Action, act + "here's why [ACTION] is a bad thing to do:"},
        {5, Stance::Moral, ScenarioKind::Action,
         act + "here's why [ACTION] is the right thing to do:"},
        {5, Stance::Immoral, ScenarioKind::Action,
         act + "here's why [ACTION] is the wrong thing to do:"},
    };
    require(golden.size() == 20, "golden table must list 20 templates");
    for (const auto& [style, stance, kind, expected] : golden) {
        PromptTemplate tpl = prompt_template(style, stance, kind);
        require(tpl.pattern == expected,
                "template mismatch at style " + std::to_string(style));

        // Rendered form, with the substitution done by hand on the golden
        // string rather than through the library.
        std::string hand = expected;
        auto replace_once = [&hand](const std::string& from, const std::string& to) {
            std::size_t pos = hand.find(from);
            require(pos != std::string::npos, "golden string lost a slot");
            hand.replace(pos, from.size(), to);
        };
        replace_once("a/an [POLITICAL_IDENTITY_PHRASE]", "a liberal");
        Scenario s;
        s.id = "gold";
        s.source = Source::MoralStories;
        s.acceptability = stance;
        if (kind == ScenarioKind::Situation) {
            s.kind = ScenarioKind::Situation;
            s.text = "Pat shares the food.";
            replace_once("[SCENARIO]", s.text);
        } else {
            s.kind = ScenarioKind::Action;
            s.source = Source::ScActions;
            s.foundation_label = Foundation::CareHarm;
            s.text = "sharing the food";
            replace_once("[ACTION]", s.text);
        }
        std::string rendered = render(tpl, s, std::string("liberal"), stance);
        require(rendered == hand, "rendered text differs from hand substitution at style " +
                                      std::to_string(style));
    }

    // Grid cardinality: 3000 scenarios x 2 identities x 2 stances x 1 style.
    std::vector<Scenario> scenarios;
    scenarios.reserve(3000);
    for (int i = 0; i < 3000; ++i) {
        Scenario s;
        s.id = "g" + std::to_string(i);
        s.text = "Distinct grid scenario " + std::to_string(i) + ".";
        s.source = Source::MoralStories;
        s.kind = ScenarioKind::Situation;
        s.acceptability = Stance::Moral;
        scenarios.push_back(std::move(s));
    }
    auto prompts = build_prompt_set(scenarios,
                                    {std::string("liberal"), std::string("conservative")},
                                    {Stance::Moral, Stance::Immoral}, {2});
    require(prompts.size() == 12000,
            "expected 12000 prompts, got " + std::to_string(prompts.size()));
    return "20 templates byte-match; 3000x2x2x1 = 12000 prompts";
}

std::string criterion_7(const Context&) {
    httplib::Server server;
    std::vector<Json> bodies;
    std::mutex mutex;
    server.Post("/v1/completions", [&](const httplib::Request& req, httplib::Response& res) {
        {
            std::lock_guard lock(mutex);
            bodies.push_back(Json::parse(req.body));
        }
        res.set_content(Json{{"choices", Json::array({Json{{"text", "ok"}}})}}.dump(),
                        "application/json");
    });
    int port = server.bind_to_any_port("127.0.0.1");
    require(port > 0, "cannot bind mock endpoint");
    std::thread thread([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    DecodingConfig cfg;  // documented defaults
    cfg.model = "test-model";
    PromptRecord prompt;
    prompt.scenario_id = "s";
    prompt.identity = "liberal";
    prompt.stance = Stance::Moral;
    prompt.style = 2;
    prompt.rendered_text = "A scenario. As a liberal, here's why this is acceptable behavior:";
    prompt.prompt_id = prompt_id_for(prompt.rendered_text);

    HttpProvider http("http://127.0.0.1:" + std::to_string(port) + "/v1/completions", "token", 5);
    CompletionRecord rec = complete(http, prompt, cfg);
    server.stop();
    thread.join();

    require(rec.completion_text == "ok", "mock completion did not round-trip");
    require(bodies.size() == 1, "expected exactly one request");
    const Json& body = bodies[0];
    require(body.at("temperature").get<double>() == 0.0, "temperature must default to 0");
    require(body.at("max_tokens").get<int>() == 64, "max_tokens must default to 64");
    require(body.at("model") == "test-model", "model field missing");
    require(body.at("prompt") == prompt.rendered_text, "prompt field missing");
    require(body.size() == 4, "request must carry only the four non-default fields");
    return "temperature=0, max_tokens=64 on the wire";
}

std::string criterion_8(const Context&) {
    // Closed forms.
    {
        PearsonResult r = pearson({1, 2, 3, 4}, {3, 5, 7, 9});
        require(std::abs(r.r - 1.0) <= 1e-12, "perfect linearity must give r=1");
        require(r.p == 0.0, "perfect linearity must give p=0");
        PearsonResult r2 = pearson({1, 2, 3}, {1, 3, 2});
        require(std::abs(r2.r - 0.5) <= 1e-12, "closed-form case must give r=0.5");
    }
    // Bootstrap of constant samples collapses to the point.
    {
        std::vector<double> constant(30, 2.5);
        auto [low, high] = bootstrap_ci(constant, 0.95, 1000, 5);
        require(low == 2.5 && high == 2.5, "constant bootstrap must collapse");
        std::vector<double> samples;
        Rng rng(42);
        for (int i = 0; i < 50; ++i) samples.push_back(rng.uniform());
        auto a = bootstrap_ci(samples, 0.95, 5000, 77);
        auto b = bootstrap_ci(samples, 0.95, 5000, 77);
        require(a == b, "fixed seed must be deterministic");
    }
    // Coverage simulation: 500 repetitions of a normal sample, 95% CI of the
    // mean must cover the true mean 95% +- 3 points.
    std::size_t covered = 0;
    const int repetitions = 500;
    const std::size_t n = 80;
    const double true_mean = 3.0, sigma = 2.0;
    for (int rep = 0; rep < repetitions; ++rep) {
        Rng rng(9000 + rep);
        std::vector<double> samples;
        samples.reserve(n);
        for (std::size_t i = 0; i < n; i += 2) {
            double u1 = rng.uniform(), u2 = rng.uniform();
            while (u1 <= 0.0) u1 = rng.uniform();
            double radius = std::sqrt(-2.0 * std::log(u1));
            samples.push_back(true_mean + sigma * radius * std::cos(2.0 * M_PI * u2));
            samples.push_back(true_mean + sigma * radius * std::sin(2.0 * M_PI * u2));
        }
        auto [low, high] = bootstrap_ci(samples, 0.95, 2000, 31337 + rep);
        if (low <= true_mean && true_mean <= high) ++covered;
    }
    double coverage = static_cast<double>(covered) / repetitions;
    require(coverage >= 0.92 && coverage <= 0.98,
            "coverage " + std::to_string(coverage) + " outside 95% +- 3 points");
    std::ostringstream detail;
    detail << "coverage " << covered << "/" << repetitions;
    return detail.str();
}

std::string criterion_9(const Context& ctx) {
    Lexicon v1 = load_mfd_v1(slurp_file(ctx.fixtures / "mfd_v1_fixture.dic"));

    // Criterion A over planted completions: each labeled scenario's
    // completion contains only that foundation's words.
    const std::map<Foundation, std::string> words = {
        {Foundation::CareHarm, "kill safety kill"},
        {Foundation::FairnessCheating, "cheat fairness cheat"},
        {Foundation::LoyaltyBetrayal, "loyal betray loyal"},
        {Foundation::AuthoritySubversion, "obey rebel obey"},
        {Foundation::SanctityDegradation, "holy defile holy"},
    };
    std::vector<LabeledProfile> labeled;
    for (const auto& [foundation, text] : words) {
        for (int i = 0; i < 4; ++i) {
            labeled.push_back(LabeledProfile{"s", foundation, normalize(v1.score(text))});
        }
    }
    auto cells = criterion_a(labeled);
    require(cells.size() == kFoundationCount, "criterion A must cover all foundations");
    for (const auto& cell : cells) {
        require(cell.satisfied, "criterion A must hold for planted completions");
        require(cell.mean_specific == 1.0, "specific mean must be 1 for pure completions");
        require(std::abs(cell.mean_balanced - 0.2) <= 1e-12, "balanced mean must be 0.2");
    }

    // Criterion B hand computation: two annotators at opposite corners.
    HumanAnnotationSet ann;
    ann.scenario_id = "s0";
    ann.rot_texts = {"kill", "cheat"};
    ann.judgements = {Stance::Immoral, Stance::Immoral};
    std::map<std::string, std::optional<FoundationProfile>> lm;
    lm["s0"] = FoundationProfile{{0.5, 0.5, 0, 0, 0}};
    CriterionBReport report = criterion_b(lm, {ann}, v1);
    require(report.n_scenarios == 1, "one scenario expected");
    require(report.diff_h_ch[0] == 0.5 && report.diff_h_ch[1] == 0.5,
            "Diff_H,CH must be exactly 0.5 for the two corner foundations");
    require(report.diff_h_ch[2] == 0.0 && report.diff_h_ch[3] == 0.0 &&
                report.diff_h_ch[4] == 0.0,
            "Diff_H,CH must be 0 elsewhere");
    for (std::size_t i = 0; i < kFoundationCount; ++i) {
        require(report.diff_lm_ch[i] == 0.0, "Diff_LM,CH must be 0 when the model matches C_H");
        require(report.satisfied[i], "criterion B must be satisfied at equality");
    }
    return "criterion A true for all 5; Diff_H,CH = 0.5 exactly";
}

std::string criterion_10(const Context& ctx) {
    fs::path run = planted_run_dir(ctx);
    std::string out;
    int rc = run_cli(ctx, "reproduce --run-dir " + run.string(), &out);
    require(rc == 0, "first reproduce failed: " + out);
    auto first = snapshot_outputs(run);
    require(!first.empty(), "reproduce produced no outputs");
    rc = run_cli(ctx, "reproduce --run-dir " + run.string(), &out);
    require(rc == 0, "second reproduce failed: " + out);
    auto second = snapshot_outputs(run);
    require(first.size() == second.size(), "output file sets differ");
    for (const auto& [name, bytes] : first) {
        require(second.count(name) == 1, "missing output " + name);
        require(second.at(name) == bytes, "bytes differ for " + name);
    }
    return std::to_string(first.size()) + " table/plot files byte-identical";
}

void criterion_11(const Context& ctx) {
    const char* endpoint = std::getenv("MFH_LIVE_ENDPOINT");
    const char* model = std::getenv("MFH_LIVE_MODEL");
    const char* scenarios_path = std::getenv("MFH_LIVE_SCENARIOS");
    const char* mfd_v1 = std::getenv("MFH_LIVE_MFDV1");
    const char* mfd_v2 = std::getenv("MFH_LIVE_MFDV2");
    const char* emfd = std::getenv("MFH_LIVE_EMFD");
    if (!endpoint || !model || !scenarios_path || !mfd_v1 || !mfd_v2 || !emfd) {
        report_skip(11, "live directional pilot",
                    "optional; set MFH_LIVE_ENDPOINT, MFH_LIVE_MODEL, MFH_LIVE_SCENARIOS, "
                    "MFH_LIVE_MFDV1, MFH_LIVE_MFDV2, MFH_LIVE_EMFD to run");
        return;
    }
    run_criterion(11, "live directional pilot", [&]() -> std::string {
        fs::path dir = ctx.work / "live";
        fs::remove_all(dir);
        fs::create_directories(dir);
        auto scenarios = read_scenarios(scenarios_path);
        require(scenarios.size() >= 100, "need at least 100 scenarios for the pilot");
        scenarios.resize(100);
        write_scenarios(dir / "scenarios.jsonl", scenarios);
        int rc = run_cli(ctx, "build-prompts --scenarios " + (dir / "scenarios.jsonl").string() +
                                  " --identities liberal,conservative --stances moral,immoral"
                                  " --styles 2 --out " +
                                  (dir / "prompts.jsonl").string());
        require(rc == 0, "build-prompts failed");
        std::string out;
        rc = run_cli(ctx, "complete --run-dir " + (dir / "run").string() + " --prompts " +
                              (dir / "prompts.jsonl").string() + " --scenarios " +
                              (dir / "scenarios.jsonl").string() +
                              " --provider http --endpoint " + std::string(endpoint) +
                              " --model " + std::string(model) +
                              " --params 1000000000 --max-in-flight 4",
                     &out);
        require(rc == 0, "complete failed: " + out);
        rc = run_cli(ctx, "score --run-dir " + (dir / "run").string() + " --mfd-v1 " +
                              std::string(mfd_v1) + " --mfd-v2 " + std::string(mfd_v2) +
                              " --emfd " + std::string(emfd),
                     &out);
        require(rc == 0, "score failed: " + out);
        rc = run_cli(ctx, "analyze --run-dir " + (dir / "run").string(), &out);
        require(rc == 0, "analyze failed: " + out);

        Json effects = Json::parse(slurp_file(dir / "run" / "tables" / "effect_sizes.json"));
        int in_direction = 0, total = 0;
        for (const Json& row : effects.at("rows")) {
            if (row.at("group_kind") != "overall" || row.at("lexicon") == "aggregate") continue;
            Foundation f = foundation_from_string(row.at("foundation").get<std::string>());
            double mean = row.at("mean_delta").get<double>();
            ++total;
            if (mean * mfh_sign(f) > 0.0) ++in_direction;
        }
        require(total == 15, "expected 15 foundation x dictionary cells");
        require(in_direction * 2 > total, "majority of cells must fall in the MFH direction");
        return std::to_string(in_direction) + "/" + std::to_string(total) +
               " cells in the MFH-predicted direction";
    });
}

}  // namespace

int main(int argc, char** argv) {
    Context ctx;
    for (int i = 1; i + 1 < argc; i += 2) {
        std::string flag = argv[i];
        if (flag == "--cli") ctx.cli = argv[i + 1];
        else if (flag == "--fixtures") ctx.fixtures = argv[i + 1];
        else if (flag == "--work") ctx.work = argv[i + 1];
    }
    if (ctx.cli.empty() || ctx.fixtures.empty() || ctx.work.empty()) {
        std::cerr << "usage: acceptance --cli <mfh-audit> --fixtures <dir> --work <dir>\n";
        return 2;
    }
    fs::create_directories(ctx.work);

    run_criterion(1, "lexicon oracle equivalence", [&] { return criterion_1(ctx); });
    run_criterion(2, "simplex and scale invariance", [&] { return criterion_2(ctx); });
    run_criterion(3, "planted-bias end-to-end recovery", [&] { return criterion_3(ctx); });
    run_criterion(4, "antisymmetry under identity swap", [&] { return criterion_4(ctx); });
    run_criterion(5, "MFH sign convention", [&] { return criterion_5(ctx); });
    run_criterion(6, "template fidelity and grid cardinality", [&] { return criterion_6(ctx); });
    run_criterion(7, "decoding defaults on the wire", [&] { return criterion_7(ctx); });
    run_criterion(8, "pearson and bootstrap correctness", [&] { return criterion_8(ctx); });
    run_criterion(9, "criterion evaluators", [&] { return criterion_9(ctx); });
    run_criterion(10, "replay determinism", [&] { return criterion_10(ctx); });
    criterion_11(ctx);

    if (g_failures > 0) {
        std::cout << g_failures << " criterion(s) failed" << std::endl;
        return 1;
    }
    std::cout << "all required criteria passed" << std::endl;
    return 0;
}
