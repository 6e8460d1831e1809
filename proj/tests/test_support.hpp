#pragma once

// Shared helpers for the test suites: fixture loading, independent scoring
// oracle, random generators. The oracle here deliberately ignores the
// library's compiled match index and scans entries linearly; tests compare
// the two paths for exact agreement.

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "mfh/lexicon.hpp"
#include "mfh/records.hpp"
#include "mfh/rng.hpp"

namespace testsupport {

inline std::filesystem::path fixtures_dir() {
    if (const char* env = std::getenv("MFH_FIXTURES_DIR")) return env;
    return std::filesystem::path(__FILE__).parent_path() / "fixtures";
}

inline mfh::Lexicon load_fixture_mfd_v1() {
    return mfh::load_mfd_v1(mfh::slurp_file(fixtures_dir() / "mfd_v1_fixture.dic"));
}

inline mfh::Lexicon load_fixture_mfd_v2() {
    return mfh::load_mfd_v2(mfh::slurp_file(fixtures_dir() / "mfd_v2_fixture.dic"));
}

inline mfh::Lexicon load_fixture_emfd() {
    return mfh::load_emfd(mfh::slurp_file(fixtures_dir() / "emfd_fixture.csv"));
}

// Naive per-token linear scan: for each token, collect every entry whose
// pattern matches (exact equality, or prefix-of for prefix entries), then
// pick the exact match if any, otherwise the longest prefix pattern.
inline mfh::RawScore naive_score(const mfh::Lexicon& lexicon, std::string_view text) {
    mfh::RawScore raw;
    for (const std::string& token : mfh::tokenize(text)) {
        ++raw.token_count;
        const mfh::LexiconEntry* best = nullptr;
        bool best_exact = false;
        for (const mfh::LexiconEntry& e : lexicon.entries()) {
            bool matches = e.match_kind == mfh::MatchKind::Exact
                               ? e.pattern == token
                               : token.size() >= e.pattern.size() &&
                                     token.compare(0, e.pattern.size(), e.pattern) == 0;
            if (!matches) continue;
            bool exact = e.match_kind == mfh::MatchKind::Exact;
            if (!best || (exact && !best_exact) ||
                (exact == best_exact && e.pattern.size() > best->pattern.size())) {
                best = &e;
                best_exact = exact;
            }
        }
        if (best) {
            ++raw.matched_token_count;
            for (std::size_t i = 0; i < mfh::kFoundationCount; ++i) {
                raw.weights[i] += best->weights[i];
            }
        }
    }
    return raw;
}

inline std::string random_word(mfh::Rng& rng, std::size_t min_len, std::size_t max_len) {
    std::size_t len = min_len + static_cast<std::size_t>(rng.bounded(max_len - min_len + 1));
    std::string w;
    for (std::size_t i = 0; i < len; ++i) {
        w.push_back(static_cast<char>('a' + rng.bounded(26)));
    }
    return w;
}

// A randomized lexicon exercising exact/prefix overlap, multi-foundation
// weights, and fractional eMFD-style weights.
inline mfh::Lexicon random_lexicon(mfh::Rng& rng, std::size_t n_entries) {
    std::vector<mfh::LexiconEntry> entries;
    std::set<std::pair<std::string, mfh::MatchKind>> seen;
    while (entries.size() < n_entries) {
        mfh::LexiconEntry e;
        e.pattern = random_word(rng, 2, 6);
        e.match_kind = rng.bounded(2) == 0 ? mfh::MatchKind::Exact : mfh::MatchKind::Prefix;
        if (!seen.insert({e.pattern, e.match_kind}).second) continue;
        bool any = false;
        for (std::size_t f = 0; f < mfh::kFoundationCount; ++f) {
            if (rng.bounded(3) == 0) {
                e.weights[f] = rng.bounded(2) == 0 ? 1.0 : rng.uniform();
                any = any || e.weights[f] > 0.0;
            }
        }
        if (!any) e.weights[rng.bounded(mfh::kFoundationCount)] = 1.0;
        entries.push_back(std::move(e));
    }
    return mfh::Lexicon(mfh::LexiconId::MfdV1, std::move(entries), "fixture");
}

// Token soup biased toward lexicon patterns (with random suffixes so prefix
// entries fire), plus noise words, digits, and punctuation.
inline std::string random_text(mfh::Rng& rng, const mfh::Lexicon& lexicon, std::size_t n_tokens) {
    std::string text;
    const auto& entries = lexicon.entries();
    for (std::size_t i = 0; i < n_tokens; ++i) {
        if (!text.empty()) text += rng.bounded(4) == 0 ? ", " : " ";
        switch (rng.bounded(4)) {
            case 0:
                text += entries[rng.bounded(entries.size())].pattern;
                break;
            case 1:
                text += entries[rng.bounded(entries.size())].pattern +
                        random_word(rng, 1, 3);
                break;
            case 2:
                text += random_word(rng, 2, 7);
                break;
            default:
                text += std::to_string(rng.bounded(100)) + random_word(rng, 2, 4);
                break;
        }
    }
    return text;
}

}  // namespace testsupport
