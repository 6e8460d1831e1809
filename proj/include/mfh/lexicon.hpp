#pragma once

// Moral-foundations lexicons: loading the three dictionary formats into one
// matchable representation, tokenizing text, and producing raw foundation
// scores and normalized foundation profiles.

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mfh/digest.hpp"
#include "mfh/errors.hpp"
#include "mfh/foundations.hpp"

namespace mfh {

enum class MatchKind { Exact, Prefix };

inline std::string_view to_string(MatchKind k) {
    return k == MatchKind::Exact ? "exact" : "prefix";
}

struct LexiconEntry {
    std::string pattern;  // lowercase, non-empty, no whitespace
    MatchKind match_kind = MatchKind::Exact;
    FoundationVec weights = zero_vec();  // all >= 0, at least one > 0
};

enum class LexiconId { MfdV1, MfdV2, Emfd };

inline std::string_view to_string(LexiconId id) {
    switch (id) {
        case LexiconId::MfdV1: return "mfd_v1";
        case LexiconId::MfdV2: return "mfd_v2";
        case LexiconId::Emfd: return "emfd";
    }
    return "?";
}

inline std::optional<LexiconId> parse_lexicon_id(std::string_view s) {
    if (s == "mfd_v1") return LexiconId::MfdV1;
    if (s == "mfd_v2") return LexiconId::MfdV2;
    if (s == "emfd") return LexiconId::Emfd;
    return std::nullopt;
}

struct RawScore {
    FoundationVec weights = zero_vec();
    std::size_t token_count = 0;
    std::size_t matched_token_count = 0;
};

struct FoundationProfile {
    FoundationVec p = zero_vec();  // simplex: sums to 1 within 1e-9

    double operator[](Foundation f) const { return p[index_of(f)]; }
};

namespace detail {

inline bool is_ascii_letter(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

inline char ascii_lower(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

}  // namespace detail

// Tokens are maximal runs of ASCII letters plus internal apostrophes,
// lowercased. Digits, punctuation, and non-ASCII bytes are separators.
inline std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (detail::is_ascii_letter(c)) {
            current.push_back(detail::ascii_lower(c));
        } else if (c == '\'' && !current.empty() && i + 1 < text.size() &&
                   detail::is_ascii_letter(text[i + 1])) {
            current.push_back('\'');
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

// Immutable after construction; scoring is pure, so a Lexicon may be shared
// freely across threads.
class Lexicon {
public:
    Lexicon(LexiconId id, std::vector<LexiconEntry> entries, std::string source_digest)
        : id_(id), entries_(std::move(entries)), source_digest_(std::move(source_digest)) {
        canonicalize_and_validate();
        build_index();
    }

    LexiconId id() const { return id_; }
    const std::vector<LexiconEntry>& entries() const { return entries_; }
    const std::string& source_digest() const { return source_digest_; }

    // Longest matching entry for a token, exact matches taking precedence
    // over prefix matches. At most one entry matches any token.
    const LexiconEntry* match(std::string_view token) const {
        if (auto it = exact_.find(std::string(token)); it != exact_.end()) {
            return &entries_[it->second];
        }
        for (std::size_t len = std::min(token.size(), max_prefix_len_); len >= 1; --len) {
            if (auto it = prefix_.find(std::string(token.substr(0, len))); it != prefix_.end()) {
                return &entries_[it->second];
            }
        }
        return nullptr;
    }

    RawScore score(std::string_view text) const {
        RawScore raw;
        for (const std::string& token : tokenize(text)) {
            ++raw.token_count;
            if (const LexiconEntry* e = match(token)) {
                ++raw.matched_token_count;
                for (std::size_t i = 0; i < kFoundationCount; ++i) raw.weights[i] += e->weights[i];
            }
        }
        return raw;
    }

private:
    void canonicalize_and_validate() {
        std::sort(entries_.begin(), entries_.end(), [](const LexiconEntry& a, const LexiconEntry& b) {
            if (a.pattern != b.pattern) return a.pattern < b.pattern;
            return a.match_kind < b.match_kind;
        });
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            const LexiconEntry& e = entries_[i];
            if (e.pattern.empty()) throw ValidationError("lexicon entry with empty pattern");
            for (char c : e.pattern) {
                if (std::isspace(static_cast<unsigned char>(c)) ||
                    (detail::is_ascii_letter(c) && c != detail::ascii_lower(c))) {
                    throw ValidationError("lexicon pattern must be lowercase without whitespace: '" +
                                          e.pattern + "'");
                }
            }
            bool any_positive = false;
            for (double w : e.weights) {
                if (w < 0.0) throw ValidationError("negative weight for pattern '" + e.pattern + "'");
                if (w > 0.0) any_positive = true;
            }
            if (!any_positive) {
                throw ValidationError("entry '" + e.pattern + "' has no positive foundation weight");
            }
            if (i > 0 && entries_[i - 1].pattern == e.pattern &&
                entries_[i - 1].match_kind == e.match_kind) {
                throw ValidationError("duplicate lexicon entry: '" + e.pattern + "'");
            }
            if (id_ == LexiconId::MfdV2) {
                if (e.match_kind != MatchKind::Exact) {
                    throw ValidationError("mfd_v2 entry '" + e.pattern + "' is not exact-match");
                }
                int positive = 0;
                for (double w : e.weights) positive += w > 0.0 ? 1 : 0;
                if (positive != 1) {
                    throw ValidationError("mfd_v2 entry '" + e.pattern +
                                          "' maps to more than one foundation");
                }
            }
        }
    }

    void build_index() {
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            const LexiconEntry& e = entries_[i];
            if (e.match_kind == MatchKind::Exact) {
                exact_.emplace(e.pattern, i);
            } else {
                prefix_.emplace(e.pattern, i);
                max_prefix_len_ = std::max(max_prefix_len_, e.pattern.size());
            }
        }
    }

    LexiconId id_;
    std::vector<LexiconEntry> entries_;
    std::string source_digest_;
    std::unordered_map<std::string, std::size_t> exact_;
    std::unordered_map<std::string, std::size_t> prefix_;
    std::size_t max_prefix_len_ = 0;
};

inline RawScore score(const Lexicon& lexicon, std::string_view text) {
    return lexicon.score(text);
}

// Normalizes a raw score into expression probabilities (share of the total
// foundation score).
// A zero total means no moral content was detected; that is a normal Absent
// value, not an error, and is excluded (and counted) downstream.
inline std::optional<FoundationProfile> normalize(const RawScore& raw) {
    double total = vec_sum(raw.weights);
    if (total <= 0.0) return std::nullopt;
    FoundationProfile profile;
    for (std::size_t i = 0; i < kFoundationCount; ++i) profile.p[i] = raw.weights[i] / total;
    return profile;
}

// ---------------------------------------------------------------------------
// LIWC-format loaders (MFDv1, MFDv2)

namespace detail {

enum class LiwcCategory { Foundation, MoralityGeneral };

struct LiwcCategoryInfo {
    LiwcCategory kind;
    Foundation foundation;  // meaningful only when kind == Foundation
};

// Category names vary across dictionary releases ("HarmVirtue", "care.virtue",
// "IngroupVice", ...). Matching is case-insensitive on the foundation stem;
// the vice/virtue split is irrelevant because valence is merged on load.
inline LiwcCategoryInfo classify_liwc_category(std::string_view name, std::size_t line_no) {
    std::string key;
    for (char c : name) {
        if (is_ascii_letter(c)) key.push_back(ascii_lower(c));
    }
    auto contains = [&key](std::string_view needle) {
        return key.find(needle) != std::string::npos;
    };
    if (contains("moralitygeneral") || contains("moralgeneral") || key == "general") {
        return {LiwcCategory::MoralityGeneral, Foundation::CareHarm};
    }
    if (contains("harm") || contains("care")) return {LiwcCategory::Foundation, Foundation::CareHarm};
    if (contains("fair") || contains("cheat") || contains("proportion")) {
        return {LiwcCategory::Foundation, Foundation::FairnessCheating};
    }
    if (contains("ingroup") || contains("loyal") || contains("betray")) {
        return {LiwcCategory::Foundation, Foundation::LoyaltyBetrayal};
    }
    if (contains("authority") || contains("subver")) {
        return {LiwcCategory::Foundation, Foundation::AuthoritySubversion};
    }
    if (contains("purity") || contains("sanctity") || contains("degrad")) {
        return {LiwcCategory::Foundation, Foundation::SanctityDegradation};
    }
    throw ParseError("unrecognized dictionary category name '" + std::string(name) + "'", line_no);
}

inline std::vector<std::string> split_whitespace(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') ++i;
        if (i > start) fields.emplace_back(line.substr(start, i - start));
    }
    return fields;
}

inline std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

struct LiwcStem {
    std::string pattern;
    MatchKind kind;
    std::array<bool, kFoundationCount> foundations{};
    bool morality_general = false;
};

// Shared LIWC ".dic" parse: '%'-delimited category header mapping integer ids
// to category names, then entry lines `<pattern> <id> [<id>...]`. A trailing
// '*' on a pattern denotes prefix match. Duplicate pattern lines merge.
inline std::vector<LiwcStem> parse_liwc(std::string_view bytes) {
    std::istringstream in{std::string(bytes)};
    std::string line;
    std::size_t line_no = 0;

    // Header open
    bool header_open = false;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (split_whitespace(line).empty()) continue;
        if (split_whitespace(line).size() == 1 && split_whitespace(line)[0] == "%") {
            header_open = true;
            break;
        }
        throw ParseError("expected '%' to open the category header", line_no);
    }
    if (!header_open) throw ParseError("missing category header", line_no);

    std::map<long, LiwcCategoryInfo> categories;
    bool header_closed = false;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        auto fields = split_whitespace(line);
        if (fields.empty()) continue;
        if (fields.size() == 1 && fields[0] == "%") {
            header_closed = true;
            break;
        }
        if (fields.size() != 2) throw ParseError("malformed category line", line_no);
        long id;
        try {
            std::size_t pos = 0;
            id = std::stol(fields[0], &pos);
            if (pos != fields[0].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw ParseError("category id is not an integer: '" + fields[0] + "'", line_no);
        }
        if (categories.count(id)) throw ParseError("duplicate category id " + fields[0], line_no);
        categories.emplace(id, classify_liwc_category(fields[1], line_no));
    }
    if (!header_closed) throw ParseError("category header not closed with '%'", line_no);

    std::map<std::pair<std::string, MatchKind>, LiwcStem> stems;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        auto fields = split_whitespace(line);
        if (fields.empty()) continue;
        if (fields.size() < 2) throw ParseError("entry line has no category ids", line_no);
        std::string pattern = fields[0];
        for (char& c : pattern) c = ascii_lower(c);
        MatchKind kind = MatchKind::Exact;
        if (!pattern.empty() && pattern.back() == '*') {
            pattern.pop_back();
            kind = MatchKind::Prefix;
        }
        if (pattern.empty()) throw ParseError("empty pattern", line_no);
        LiwcStem& stem = stems.try_emplace({pattern, kind}, LiwcStem{pattern, kind, {}, false})
                             .first->second;
        for (std::size_t i = 1; i < fields.size(); ++i) {
            long id;
            try {
                std::size_t pos = 0;
                id = std::stol(fields[i], &pos);
                if (pos != fields[i].size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw ParseError("category id is not an integer: '" + fields[i] + "'", line_no);
            }
            auto it = categories.find(id);
            if (it == categories.end()) {
                throw ParseError("unknown category id " + fields[i] + " in entry '" + pattern + "'",
                                 line_no);
            }
            if (it->second.kind == LiwcCategory::MoralityGeneral) {
                stem.morality_general = true;
            } else {
                stem.foundations[index_of(it->second.foundation)] = true;
            }
        }
    }
    if (stems.empty()) throw ParseError("empty lexicon");

    std::vector<LiwcStem> out;
    out.reserve(stems.size());
    for (auto& [key, stem] : stems) out.push_back(std::move(stem));
    return out;
}

inline std::vector<LexiconEntry> liwc_to_entries(const std::vector<LiwcStem>& stems) {
    std::vector<LexiconEntry> entries;
    for (const LiwcStem& stem : stems) {
        LexiconEntry e;
        e.pattern = stem.pattern;
        e.match_kind = stem.kind;
        bool any = false;
        // Vice and Virtue ids for the same foundation merge into weight 1; a
        // stem tagged with k distinct foundations contributes 1 to each.
        for (std::size_t i = 0; i < kFoundationCount; ++i) {
            if (stem.foundations[i]) {
                e.weights[i] = 1.0;
                any = true;
            }
        }
        if (!any) continue;  // MoralityGeneral-only stems carry no foundation signal
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw ParseError("empty lexicon");
    return entries;
}

}  // namespace detail

inline Lexicon load_mfd_v1(std::string_view file_bytes) {
    auto stems = detail::parse_liwc(file_bytes);
    return Lexicon(LexiconId::MfdV1, detail::liwc_to_entries(stems), sha256_hex(file_bytes));
}

inline Lexicon load_mfd_v2(std::string_view file_bytes) {
    auto stems = detail::parse_liwc(file_bytes);
    // Lexicon's constructor enforces the MFDv2 single-category, exact-match
    // properties and turns violations into validation errors.
    return Lexicon(LexiconId::MfdV2, detail::liwc_to_entries(stems), sha256_hex(file_bytes));
}

// ---------------------------------------------------------------------------
// eMFD loader

// Column naming varies across eMFD releases, so the mapping is configuration
// rather than guesswork. Defaults follow the published scoring file.
struct EmfdColumns {
    std::string word = "word";
    std::array<std::string, kFoundationCount> foundation_prob = {
        "care_p", "fairness_p", "loyalty_p", "authority_p", "sanctity_p"};
    char delimiter = ',';
};

namespace detail {

inline std::vector<std::string> split_delimited(std::string_view line, char delim) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
        } else if (c == '"' && field.empty()) {
            quoted = true;
        } else if (c == delim) {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field.push_back(c);
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

}  // namespace detail

inline Lexicon load_emfd(std::string_view file_bytes, const EmfdColumns& columns = {}) {
    std::istringstream in{std::string(file_bytes)};
    std::string line;
    std::size_t line_no = 0;

    if (!std::getline(in, line)) throw ParseError("empty lexicon");
    ++line_no;
    line = detail::strip_cr(line);
    auto header = detail::split_delimited(line, columns.delimiter);

    auto column_index = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) return i;
        }
        throw ParseError("missing column '" + name + "' in eMFD header", 1);
    };
    std::size_t word_col = column_index(columns.word);
    std::array<std::size_t, kFoundationCount> prob_cols{};
    for (std::size_t i = 0; i < kFoundationCount; ++i) {
        prob_cols[i] = column_index(columns.foundation_prob[i]);
    }

    std::vector<LexiconEntry> entries;
    std::unordered_map<std::string, std::size_t> seen;
    while (std::getline(in, line)) {
        ++line_no;
        line = detail::strip_cr(line);
        if (line.empty()) continue;
        auto fields = detail::split_delimited(line, columns.delimiter);
        if (fields.size() != header.size()) {
            throw ParseError("row has " + std::to_string(fields.size()) + " fields, header has " +
                                 std::to_string(header.size()),
                             line_no);
        }
        LexiconEntry e;
        e.pattern = fields[word_col];
        for (char& c : e.pattern) c = detail::ascii_lower(c);
        if (e.pattern.empty()) throw ParseError("empty word", line_no);
        if (!seen.emplace(e.pattern, line_no).second) {
            throw ValidationError("duplicate eMFD word '" + e.pattern + "'");
        }
        e.match_kind = MatchKind::Exact;
        bool any_positive = false;
        for (std::size_t i = 0; i < kFoundationCount; ++i) {
            const std::string& raw = fields[prob_cols[i]];
            double v;
            try {
                std::size_t pos = 0;
                v = std::stod(raw, &pos);
                if (pos != raw.size()) throw std::invalid_argument("");
            } catch (const std::exception&) {
                throw ParseError("non-numeric foundation score '" + raw + "' for word '" +
                                     e.pattern + "'",
                                 line_no);
            }
            if (v < 0.0 || v > 1.0) {
                throw ValidationError("foundation score " + raw + " out of [0,1] for word '" +
                                      e.pattern + "'");
            }
            e.weights[i] = v;
            any_positive = any_positive || v > 0.0;
        }
        // Sentiment columns (and any others) are ignored by construction.
        if (!any_positive) continue;  // an all-zero row can never contribute signal
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw ParseError("empty lexicon");
    return Lexicon(LexiconId::Emfd, std::move(entries), sha256_hex(file_bytes));
}

inline Lexicon load_lexicon(LexiconId id, std::string_view file_bytes,
                            const EmfdColumns& emfd_columns = {}) {
    switch (id) {
        case LexiconId::MfdV1: return load_mfd_v1(file_bytes);
        case LexiconId::MfdV2: return load_mfd_v2(file_bytes);
        case LexiconId::Emfd: return load_emfd(file_bytes, emfd_columns);
    }
    throw ValidationError("unknown lexicon id");
}

}  // namespace mfh
