#pragma once

// Completion gateway: obtains model completions from an OpenAI-compatible
// completions endpoint, a deterministic replay cache, or a stub, with
// bounded-concurrency batching and append-only persistence. The replay cache
// is the reproducibility boundary; the live provider is not.

#include <atomic>
#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "mfh/digest.hpp"
#include "mfh/errors.hpp"
#include "mfh/prompting.hpp"
#include "mfh/records.hpp"

namespace mfh {

struct DecodingConfig {
    double temperature = 0.0;  // greedy decoding for reproducibility
    int max_tokens = 64;
    std::string model;
};

// Cache key: any change to model, prompt text, temperature, or max_tokens
// yields a distinct digest.
inline std::string request_digest(const DecodingConfig& cfg, std::string_view prompt_text) {
    Json canonical{{"max_tokens", cfg.max_tokens},
                   {"model", cfg.model},
                   {"prompt", std::string(prompt_text)},
                   {"temperature", cfg.temperature}};
    return content_digest(canonical.dump());
}

enum class ProviderKind { Http, Replay, Stub };

inline std::string_view to_string(ProviderKind k) {
    switch (k) {
        case ProviderKind::Http: return "http";
        case ProviderKind::Replay: return "replay";
        case ProviderKind::Stub: return "stub";
    }
    return "?";
}

inline std::optional<ProviderKind> parse_provider_kind(std::string_view s) {
    if (s == "http") return ProviderKind::Http;
    if (s == "replay") return ProviderKind::Replay;
    if (s == "stub") return ProviderKind::Stub;
    return std::nullopt;
}

struct CompletionRecord {
    std::string prompt_id;
    std::string model;
    std::string completion_text;  // may legitimately be empty
    ProviderKind provider = ProviderKind::Stub;
    std::string created_at;
    std::string request_digest;
};

inline Json to_json(const CompletionRecord& r) {
    return Json{{"prompt_id", r.prompt_id},
                {"model", r.model},
                {"completion_text", r.completion_text},
                {"provider", to_string(r.provider)},
                {"created_at", r.created_at},
                {"request_digest", r.request_digest}};
}

inline CompletionRecord completion_from_json(const Json& j) {
    CompletionRecord r;
    r.prompt_id = j.at("prompt_id").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.completion_text = j.at("completion_text").get<std::string>();
    auto kind = parse_provider_kind(j.at("provider").get<std::string>());
    if (!kind) throw ValidationError("unknown provider in completion record: " + j.dump());
    r.provider = *kind;
    r.created_at = j.at("created_at").get<std::string>();
    r.request_digest = j.at("request_digest").get<std::string>();
    return r;
}

inline std::string utc_timestamp(std::time_t t = std::time(nullptr)) {
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------------------
// Append-only persistence: line-delimited records plus a sidecar digest
// index. Records are immutable once written; a partial trailing line from an
// interrupted run is ignored on load and overwritten by the next append.
class CompletionStore {
public:
    CompletionStore() = default;

    explicit CompletionStore(std::filesystem::path path) : path_(std::move(path)) { load(); }

    const std::filesystem::path& path() const { return path_; }

    bool has(const std::string& digest) const {
        std::lock_guard lock(mutex_);
        return by_digest_.count(digest) > 0;
    }

    std::optional<CompletionRecord> get(const std::string& digest) const {
        std::lock_guard lock(mutex_);
        auto it = by_digest_.find(digest);
        if (it == by_digest_.end()) return std::nullopt;
        return records_[it->second];
    }

    // Returns false (and writes nothing) when the digest is already stored.
    bool append(const CompletionRecord& record) {
        std::lock_guard lock(mutex_);
        if (by_digest_.count(record.request_digest)) return false;
        if (!path_.empty()) {
            if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
            if (truncate_to_) {
                std::filesystem::resize_file(path_, *truncate_to_);
                truncate_to_.reset();
            }
            std::ofstream out(path_, std::ios::binary | std::ios::app);
            if (!out) throw Error("cannot append to completion store: " + path_.string());
            if (needs_newline_) {
                out << '\n';
                needs_newline_ = false;
            }
            out << to_json(record).dump() << '\n';
            out.flush();
            if (!out) throw Error("completion store write failed: " + path_.string());
            std::ofstream idx(index_path(), std::ios::binary | std::ios::app);
            if (idx) idx << record.request_digest << '\n';
        }
        by_digest_.emplace(record.request_digest, records_.size());
        records_.push_back(record);
        return true;
    }

    std::vector<CompletionRecord> records() const {
        std::lock_guard lock(mutex_);
        return records_;
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return records_.size();
    }

private:
    std::filesystem::path index_path() const {
        return path_.string() + ".idx";
    }

    void load() {
        records_.clear();
        by_digest_.clear();
        truncate_to_.reset();
        needs_newline_ = false;
        if (path_.empty() || !std::filesystem::exists(path_)) return;
        std::string bytes = slurp_file(path_);
        std::size_t start = 0;
        while (start < bytes.size()) {
            std::size_t line_start = start;
            std::size_t end = bytes.find('\n', start);
            bool terminated = end != std::string::npos;
            std::string line =
                terminated ? bytes.substr(start, end - start) : bytes.substr(start);
            start = terminated ? end + 1 : bytes.size();
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            CompletionRecord rec;
            try {
                rec = completion_from_json(Json::parse(line));
            } catch (const std::exception&) {
                // A malformed interior line means real corruption; a malformed
                // final line is an interrupted write, dropped and truncated
                // away before the next append.
                if (start < bytes.size()) {
                    throw Error("corrupt completion store: " + path_.string());
                }
                truncate_to_ = line_start;
                break;
            }
            if (!terminated) needs_newline_ = true;  // valid record, missing final newline
            by_digest_.emplace(rec.request_digest, records_.size());
            records_.push_back(std::move(rec));
        }
        rebuild_index_if_stale();
    }

    void rebuild_index_if_stale() {
        if (path_.empty()) return;
        std::string expected;
        for (const auto& r : records_) expected += r.request_digest + "\n";
        std::string actual;
        if (std::filesystem::exists(index_path())) actual = slurp_file(index_path());
        if (actual != expected) write_file(index_path(), expected);
    }

    std::filesystem::path path_;
    mutable std::mutex mutex_;
    std::vector<CompletionRecord> records_;
    std::map<std::string, std::size_t> by_digest_;
    std::optional<std::uintmax_t> truncate_to_;
    bool needs_newline_ = false;
};

// ---------------------------------------------------------------------------
// Providers

class CompletionProvider {
public:
    virtual ~CompletionProvider() = default;
    virtual ProviderKind kind() const = 0;
    virtual CompletionRecord complete(const PromptRecord& prompt, const DecodingConfig& cfg) = 0;
};

inline CompletionRecord complete(CompletionProvider& provider, const PromptRecord& prompt,
                                 const DecodingConfig& cfg) {
    return provider.complete(prompt, cfg);
}

struct RetryPolicy {
    int max_attempts = 5;
    std::chrono::milliseconds base_delay{1000};
    double factor = 2.0;
};

struct HttpEndpoint {
    std::string base;  // scheme://host[:port]
    std::string path;  // /v1/completions
};

inline HttpEndpoint split_endpoint_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos) throw ConfigError("endpoint URL needs a scheme: " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/v1/completions"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

// Returns completions from a live completions-protocol endpoint. Requests
// carry exactly model, prompt, temperature, and max_tokens; every other
// protocol field is left at its documented default. Rate limits and server
// errors are retried with exponential backoff; other client errors fail fast.
class HttpProvider final : public CompletionProvider {
public:
    HttpProvider(std::string endpoint_url, std::string api_key, int timeout_s = 60,
                 RetryPolicy retry = {})
        : endpoint_(split_endpoint_url(endpoint_url)),
          api_key_(std::move(api_key)),
          timeout_s_(timeout_s),
          retry_(retry) {}

    ProviderKind kind() const override { return ProviderKind::Http; }

    // Tests inject a no-op sleep.
    void set_sleep_fn(std::function<void(std::chrono::milliseconds)> fn) { sleep_ = std::move(fn); }

    static Json request_body(const PromptRecord& prompt, const DecodingConfig& cfg) {
        return Json{{"model", cfg.model},
                    {"prompt", prompt.rendered_text},
                    {"temperature", cfg.temperature},
                    {"max_tokens", cfg.max_tokens}};
    }

    CompletionRecord complete(const PromptRecord& prompt, const DecodingConfig& cfg) override;

private:
    HttpEndpoint endpoint_;
    std::string api_key_;
    int timeout_s_;
    RetryPolicy retry_;
    std::function<void(std::chrono::milliseconds)> sleep_ = [](std::chrono::milliseconds d) {
        std::this_thread::sleep_for(d);
    };
};

// Serves previously persisted completions; a miss is a hard error naming the
// digest so interrupted runs surface exactly what is missing.
class ReplayProvider final : public CompletionProvider {
public:
    explicit ReplayProvider(const CompletionStore& store) : store_(store) {}

    ProviderKind kind() const override { return ProviderKind::Replay; }

    CompletionRecord complete(const PromptRecord& prompt, const DecodingConfig& cfg) override {
        std::string digest = request_digest(cfg, prompt.rendered_text);
        if (auto rec = store_.get(digest)) return *rec;
        throw CacheMissError(digest);
    }

private:
    const CompletionStore& store_;
};

// Deterministic offline provider for tests and fixture runs. Resolution
// order: exact digest mapping, then first matching substring rule, then the
// default text.
class StubProvider final : public CompletionProvider {
public:
    struct Rule {
        std::string contains;
        std::string text;
    };

    StubProvider() = default;

    explicit StubProvider(std::map<std::string, std::string> digest_to_text)
        : digest_map_(std::move(digest_to_text)) {}

    ProviderKind kind() const override { return ProviderKind::Stub; }

    void add_digest_mapping(std::string digest, std::string text) {
        digest_map_[std::move(digest)] = std::move(text);
    }
    void add_rule(std::string contains, std::string text) {
        rules_.push_back({std::move(contains), std::move(text)});
    }
    void set_default_text(std::string text) { default_text_ = std::move(text); }

    std::size_t calls() const { return calls_.load(); }

    CompletionRecord complete(const PromptRecord& prompt, const DecodingConfig& cfg) override {
        calls_.fetch_add(1);
        std::string digest = request_digest(cfg, prompt.rendered_text);
        CompletionRecord rec;
        rec.prompt_id = prompt.prompt_id;
        rec.model = cfg.model;
        rec.provider = ProviderKind::Stub;
        rec.created_at = utc_timestamp();
        rec.request_digest = digest;
        if (auto it = digest_map_.find(digest); it != digest_map_.end()) {
            rec.completion_text = it->second;
            return rec;
        }
        for (const Rule& rule : rules_) {
            if (prompt.rendered_text.find(rule.contains) != std::string::npos) {
                rec.completion_text = rule.text;
                return rec;
            }
        }
        if (default_text_) {
            rec.completion_text = *default_text_;
            return rec;
        }
        throw ValidationError("stub provider has no mapping for digest " + digest);
    }

private:
    std::map<std::string, std::string> digest_map_;
    std::vector<Rule> rules_;
    std::optional<std::string> default_text_;
    std::atomic<std::size_t> calls_{0};
};

inline CompletionRecord HttpProvider::complete(const PromptRecord& prompt,
                                               const DecodingConfig& cfg) {
    const std::string payload = request_body(prompt, cfg).dump();
    std::string last_error;
    for (int attempt = 1; attempt <= retry_.max_attempts; ++attempt) {
        if (attempt > 1) {
            auto delay = std::chrono::milliseconds(static_cast<long long>(
                static_cast<double>(retry_.base_delay.count()) *
                std::pow(retry_.factor, attempt - 2)));
            sleep_(delay);
        }
        httplib::Client client(endpoint_.base);
        client.set_connection_timeout(timeout_s_, 0);
        client.set_read_timeout(timeout_s_, 0);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        auto res = client.Post(endpoint_.path, headers, payload, "application/json");
        if (!res) {
            last_error = "transport error: " + httplib::to_string(res.error());
            continue;
        }
        if (res->status == 429 || res->status >= 500) {
            last_error = "endpoint returned status " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw TransportError("completions endpoint returned status " +
                                     std::to_string(res->status) + ": " + res->body,
                                 /*retriable=*/false);
        }
        std::string text;
        try {
            Json response = Json::parse(res->body);
            text = response.at("choices").at(0).at("text").get<std::string>();
        } catch (const std::exception& e) {
            throw TransportError(std::string("malformed completions response: ") + e.what(),
                                 /*retriable=*/false);
        }
        CompletionRecord rec;
        rec.prompt_id = prompt.prompt_id;
        rec.model = cfg.model;
        rec.completion_text = std::move(text);
        rec.provider = ProviderKind::Http;
        rec.created_at = utc_timestamp();
        rec.request_digest = request_digest(cfg, prompt.rendered_text);
        return rec;
    }
    throw TransportError("completions request failed after " +
                             std::to_string(retry_.max_attempts) + " attempts: " + last_error,
                         /*retriable=*/true);
}

// ---------------------------------------------------------------------------
// Batch runner: one record per prompt, results in input order, records
// persisted append-only as they arrive. Digests already in the store are
// served from it without touching the provider, which makes re-runs
// idempotent: a completed batch issues zero new requests.
inline std::vector<CompletionRecord> run_batch(const std::vector<PromptRecord>& prompts,
                                               CompletionProvider& provider,
                                               const DecodingConfig& cfg, CompletionStore& store,
                                               int max_in_flight = 1) {
    if (max_in_flight < 1) throw ValidationError("max_in_flight must be at least 1");

    std::vector<CompletionRecord> results(prompts.size());
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < prompts.size(); ++i) {
        std::string digest = request_digest(cfg, prompts[i].rendered_text);
        if (auto cached = store.get(digest)) {
            results[i] = *cached;
        } else {
            todo.push_back(i);
        }
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto worker = [&] {
        while (!failed.load()) {
            std::size_t slot = next.fetch_add(1);
            if (slot >= todo.size()) return;
            std::size_t i = todo[slot];
            try {
                CompletionRecord rec = provider.complete(prompts[i], cfg);
                store.append(rec);
                results[i] = std::move(rec);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true);
                return;
            }
        }
    };

    std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(max_in_flight), todo.size());
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_workers);
        for (std::size_t i = 0; i < n_workers; ++i) threads.emplace_back(worker);
        for (auto& t : threads) t.join();  // drains in-flight requests before rethrow
    }
    if (first_error) std::rethrow_exception(first_error);
    return results;
}

}  // namespace mfh
