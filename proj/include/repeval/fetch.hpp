/// @file fetch.hpp
/// @brief Cited-URL retrieval with caching, politeness, and accessibility
/// classification. Network trouble becomes status values, never exceptions.

#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "repeval/common.hpp"

namespace repeval {

enum class FetchStatus { Ok, Dead, Blocked, Paywalled, NonExtractable, Timeout };
enum class AccessClass { Accessible, InaccessibleData, InaccessibleInfra };

const char* to_string(FetchStatus status);
std::optional<FetchStatus> fetch_status_from_string(const std::string& name);
const char* to_string(AccessClass access);

struct FetchRecord {
    std::string url;
    FetchStatus status = FetchStatus::Dead;
    std::optional<int> http_code;
    std::optional<std::string> extracted_text;  // non-empty iff status == Ok
    std::int64_t fetched_at_unix = 0;
    bool from_cache = false;
};

struct FetchPolicy {
    double timeout_s = 10.0;
    int max_retries = 1;
    double per_host_delay_s = 0.5;
    std::size_t max_body_bytes = 1 << 20;
    std::string cache_dir;  // empty disables the cache
    bool offline = false;   // cache-only; misses become status Timeout
    int max_concurrent = 4;
};

/// ok -> accessible; dead/blocked/paywalled/non_extractable -> data;
/// timeout -> infra.
AccessClass classify_accessibility(const FetchRecord& record);

/// Tag-stripping extraction with boilerplate (script/style/nav/...) removed
/// and basic entities decoded.
std::string html_to_text(std::string_view html);

/// Pure mapping from an HTTP response to a FetchRecord; the network path and
/// the unit tests share it. `content_type` may be empty (content sniffed).
FetchRecord classify_response(const std::string& url, int http_code,
                              const std::string& content_type, const std::string& body,
                              const FetchPolicy& policy);

class EvidenceFetcher {
public:
    explicit EvidenceFetcher(FetchPolicy policy);
    ~EvidenceFetcher();

    /// Cache, then (unless offline) network. Syntactically invalid URLs
    /// short-circuit to status Dead with no network activity.
    FetchRecord fetch(const std::string& url);

    const FetchPolicy& policy() const { return policy_; }

    /// Cache plumbing, exposed so runs can be preseeded and audited.
    static std::string cache_key(const std::string& url);
    std::string cache_path(const std::string& url) const;
    bool store_in_cache(const FetchRecord& record);
    std::optional<FetchRecord> load_from_cache(const std::string& url) const;

private:
    FetchRecord fetch_over_network(const std::string& url);

    FetchPolicy policy_;
    struct HostState;
    std::mutex hosts_mutex_;
    std::map<std::string, std::unique_ptr<HostState>> hosts_;
    std::unique_ptr<InflightGate> gate_;
};

/// JSON round-trip for the on-disk cache format (documented, stable).
std::string fetch_record_to_json(const FetchRecord& record);
std::optional<FetchRecord> fetch_record_from_json(const std::string& body);

}  // namespace repeval
