#include "repeval/fetch.hpp"

#include <algorithm>
#include <cctype>
#include <condition_variable>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "repeval/report.hpp"
#include "repeval/text.hpp"

namespace fs = std::filesystem;

namespace repeval {

using nlohmann::json;

const char* to_string(FetchStatus status) {
    switch (status) {
        case FetchStatus::Ok: return "ok";
        case FetchStatus::Dead: return "dead";
        case FetchStatus::Blocked: return "blocked";
        case FetchStatus::Paywalled: return "paywalled";
        case FetchStatus::NonExtractable: return "non_extractable";
        case FetchStatus::Timeout: return "timeout";
    }
    return "unknown";
}

std::optional<FetchStatus> fetch_status_from_string(const std::string& name) {
    static const std::pair<const char*, FetchStatus> table[] = {
        {"ok", FetchStatus::Ok},
        {"dead", FetchStatus::Dead},
        {"blocked", FetchStatus::Blocked},
        {"paywalled", FetchStatus::Paywalled},
        {"non_extractable", FetchStatus::NonExtractable},
        {"timeout", FetchStatus::Timeout},
    };
    for (const auto& [key, value] : table)
        if (name == key) return value;
    return std::nullopt;
}

const char* to_string(AccessClass access) {
    switch (access) {
        case AccessClass::Accessible: return "accessible";
        case AccessClass::InaccessibleData: return "inaccessible_data";
        case AccessClass::InaccessibleInfra: return "inaccessible_infra";
    }
    return "unknown";
}

AccessClass classify_accessibility(const FetchRecord& record) {
    switch (record.status) {
        case FetchStatus::Ok: return AccessClass::Accessible;
        case FetchStatus::Timeout: return AccessClass::InaccessibleInfra;
        default: return AccessClass::InaccessibleData;
    }
}

// =============================================================================
// HTML text extraction
// =============================================================================

namespace {

// Elements whose entire content is boilerplate or non-text.
const char* kDropElements[] = {"script", "style",  "noscript", "nav",   "header",
                               "footer", "aside",  "template", "svg",   "iframe",
                               "form",   "button"};

void drop_element(std::string& html, const std::string& name) {
    std::string open = "<" + name;
    std::string close = "</" + name;
    std::string lower = to_lower(html);
    std::string out;
    out.reserve(html.size());
    size_t pos = 0;
    while (pos < html.size()) {
        size_t start = lower.find(open, pos);
        if (start == std::string::npos) {
            out.append(html, pos, std::string::npos);
            break;
        }
        bool tag_boundary = start + open.size() < lower.size() &&
                            (lower[start + open.size()] == '>' ||
                             std::isspace(static_cast<unsigned char>(lower[start + open.size()])));
        if (!tag_boundary) {  // e.g. <navigation> is not <nav>
            out.append(html, pos, start + open.size() - pos);
            pos = start + open.size();
            continue;
        }
        out.append(html, pos, start - pos);
        size_t end = lower.find(close, start);
        if (end == std::string::npos) break;  // unclosed: drop to EOF
        size_t gt = lower.find('>', end);
        pos = gt == std::string::npos ? html.size() : gt + 1;
    }
    html = std::move(out);
}

void decode_entities(std::string& text) {
    static const std::pair<const char*, const char*> entities[] = {
        {"&amp;", "&"}, {"&lt;", "<"},   {"&gt;", ">"},  {"&quot;", "\""},
        {"&#39;", "'"}, {"&apos;", "'"}, {"&nbsp;", " "},
    };
    for (const auto& [from, to] : entities) {
        size_t pos = 0;
        while ((pos = text.find(from, pos)) != std::string::npos) {
            text.replace(pos, std::char_traits<char>::length(from), to);
            pos += std::char_traits<char>::length(to);
        }
    }
}

}  // namespace

std::string html_to_text(std::string_view html_in) {
    std::string html(html_in);

    // Comments first, then boilerplate elements with their content.
    size_t pos = 0;
    while ((pos = html.find("<!--", pos)) != std::string::npos) {
        size_t end = html.find("-->", pos);
        if (end == std::string::npos) {
            html.erase(pos);
            break;
        }
        html.erase(pos, end - pos + 3);
    }
    for (const char* element : kDropElements) drop_element(html, element);

    // Block-level closers become newlines so sentences stay separated.
    std::string text;
    text.reserve(html.size());
    size_t i = 0;
    while (i < html.size()) {
        if (html[i] == '<') {
            size_t gt = html.find('>', i);
            if (gt == std::string::npos) break;
            std::string tag = to_lower(html.substr(i + 1, gt - i - 1));
            if (tag.rfind("br", 0) == 0 || tag.rfind("/p", 0) == 0 || tag.rfind("/div", 0) == 0 ||
                tag.rfind("/li", 0) == 0 || tag.rfind("/tr", 0) == 0 ||
                tag.rfind("/h", 0) == 0 || tag.rfind("p", 0) == 0)
                text.push_back('\n');
            i = gt + 1;
            continue;
        }
        text.push_back(html[i]);
        ++i;
    }
    decode_entities(text);

    // Collapse whitespace per line, drop blank lines.
    std::istringstream lines(text);
    std::string line, out;
    while (std::getline(lines, line)) {
        std::string collapsed = collapse_ws(line);
        if (collapsed.empty()) continue;
        if (!out.empty()) out.push_back('\n');
        out += collapsed;
    }
    return out;
}

// =============================================================================
// Response classification
// =============================================================================

namespace {

bool body_has_paywall_marker(const std::string& text) {
    static const char* markers[] = {"subscribe to continue", "subscription required",
                                    "purchase this article"};
    for (const char* marker : markers)
        if (contains_ci(text, marker)) return true;
    return false;
}

std::int64_t now_unix() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

}  // namespace

FetchRecord classify_response(const std::string& url, int http_code,
                              const std::string& content_type, const std::string& body,
                              const FetchPolicy& policy) {
    FetchRecord record;
    record.url = url;
    record.http_code = http_code;
    record.fetched_at_unix = now_unix();

    if (http_code == 401 || http_code == 403) {
        record.status = FetchStatus::Blocked;
        return record;
    }
    if (http_code == 402) {
        record.status = FetchStatus::Paywalled;
        return record;
    }
    if (http_code == 408 || http_code == 429 || http_code >= 500) {
        record.status = FetchStatus::Timeout;
        return record;
    }
    if (http_code < 200 || http_code >= 300) {
        record.status = FetchStatus::Dead;  // 404/410 and remaining 4xx
        return record;
    }

    std::string mime = to_lower(content_type);
    size_t semi = mime.find(';');
    if (semi != std::string::npos) mime = trim(mime.substr(0, semi));

    std::string capped = body.substr(0, policy.max_body_bytes);
    std::string text;
    if (mime.empty()) {
        std::string probe = trim(capped.substr(0, 256));
        bool looks_html = !probe.empty() && probe.front() == '<';
        text = looks_html ? html_to_text(capped) : collapse_ws(capped);
    } else if (mime == "text/html" || mime == "application/xhtml+xml") {
        text = html_to_text(capped);
    } else if (mime.rfind("text/", 0) == 0) {
        text = collapse_ws(capped);
    } else {
        record.status = FetchStatus::NonExtractable;  // pdf, images, binaries
        return record;
    }

    if (text.size() > policy.max_body_bytes) text.resize(policy.max_body_bytes);
    if (text.empty()) {
        record.status = FetchStatus::NonExtractable;
        return record;
    }
    if (body_has_paywall_marker(text)) {
        record.status = FetchStatus::Paywalled;
        return record;
    }
    record.status = FetchStatus::Ok;
    record.extracted_text = std::move(text);
    return record;
}

// =============================================================================
// Cache serialization
// =============================================================================

std::string fetch_record_to_json(const FetchRecord& record) {
    json j = {{"url", record.url},
              {"status", to_string(record.status)},
              {"fetched_at", record.fetched_at_unix}};
    if (record.http_code) j["http_code"] = *record.http_code;
    if (record.extracted_text) j["extracted_text"] = *record.extracted_text;
    return j.dump();
}

std::optional<FetchRecord> fetch_record_from_json(const std::string& body) {
    json j = json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    if (!j.contains("url") || !j.contains("status")) return std::nullopt;
    FetchRecord record;
    record.url = j["url"].get<std::string>();
    auto status = fetch_status_from_string(j["status"].get<std::string>());
    if (!status) return std::nullopt;
    record.status = *status;
    if (j.contains("http_code") && j["http_code"].is_number_integer())
        record.http_code = j["http_code"].get<int>();
    if (j.contains("extracted_text") && j["extracted_text"].is_string())
        record.extracted_text = j["extracted_text"].get<std::string>();
    if (j.contains("fetched_at") && j["fetched_at"].is_number())
        record.fetched_at_unix = j["fetched_at"].get<std::int64_t>();
    // Enforce the status/text invariant on load.
    if (record.status == FetchStatus::Ok &&
        (!record.extracted_text || record.extracted_text->empty()))
        return std::nullopt;
    if (record.status != FetchStatus::Ok) record.extracted_text.reset();
    return record;
}

// =============================================================================
// Fetcher
// =============================================================================

struct EvidenceFetcher::HostState {
    std::mutex mutex;  // one in-flight request per host
    std::chrono::steady_clock::time_point last_request{};
    bool has_last = false;
};

EvidenceFetcher::EvidenceFetcher(FetchPolicy policy)
    : policy_(std::move(policy)), gate_(std::make_unique<InflightGate>(policy_.max_concurrent)) {
    if (!policy_.cache_dir.empty()) {
        std::error_code ec;
        fs::create_directories(policy_.cache_dir, ec);
    }
}

EvidenceFetcher::~EvidenceFetcher() = default;

std::string EvidenceFetcher::cache_key(const std::string& url) {
    return hex64(fnv1a64(url));
}

std::string EvidenceFetcher::cache_path(const std::string& url) const {
    return (fs::path(policy_.cache_dir) / (cache_key(url) + ".json")).string();
}

bool EvidenceFetcher::store_in_cache(const FetchRecord& record) {
    if (policy_.cache_dir.empty()) return false;
    std::string path = cache_path(record.url);
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) return false;
        FetchRecord stored = record;
        stored.from_cache = false;
        out << fetch_record_to_json(stored);
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    return !ec;
}

std::optional<FetchRecord> EvidenceFetcher::load_from_cache(const std::string& url) const {
    if (policy_.cache_dir.empty()) return std::nullopt;
    std::ifstream in(cache_path(url), std::ios::binary);
    if (!in) return std::nullopt;
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return fetch_record_from_json(buffer.str());
}

FetchRecord EvidenceFetcher::fetch(const std::string& url) {
    if (!is_valid_http_url(url)) {
        FetchRecord record;
        record.url = url;
        record.status = FetchStatus::Dead;
        record.fetched_at_unix = now_unix();
        return record;
    }
    if (auto cached = load_from_cache(url)) {
        cached->from_cache = true;
        return *cached;
    }
    if (policy_.offline) {
        FetchRecord record;
        record.url = url;
        record.status = FetchStatus::Timeout;  // cache-only mode, miss
        record.fetched_at_unix = now_unix();
        return record;
    }
    FetchRecord record = fetch_over_network(url);
    store_in_cache(record);
    return record;
}

FetchRecord EvidenceFetcher::fetch_over_network(const std::string& url) {
    size_t scheme_end = url.find("://");
    size_t host_start = scheme_end + 3;
    size_t path_start = url.find('/', host_start);
    std::string base = url.substr(0, path_start);
    std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);
    std::string host = base.substr(host_start);

    HostState* state = nullptr;
    {
        std::lock_guard<std::mutex> lock(hosts_mutex_);
        auto& slot = hosts_[host];
        if (!slot) slot = std::make_unique<HostState>();
        state = slot.get();
    }

    gate_->acquire();
    std::lock_guard<std::mutex> host_lock(state->mutex);
    if (state->has_last && policy_.per_host_delay_s > 0) {
        auto min_gap = std::chrono::duration<double>(policy_.per_host_delay_s);
        auto elapsed = std::chrono::steady_clock::now() - state->last_request;
        if (elapsed < min_gap)
            std::this_thread::sleep_for(min_gap - elapsed);
    }

    FetchRecord record;
    record.url = url;
    record.fetched_at_unix = now_unix();

    const int attempts = std::max(0, policy_.max_retries) + 1;
    for (int attempt = 0; attempt < attempts; ++attempt) {
        httplib::Client client(base);
        client.set_follow_location(true);
        auto timeout = std::chrono::duration<double>(policy_.timeout_s);
        client.set_connection_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
        client.set_read_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));

        int status_code = 0;
        std::string content_type;
        std::string body;
        bool truncated = false;
        auto res = client.Get(
            path,
            [&](const httplib::Response& response) {
                status_code = response.status;
                content_type = response.get_header_value("Content-Type");
                return true;
            },
            [&](const char* data, size_t len) {
                size_t room = policy_.max_body_bytes > body.size()
                                  ? policy_.max_body_bytes - body.size()
                                  : 0;
                size_t take = std::min(room, len);
                body.append(data, take);
                if (take < len) {
                    truncated = true;
                    return false;  // body cap reached, stop the transfer
                }
                return true;
            });

        state->last_request = std::chrono::steady_clock::now();
        state->has_last = true;

        if (res || (truncated && status_code != 0)) {
            FetchRecord mapped = classify_response(url, status_code, content_type, body, policy_);
            gate_->release();
            return mapped;
        }

        httplib::Error err = res.error();
        bool timeout_like = err == httplib::Error::ConnectionTimeout ||
                            err == httplib::Error::Read || err == httplib::Error::Write;
        if (timeout_like && attempt + 1 < attempts) continue;  // retry transient failures
        record.status = timeout_like ? FetchStatus::Timeout : FetchStatus::Dead;
        gate_->release();
        return record;
    }
    record.status = FetchStatus::Timeout;
    gate_->release();
    return record;
}

}  // namespace repeval
