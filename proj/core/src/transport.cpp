#include "clickcast/transport.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

#include "httplib.h"

namespace clickcast {

HttpTransport::HttpTransport(std::string base_url, std::map<std::string, std::string> headers,
                             RetryPolicy retry, int max_concurrency, std::chrono::seconds timeout)
    : base_url_(std::move(base_url)),
      headers_(std::move(headers)),
      retry_(retry),
      timeout_(timeout),
      slots_(std::clamp(max_concurrency, 1, 64)) {
    if (base_url_.empty()) throw std::invalid_argument("HttpTransport: empty base url");
}

std::string HttpTransport::post_json(const std::string& path, const std::string& body) {
    slots_.acquire();
    struct Release {
        std::counting_semaphore<64>& s;
        ~Release() { s.release(); }
    } release{slots_};

    httplib::Client client(base_url_);
    client.set_connection_timeout(timeout_);
    client.set_read_timeout(timeout_);
    httplib::Headers headers(headers_.begin(), headers_.end());

    std::string last_error = "no attempt made";
    auto backoff = retry_.initial_backoff;
    for (int attempt = 1; attempt <= std::max(1, retry_.max_attempts); ++attempt) {
        auto res = client.Post(path, headers, body, "application/json");
        if (res) {
            if (res->status >= 200 && res->status < 300) return res->body;
            last_error = "HTTP " + std::to_string(res->status);
            // Client errors other than rate limiting are permanent.
            if (res->status < 500 && res->status != 429) break;
        } else {
            last_error = httplib::to_string(res.error());
        }
        if (attempt < retry_.max_attempts) {
            std::this_thread::sleep_for(backoff);
            backoff = std::chrono::milliseconds(
                static_cast<long long>(static_cast<double>(backoff.count()) * retry_.backoff_multiplier));
        }
    }
    throw TransportError("POST " + base_url_ + path + " failed: " + last_error);
}

std::optional<std::string> env_value(const std::string& name) {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
}

std::unique_ptr<Transport> transport_from_env(const std::string& prefix) {
    auto endpoint = env_value(prefix + "_ENDPOINT");
    if (!endpoint) return nullptr;
    std::map<std::string, std::string> headers;
    if (auto key = env_value(prefix + "_API_KEY")) headers["Authorization"] = "Bearer " + *key;
    return std::make_unique<HttpTransport>(*endpoint, std::move(headers));
}

}  // namespace clickcast
