#pragma once

#include <chrono>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <stdexcept>
#include <string>

namespace clickcast {

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Minimal JSON-over-HTTP request interface; adapters depend on this, tests fake it.
class Transport {
public:
    virtual ~Transport() = default;
    /// POSTs a JSON body to `path`, returns the response body. Throws TransportError.
    virtual std::string post_json(const std::string& path, const std::string& body) = 0;
};

struct RetryPolicy {
    int max_attempts = 4;
    std::chrono::milliseconds initial_backoff{250};
    double backoff_multiplier = 2.0;
};

/// cpp-httplib backed transport with retry/backoff and a bound on in-flight requests.
class HttpTransport final : public Transport {
public:
    HttpTransport(std::string base_url, std::map<std::string, std::string> headers = {},
                  RetryPolicy retry = {}, int max_concurrency = 4,
                  std::chrono::seconds timeout = std::chrono::seconds(60));

    std::string post_json(const std::string& path, const std::string& body) override;

    const std::string& base_url() const { return base_url_; }

private:
    std::string base_url_;
    std::map<std::string, std::string> headers_;
    RetryPolicy retry_;
    std::chrono::seconds timeout_;
    std::counting_semaphore<64> slots_;
};

/// Reads `<PREFIX>_ENDPOINT` and optional `<PREFIX>_API_KEY`; nullptr when no endpoint is set.
std::unique_ptr<Transport> transport_from_env(const std::string& prefix);

/// Value of an environment variable, if set and non-empty.
std::optional<std::string> env_value(const std::string& name);

}  // namespace clickcast
