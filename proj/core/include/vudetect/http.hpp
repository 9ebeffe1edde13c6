#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace vudetect {

using HeaderList = std::vector<std::pair<std::string, std::string>>;

struct HttpResponse {
  int status = 0;
  std::map<std::string, std::string> headers;  // keys lowercased
  std::string body;

  std::string header(const std::string& lowercase_name) const;
};

/// Minimal GET-only transport so crawling logic can run against the network
/// or a recorded cassette. Implementations throw NetworkError when no
/// response could be obtained at all.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse get(const std::string& url, const HeaderList& headers) = 0;
};

/// Live HTTP(S) transport backed by cpp-httplib.
class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(30));
  HttpResponse get(const std::string& url, const HeaderList& headers) override;

 private:
  std::chrono::seconds timeout_;
};

/// Replays recorded interactions. Cassette file format:
///   {"interactions": [{"request": {"method": "GET", "url": "..."},
///                      "response": {"status": 200, "headers": {...}, "body": "..."}}]}
/// Repeated URLs are served in recording order; the last one repeats.
class CassetteTransport final : public HttpTransport {
 public:
  static std::shared_ptr<CassetteTransport> load(const std::string& path);
  static std::shared_ptr<CassetteTransport> from_json_text(const std::string& text);

  HttpResponse get(const std::string& url, const HeaderList& headers) override;

  /// URLs requested so far, in order.
  std::vector<std::string> requested_urls() const;

 private:
  struct Slot {
    std::vector<HttpResponse> responses;
    std::size_t next = 0;
  };
  mutable std::mutex mu_;
  std::map<std::string, Slot> slots_;
  std::vector<std::string> requested_;
};

/// Wraps a transport and records every interaction into cassette format.
class RecordingTransport final : public HttpTransport {
 public:
  explicit RecordingTransport(std::shared_ptr<HttpTransport> inner) : inner_(std::move(inner)) {}
  HttpResponse get(const std::string& url, const HeaderList& headers) override;
  void save(const std::string& path) const;

 private:
  std::shared_ptr<HttpTransport> inner_;
  mutable std::mutex mu_;
  std::vector<std::pair<std::string, HttpResponse>> log_;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
using WallClock = std::function<std::chrono::system_clock::time_point()>;
using SteadyClock = std::function<std::chrono::steady_clock::time_point()>;

Sleeper real_sleeper();

/// Token bucket shared by concurrent workers. A server-announced reset time
/// blocks all callers until it passes.
class RateLimiter {
 public:
  RateLimiter(double requests_per_second, std::size_t burst, Sleeper sleeper = real_sleeper(),
              SteadyClock now = &std::chrono::steady_clock::now);

  void acquire();
  void pause_for(std::chrono::milliseconds duration);

 private:
  using Clock = std::chrono::steady_clock;
  double rate_;
  double burst_;
  double tokens_;
  Clock::time_point last_;
  Clock::time_point paused_until_;
  Sleeper sleeper_;
  SteadyClock now_;
  std::mutex mu_;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds base_delay{1000};
  double factor = 2.0;
  std::chrono::milliseconds max_delay{60'000};

  std::chrono::milliseconds delay_for(int attempt) const;
};

std::string url_encode(std::string_view s);

}  // namespace vudetect
