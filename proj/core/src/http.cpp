#include "vudetect/http.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <nlohmann/json.hpp>
#include <thread>

#include "vudetect/error.hpp"
#include "vudetect/jsonl.hpp"
#include "vudetect/vulnerability.hpp"

namespace vudetect {

std::string HttpResponse::header(const std::string& lowercase_name) const {
  auto it = headers.find(lowercase_name);
  return it == headers.end() ? std::string() : it->second;
}

HttplibTransport::HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

HttpResponse HttplibTransport::get(const std::string& url, const HeaderList& headers) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw NetworkError("invalid url: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  const std::string origin = path_start == std::string::npos ? url : url.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : url.substr(path_start);

  httplib::Client client(origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_follow_location(true);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);

  auto res = client.Get(path, h);
  if (!res) throw NetworkError("request failed (" + httplib::to_string(res.error()) + "): " + url);
  HttpResponse out;
  out.status = res->status;
  out.body = res->body;
  for (const auto& [k, v] : res->headers) out.headers[to_lower(k)] = v;
  return out;
}

namespace {

HttpResponse response_from_json(const nlohmann::json& j) {
  HttpResponse r;
  r.status = j.value("status", 200);
  r.body = j.value("body", std::string());
  if (j.contains("headers")) {
    for (const auto& [k, v] : j["headers"].items()) r.headers[to_lower(k)] = v.get<std::string>();
  }
  return r;
}

}  // namespace

std::shared_ptr<CassetteTransport> CassetteTransport::from_json_text(const std::string& text) {
  auto cassette = std::make_shared<CassetteTransport>();
  try {
    const auto j = nlohmann::json::parse(text);
    for (const auto& item : j.at("interactions")) {
      const std::string url = item.at("request").at("url").get<std::string>();
      cassette->slots_[url].responses.push_back(response_from_json(item.at("response")));
    }
  } catch (const nlohmann::json::exception& e) {
    throw DumpFormatError(std::string("cassette: ") + e.what());
  }
  return cassette;
}

std::shared_ptr<CassetteTransport> CassetteTransport::load(const std::string& path) {
  return from_json_text(read_text_file(path));
}

HttpResponse CassetteTransport::get(const std::string& url, const HeaderList&) {
  std::lock_guard lock(mu_);
  requested_.push_back(url);
  auto it = slots_.find(url);
  if (it == slots_.end()) throw NetworkError("no recorded interaction for " + url);
  Slot& slot = it->second;
  const std::size_t idx = std::min(slot.next, slot.responses.size() - 1);
  if (slot.next < slot.responses.size()) ++slot.next;
  return slot.responses[idx];
}

std::vector<std::string> CassetteTransport::requested_urls() const {
  std::lock_guard lock(mu_);
  return requested_;
}

HttpResponse RecordingTransport::get(const std::string& url, const HeaderList& headers) {
  HttpResponse r = inner_->get(url, headers);
  std::lock_guard lock(mu_);
  log_.emplace_back(url, r);
  return r;
}

void RecordingTransport::save(const std::string& path) const {
  nlohmann::ordered_json j;
  auto& list = j["interactions"] = nlohmann::ordered_json::array();
  std::lock_guard lock(mu_);
  for (const auto& [url, r] : log_) {
    nlohmann::ordered_json item;
    item["request"] = {{"method", "GET"}, {"url", url}};
    nlohmann::ordered_json headers = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.headers) headers[k] = v;
    item["response"] = {{"status", r.status}, {"headers", headers}, {"body", r.body}};
    list.push_back(std::move(item));
  }
  write_text_file(path, j.dump(2, ' ', false, nlohmann::ordered_json::error_handler_t::replace));
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

RateLimiter::RateLimiter(double requests_per_second, std::size_t burst, Sleeper sleeper,
                         SteadyClock now)
    : rate_(requests_per_second),
      burst_(static_cast<double>(std::max<std::size_t>(burst, 1))),
      tokens_(burst_),
      last_(now()),
      paused_until_(now()),
      sleeper_(std::move(sleeper)),
      now_(std::move(now)) {}

void RateLimiter::acquire() {
  if (rate_ <= 0.0) return;
  for (;;) {
    std::chrono::milliseconds wait{0};
    {
      std::lock_guard lock(mu_);
      const auto now = now_();
      if (now < paused_until_) {
        wait = std::chrono::ceil<std::chrono::milliseconds>(paused_until_ - now);
      } else {
        const double elapsed = std::chrono::duration<double>(now - last_).count();
        tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
        last_ = now;
        if (tokens_ >= 1.0) {
          tokens_ -= 1.0;
          return;
        }
        wait = std::chrono::milliseconds(
            static_cast<long long>(std::ceil((1.0 - tokens_) / rate_ * 1000.0)));
      }
    }
    sleeper_(std::max(wait, std::chrono::milliseconds(1)));
  }
}

void RateLimiter::pause_for(std::chrono::milliseconds duration) {
  std::lock_guard lock(mu_);
  paused_until_ = std::max(paused_until_, now_() + duration);
}

std::chrono::milliseconds RetryPolicy::delay_for(int attempt) const {
  const double ms = static_cast<double>(base_delay.count()) * std::pow(factor, attempt);
  return std::min(max_delay, std::chrono::milliseconds(static_cast<long long>(ms)));
}

std::string url_encode(std::string_view s) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xF]);
    }
  }
  return out;
}

}  // namespace vudetect
