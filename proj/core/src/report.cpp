#include <array>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

#include "vudetect/error.hpp"
#include "vudetect/scanner.hpp"

namespace vudetect {

ConfidenceBucket bucketize(double p) {
  if (p >= 0.8) return ConfidenceBucket::very_high;
  if (p >= 0.6) return ConfidenceBucket::high;
  if (p >= 0.4) return ConfidenceBucket::medium;
  if (p >= 0.2) return ConfidenceBucket::low;
  return ConfidenceBucket::very_low;
}

namespace {

constexpr std::array<ConfidenceBucket, 5> kBuckets = {
    ConfidenceBucket::very_low, ConfidenceBucket::low, ConfidenceBucket::medium,
    ConfidenceBucket::high, ConfidenceBucket::very_high};

// Lowest bucket renders unstyled.
constexpr std::array<const char*, 5> kAnsi = {"", "\x1b[30;48;5;120m", "\x1b[30;48;5;227m",
                                              "\x1b[30;48;5;215m", "\x1b[97;48;5;160m"};
constexpr const char* kAnsiReset = "\x1b[0m";
constexpr std::array<const char*, 5> kHtmlColor = {"transparent", "#a8e6a1", "#fff27a",
                                                   "#ffb061", "#e0322b"};
constexpr std::array<const char*, 5> kRange = {"p < 0.2", "0.2 ≤ p < 0.4",
                                               "0.4 ≤ p < 0.6", "0.6 ≤ p < 0.8",
                                               "p ≥ 0.8"};

std::size_t index_of(ConfidenceBucket b) { return static_cast<std::size_t>(b); }

std::string render_ansi(const ScanReport& r) {
  std::string out;
  out.reserve(r.source.size() * 2);
  std::size_t current = 0;
  for (std::size_t i = 0; i < r.source.size(); ++i) {
    const char c = r.source[i];
    if (c == '\n') {
      if (current != 0) out += kAnsiReset;
      out += c;
      current = 0;
      continue;
    }
    const std::size_t b = index_of(bucketize(r.profile[i]));
    if (b != current) {
      if (current != 0) out += kAnsiReset;
      out += kAnsi[b];
      current = b;
    }
    out += c;
  }
  if (current != 0) out += kAnsiReset;
  return out;
}

void html_escape(std::string& out, char c) {
  switch (c) {
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '&': out += "&amp;"; break;
    case '"': out += "&quot;"; break;
    default: out += c;
  }
}

std::string escaped(std::string_view s) {
  std::string out;
  for (char c : s) html_escape(out, c);
  return out;
}

std::string render_html(const ScanReport& r) {
  std::ostringstream page;
  page << "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n"
       << "<title>vudetect: " << escaped(r.path) << "</title>\n<style>\n"
       << "body { font-family: sans-serif; margin: 2em; }\n"
       << "pre { font-family: monospace; border: 1px solid #ccc; padding: 1em; }\n"
       << "table.legend td { padding: 0.2em 0.8em; }\n";
  for (std::size_t b = 0; b < kBuckets.size(); ++b) {
    page << ".b" << b << " { background: " << kHtmlColor[b] << "; }\n";
  }
  page << "</style>\n</head>\n<body>\n<h1>" << escaped(r.path.empty() ? "(source)" : r.path)
       << "</h1>\n";
  page << "<p>vulnerability type: "
       << (r.vuln_type ? std::string(to_string(*r.vuln_type)) : std::string("unspecified"))
       << ", threshold " << r.threshold << ", findings " << r.findings.size() << "</p>\n";
  page << "<table class=\"legend\">\n<tr><th>confidence</th><th>probability</th></tr>\n";
  for (std::size_t b = kBuckets.size(); b-- > 0;) {
    page << "<tr><td class=\"b" << b << "\">" << to_string(kBuckets[b]) << "</td><td>"
         << escaped(kRange[b]) << "</td></tr>\n";
  }
  page << "</table>\n<pre>";
  std::string body;
  std::size_t i = 0;
  while (i < r.source.size()) {
    const std::size_t b = index_of(bucketize(r.profile[i]));
    std::size_t j = i;
    while (j < r.source.size() && index_of(bucketize(r.profile[j])) == b) ++j;
    body += "<span class=\"b" + std::to_string(b) + "\">";
    for (std::size_t k = i; k < j; ++k) html_escape(body, r.source[k]);
    body += "</span>";
    i = j;
  }
  page << body << "</pre>\n";
  if (!r.findings.empty()) {
    page << "<h2>Findings</h2>\n<ul>\n";
    for (const auto& f : r.findings) {
      char prob[32];
      std::snprintf(prob, sizeof prob, "%.3f", f.probability);
      page << "<li>bytes " << f.span.start << "-" << f.span.end << ": " << to_string(f.bucket)
           << " (" << prob << ")</li>\n";
    }
    page << "</ul>\n";
  }
  page << "<p>model " << escaped(r.fingerprints.model) << "<br>\nembedding "
       << escaped(r.fingerprints.embedding) << "<br>\nconfig " << escaped(r.fingerprints.config)
       << "</p>\n</body>\n</html>\n";
  return page.str();
}

using ojson = nlohmann::ordered_json;

ojson optional_type(const std::optional<VulnerabilityType>& t) {
  return t ? ojson(std::string(to_string(*t))) : ojson(nullptr);
}

std::string render_structured(const ScanReport& r) {
  ojson head;
  head["kind"] = "report";
  head["path"] = r.path;
  head["vuln_type"] = optional_type(r.vuln_type);
  head["n"] = r.snippet.n;
  head["m"] = r.snippet.m;
  head["threshold"] = r.threshold;
  head["fingerprints"] = {{"model", r.fingerprints.model},
                          {"embedding", r.fingerprints.embedding},
                          {"config", r.fingerprints.config}};
  head["findings"] = r.findings.size();
  // Profile as [value, run length] pairs.
  ojson profile = ojson::array();
  for (std::size_t i = 0; i < r.profile.size();) {
    std::size_t j = i;
    while (j < r.profile.size() && r.profile[j] == r.profile[i]) ++j;
    profile.push_back({r.profile[i], j - i});
    i = j;
  }
  head["profile"] = std::move(profile);
  ojson windows = ojson::array();
  for (const auto& w : r.windows) {
    windows.push_back({w.focus.start, w.focus.end, w.context.start, w.context.end, w.probability});
  }
  head["windows"] = std::move(windows);
  head["source"] = r.source;

  const auto dump = [](const ojson& j) { return j.dump(-1, ' ', false, ojson::error_handler_t::replace); };
  std::string out = dump(head) + "\n";
  for (const auto& f : r.findings) {
    ojson line;
    line["kind"] = "finding";
    line["span"] = {f.span.start, f.span.end};
    line["probability"] = f.probability;
    line["bucket"] = std::string(to_string(f.bucket));
    line["vuln_type"] = optional_type(f.vuln_type);
    out += dump(line) + "\n";
  }
  return out;
}

std::optional<VulnerabilityType> read_type(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return parse_vulnerability_type(j.get<std::string>());
}

}  // namespace

std::string_view to_string(ConfidenceBucket b) {
  switch (b) {
    case ConfidenceBucket::very_low: return "very_low";
    case ConfidenceBucket::low: return "low";
    case ConfidenceBucket::medium: return "medium";
    case ConfidenceBucket::high: return "high";
    case ConfidenceBucket::very_high: return "very_high";
  }
  return "unknown";
}

ConfidenceBucket parse_bucket(std::string_view name) {
  for (auto b : kBuckets) {
    if (to_string(b) == name) return b;
  }
  throw DumpFormatError("unknown confidence bucket: " + std::string(name));
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "ansi") return ReportFormat::ansi;
  if (name == "html") return ReportFormat::html;
  if (name == "structured") return ReportFormat::structured;
  throw UnknownFormat("unknown report format: " + std::string(name));
}

std::string_view file_extension(ReportFormat f) {
  switch (f) {
    case ReportFormat::ansi: return ".ansi";
    case ReportFormat::html: return ".html";
    case ReportFormat::structured: return ".jsonl";
  }
  return "";
}

std::string render_report(const ScanReport& report, ReportFormat format) {
  if (report.profile.size() != report.source.size()) {
    throw ShapeMismatch("profile length differs from source length");
  }
  switch (format) {
    case ReportFormat::ansi: return render_ansi(report);
    case ReportFormat::html: return render_html(report);
    case ReportFormat::structured: return render_structured(report);
  }
  throw UnknownFormat("unknown report format");
}

ScanReport load_structured_report(std::string_view text) {
  ScanReport r;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  std::size_t expected_findings = 0;
  try {
    while (pos < text.size()) {
      std::size_t nl = text.find('\n', pos);
      if (nl == std::string_view::npos) nl = text.size();
      const std::string_view line = text.substr(pos, nl - pos);
      pos = nl + 1;
      if (line.empty()) continue;
      const auto j = nlohmann::json::parse(line);
      const std::string kind = j.at("kind").get<std::string>();
      if (line_no++ == 0) {
        if (kind != "report") throw DumpFormatError("first line must be the report header");
        r.path = j.at("path").get<std::string>();
        r.vuln_type = read_type(j.at("vuln_type"));
        r.snippet.n = j.at("n").get<std::size_t>();
        r.snippet.m = j.at("m").get<std::size_t>();
        r.threshold = j.at("threshold").get<double>();
        const auto& fp = j.at("fingerprints");
        r.fingerprints = {fp.at("model").get<std::string>(), fp.at("embedding").get<std::string>(),
                          fp.at("config").get<std::string>()};
        expected_findings = j.at("findings").get<std::size_t>();
        for (const auto& run : j.at("profile")) {
          const double v = run.at(0).get<double>();
          r.profile.insert(r.profile.end(), run.at(1).get<std::size_t>(), v);
        }
        for (const auto& w : j.at("windows")) {
          r.windows.push_back({{w.at(0).get<std::size_t>(), w.at(1).get<std::size_t>()},
                               {w.at(2).get<std::size_t>(), w.at(3).get<std::size_t>()},
                               w.at(4).get<double>()});
        }
        r.source = j.at("source").get<std::string>();
        if (r.profile.size() != r.source.size()) {
          throw DumpFormatError("profile length differs from source length");
        }
      } else {
        if (kind != "finding") throw DumpFormatError("unexpected record kind: " + kind);
        Finding f;
        f.span = {j.at("span").at(0).get<std::size_t>(), j.at("span").at(1).get<std::size_t>()};
        f.probability = j.at("probability").get<double>();
        f.bucket = parse_bucket(j.at("bucket").get<std::string>());
        f.vuln_type = read_type(j.at("vuln_type"));
        r.findings.push_back(f);
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DumpFormatError(std::string("structured report: ") + e.what());
  } catch (const ConfigError& e) {
    throw DumpFormatError(std::string("structured report: ") + e.what());
  }
  if (line_no == 0) throw DumpFormatError("structured report is empty");
  if (r.findings.size() != expected_findings) throw DumpFormatError("finding count mismatch");
  return r;
}

}  // namespace vudetect
