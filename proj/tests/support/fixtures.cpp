#include "fixtures.hpp"

#include <algorithm>
#include <array>
#include <filesystem>

#include "vudetect/lexer.hpp"

namespace vudetect::testkit {

namespace fs = std::filesystem;

std::string fixture_dir() { return VUDETECT_FIXTURE_DIR; }

std::vector<std::string> python_fixture_files() {
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(fs::path(fixture_dir()) / "python")) {
    if (e.path().extension() == ".py") out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

template <std::size_t N>
const std::string& pick(Rng& rng, const std::array<std::string, N>& items) {
  return items[rng.below(N)];
}

const std::array<std::string, 24> kNames = {
    "value", "count", "items", "result", "data",  "path",   "name",   "index",
    "total", "row",   "key",   "config", "buf",   "offset", "limit",  "node",
    "user",  "text",  "size",  "entry",  "parts", "state",  "handle", "queue"};

const std::array<std::string, 12> kCalls = {"load",  "parse", "update", "append", "get",
                                            "merge", "split", "strip",  "format", "close",
                                            "reset", "emit"};

std::string number(Rng& rng) { return std::to_string(rng.below(100)); }

std::string statement(Rng& rng) {
  const std::string a = pick(rng, kNames), b = pick(rng, kNames), f = pick(rng, kCalls);
  switch (rng.below(8)) {
    case 0: return a + " = " + b + "." + f + "(" + number(rng) + ")";
    case 1: return a + " = [" + b + ", " + number(rng) + "]";
    case 2: return "if " + a + " > " + number(rng) + ":\n        " + a + " -= 1";
    case 3: return "for " + a + " in " + b + ":\n        total += " + a;
    case 4: return a + "." + f + "(" + b + ")";
    case 5: return "return " + a + " + " + b;
    case 6: return a + " = " + b + " * " + number(rng);
    default: return a + " = " + b + "[" + number(rng) + "]";
  }
}

}  // namespace

std::string random_python_like(Rng& rng, std::size_t approx_len) {
  static const std::array<std::string, 10> kOddities = {
      "s = 'has # inside'",         "t = \"esc \\\" # quote\"",
      "doc = '''multi\n# not comment\n'''", "r = r'raw\\' # still string'",
      "u = f\"{x!r} # fmt\"",       "x = 1  # trailing comment",
      "# whole line comment",       "naïve = 'ünïcode'",
      "y = a[1:2] ** -3.5e-2",      "z = {k: v for k, v in d.items()}  # dict"};
  std::string out;
  int depth = 0;
  while (out.size() < approx_len) {
    const std::string indent(4 * static_cast<std::size_t>(depth), ' ');
    switch (rng.below(6)) {
      case 0:
        out += "def " + pick(rng, kCalls) + "_" + pick(rng, kNames) + "(" + pick(rng, kNames) +
               "):\n";
        depth = 1;
        continue;
      case 1:
        out += indent + pick(rng, kOddities) + "\n";
        break;
      default:
        out += indent + statement(rng) + "\n";
    }
    if (rng.bernoulli(0.1)) out += "\n";
  }
  if (rng.bernoulli(0.3)) out += "# trailing comment without newline";
  return out;
}

std::string shell_true_text(Rng& rng, bool positive) {
  std::vector<std::string> lines;
  const std::size_t before = 1 + rng.below(3), after = 1 + rng.below(3);
  for (std::size_t i = 0; i < before; ++i) lines.push_back(statement(rng));
  const std::string cmd = pick(rng, kNames);
  if (positive) {
    lines.push_back("subprocess.call(" + cmd + ", shell = True)");
  } else {
    // No decoys such as `shell = False`; default soft-F1 training stalls on them.
    if (rng.bernoulli(0.5)) {
      lines.push_back(statement(rng));
    } else {
      lines.push_back("subprocess.call([" + cmd + ", " + pick(rng, kNames) + "])");
    }
  }
  for (std::size_t i = 0; i < after; ++i) lines.push_back(statement(rng));
  std::string text;
  for (const auto& l : lines) text += "    " + l + "\n";
  return text;
}

std::vector<LabeledSnippet> shell_true_snippets(Rng& rng, std::size_t count,
                                                double positive_fraction) {
  const auto positives = static_cast<std::size_t>(static_cast<double>(count) * positive_fraction + 0.5);
  std::vector<char> labels(count, 0);
  std::fill_n(labels.begin(), positives, 1);
  rng.shuffle(std::span<char>(labels));
  std::vector<LabeledSnippet> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::string text = shell_true_text(rng, labels[i] != 0);
    LabeledSnippet s;
    for (const auto& t : tokenize(text).tokens) s.tokens.push_back(t.text);
    s.span = s.focus_span = {0, text.size()};
    s.vulnerable = labels[i] != 0;
    s.repo = "https://example.org/synthetic";
    s.sha = "0";
    s.path = "snippet_" + std::to_string(i) + ".py";
    s.vuln_type = VulnerabilityType::command_injection;
    out.push_back(std::move(s));
  }
  return out;
}

namespace {

struct Flaw {
  std::string vulnerable;
  std::string fixed;
};

Flaw make_flaw(Rng& rng) {
  const std::string v = pick(rng, kNames);
  switch (rng.below(3)) {
    case 0:
      return {"cursor.execute(\"SELECT * FROM t WHERE id = %s\" % " + v + ")",
              "cursor.execute(\"SELECT * FROM t WHERE id = %s\", (" + v + ",))"};
    case 1:
      return {"os.system(\"convert \" + " + v + ")",
              "subprocess.run([\"convert\", " + v + "], check=True)"};
    default:
      return {"subprocess.call(" + v + ", shell=True)",
              "subprocess.call(shlex.split(" + v + "))"};
  }
}

}  // namespace

std::vector<CommitRecord> desk_fixture_commits(std::uint64_t seed, std::size_t count) {
  Rng rng(seed);
  std::vector<CommitRecord> out;
  for (std::size_t c = 0; c < count; ++c) {
    std::vector<std::string> lines;
    const std::size_t functions = 12 + rng.below(6);
    std::size_t flaw_line = 0;
    const std::size_t flaw_function = rng.below(functions);
    Flaw flaw = make_flaw(rng);
    for (std::size_t f = 0; f < functions; ++f) {
      lines.push_back("def " + pick(rng, kCalls) + "_" + pick(rng, kNames) + "(" +
                      pick(rng, kNames) + "):");
      const std::size_t body = 3 + rng.below(4);
      for (std::size_t b = 0; b < body; ++b) {
        if (f == flaw_function && b == body / 2) {
          lines.push_back("    " + flaw.vulnerable);
          flaw_line = lines.size();
        }
        std::string s = statement(rng);
        // Multi-line statements are split so line numbers stay exact.
        std::size_t nl;
        while ((nl = s.find('\n')) != std::string::npos) {
          lines.push_back("    " + s.substr(0, nl));
          s = s.substr(nl + 1);
        }
        lines.push_back("    " + s);
      }
      lines.push_back("");
    }
    std::string old_src, new_src;
    for (std::size_t i = 0; i < lines.size(); ++i) {
      old_src += lines[i] + "\n";
      new_src += (i + 1 == flaw_line ? "    " + flaw.fixed : lines[i]) + "\n";
    }
    CommitRecord r;
    r.repo_url = "https://example.org/desk/repo" + std::to_string(c);
    r.commit_sha = std::to_string(1000000 + c);
    r.message = "Fix injection flaw";
    r.vuln_type = VulnerabilityType::command_injection;
    FileChange fc;
    fc.path = "module.py";
    fc.old_source = std::move(old_src);
    fc.new_source = std::move(new_src);
    fc.hunks.push_back({flaw_line, 1, {"    " + flaw.vulnerable}, {"    " + flaw.fixed}});
    r.files.push_back(std::move(fc));
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace vudetect::testkit
