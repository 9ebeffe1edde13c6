#include "vudetect/jsonl.hpp"

#include <zlib.h>

#include <array>
#include <fstream>
#include <memory>

#include "vudetect/error.hpp"

namespace vudetect {

namespace {

struct GzCloser {
  void operator()(gzFile_s* f) const { gzclose(f); }
};
using GzHandle = std::unique_ptr<gzFile_s, GzCloser>;

}  // namespace

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string read_text_file(const std::string& path) {
  // gzread passes uncompressed files through unchanged.
  GzHandle in(gzopen(path.c_str(), "rb"));
  if (!in) throw IoError("cannot open " + path);
  std::string out;
  std::array<char, 1 << 16> buf{};
  for (;;) {
    const int n = gzread(in.get(), buf.data(), static_cast<unsigned>(buf.size()));
    if (n < 0) throw IoError("read failed: " + path);
    if (n == 0) break;
    out.append(buf.data(), static_cast<std::size_t>(n));
  }
  return out;
}

void write_text_file(const std::string& path, std::string_view content) {
  if (ends_with(path, ".gz")) {
    GzHandle out(gzopen(path.c_str(), "wb9"));
    if (!out) throw IoError("cannot write " + path);
    std::size_t off = 0;
    while (off < content.size()) {
      const auto chunk = static_cast<unsigned>(std::min<std::size_t>(content.size() - off, 1 << 20));
      if (gzwrite(out.get(), content.data() + off, chunk) != static_cast<int>(chunk)) {
        throw IoError("write failed: " + path);
      }
      off += chunk;
    }
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw IoError("write failed: " + path);
}

void for_each_line(const std::string& path,
                   const std::function<void(std::string_view, std::size_t)>& on_line) {
  const std::string text = read_text_file(path);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    ++line_no;
    std::string_view line(text.data() + pos, nl - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) on_line(line, line_no);
    pos = nl + 1;
  }
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
  std::string content;
  for (const auto& l : lines) {
    content += l;
    content += '\n';
  }
  write_text_file(path, content);
}

}  // namespace vudetect
