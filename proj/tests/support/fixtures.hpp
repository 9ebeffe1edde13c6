#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "vudetect/commit.hpp"
#include "vudetect/labeler.hpp"
#include "vudetect/random.hpp"

namespace vudetect::testkit {

std::string fixture_dir();

// Paths of the stdlib-derived Python fixture files, sorted.
std::vector<std::string> python_fixture_files();

// Python-looking text with comments, string literals containing '#',
// escapes, triple quotes and the occasional non-ASCII identifier.
std::string random_python_like(Rng& rng, std::size_t approx_len);

// Snippets of random statements; positives contain `shell = True` inside a
// subprocess call, negatives hold plain statements or a list-argument call.
// Each snippet is its own file.
std::vector<LabeledSnippet> shell_true_snippets(Rng& rng, std::size_t count,
                                                double positive_fraction);

// Source text of one synthetic snippet (exposed for the scanner test).
std::string shell_true_text(Rng& rng, bool positive);

// Desk-scale stand-in for a mined corpus: one Python file per commit with a
// single insecure line fixed in the new version. Indicator tokens are rare
// while the filler vocabulary is frequent.
std::vector<CommitRecord> desk_fixture_commits(std::uint64_t seed, std::size_t count);

}  // namespace vudetect::testkit
