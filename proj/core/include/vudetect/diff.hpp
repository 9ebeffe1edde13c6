#pragma once

#include <string_view>
#include <vector>

#include "vudetect/commit.hpp"

namespace vudetect {

/// Splits a unified diff (the `patch` text of a commit file entry, one or
/// more `@@ -a,b +c,d @@` sections) into minimal change blocks. Context lines
/// are dropped; each maximal run of `-`/`+` lines becomes one DiffHunk.
/// Throws DumpFormatError on a malformed section header.
std::vector<DiffHunk> parse_unified_patch(std::string_view patch);

}  // namespace vudetect
