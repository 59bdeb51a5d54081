// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace dtnl {

/// Writes via a temporary file and rename, so readers see old or new content.
void write_file_atomic(const std::filesystem::path& path, std::string_view data, bool sync);

/// Appends `line` plus '\n' in one write.
void append_line(const std::filesystem::path& path, std::string_view line, bool sync);

/// Complete lines of a text file; a trailing line without '\n' (torn) is dropped.
std::vector<std::string> read_lines(const std::filesystem::path& path);

std::string read_text(const std::filesystem::path& path);

}  // namespace dtnl
