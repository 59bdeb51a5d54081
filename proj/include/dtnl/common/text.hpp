// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace dtnl {

bool valid_utf8(std::string_view s);
/// Replaces each byte that does not start a well-formed sequence with U+FFFD.
std::string sanitize_utf8(std::string_view s);
void append_utf8(std::string& out, std::uint32_t code_point);

/// Strips ASCII whitespace from both ends.
std::string trim(std::string_view s);

}  // namespace dtnl
