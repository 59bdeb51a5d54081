// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>

#include "dtnl/common/error.hpp"
#include "dtnl/common/text.hpp"
#include "dtnl/gateway/gateway.hpp"

namespace dtnl::gateway {
namespace {

bool starts_with_ci(std::string_view s, std::size_t pos, std::string_view prefix) {
  if (pos + prefix.size() > s.size()) return false;
  for (std::size_t i = 0; i < prefix.size(); ++i)
    if (std::tolower(static_cast<unsigned char>(s[pos + i])) != prefix[i]) return false;
  return true;
}

std::size_t find_ci(std::string_view s, std::size_t from, std::string_view needle) {
  for (std::size_t i = from; i + needle.size() <= s.size(); ++i)
    if (starts_with_ci(s, i, needle)) return i;
  return std::string_view::npos;
}

/// Lowercase tag name after '<' or '</' at `pos`.
std::string tag_name(std::string_view s, std::size_t pos) {
  std::size_t i = pos + 1;
  if (i < s.size() && s[i] == '/') ++i;
  std::string name;
  while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i])))
    name.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(s[i++]))));
  return name;
}

bool is_block(const std::string& name) {
  static constexpr std::string_view kBlock[] = {"br", "p",  "div", "li", "ul", "ol", "h1", "h2", "h3",
                                                "h4", "h5", "h6",  "tr", "table", "section", "article",
                                                "header", "footer", "blockquote", "pre", "hr", "body"};
  return std::find(std::begin(kBlock), std::end(kBlock), name) != std::end(kBlock);
}

std::string strip_tags(std::string_view in) {
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (in[i] != '<') {
      out.push_back(in[i++]);
      continue;
    }
    // Only treat '<' as markup when it opens something tag-like.
    const bool tag_like = i + 1 < in.size() && (std::isalpha(static_cast<unsigned char>(in[i + 1])) ||
                                                in[i + 1] == '/' || in[i + 1] == '!' || in[i + 1] == '?');
    if (!tag_like) {
      out.push_back(in[i++]);
      continue;
    }
    if (starts_with_ci(in, i, "<!--")) {
      auto end = in.find("-->", i + 4);
      i = end == std::string_view::npos ? in.size() : end + 3;
      continue;
    }
    const auto name = tag_name(in, i);
    const bool closing = in[i + 1] == '/';
    if (!closing && (name == "script" || name == "style" || name == "head")) {
      // Drop the element with its contents.
      auto close = find_ci(in, i, "</" + name);
      if (close == std::string_view::npos) break;
      i = close;
    }
    auto end = in.find('>', i);
    if (end == std::string_view::npos) break;  // unterminated tag: drop the rest
    if (is_block(name)) out.push_back('\n');
    i = end + 1;
  }
  return out;
}

std::string decode_entities(std::string_view in) {
  static constexpr std::pair<std::string_view, std::string_view> kNamed[] = {
      {"amp", "&"}, {"lt", "<"}, {"gt", ">"}, {"quot", "\""}, {"apos", "'"}, {"nbsp", " "}};
  std::string out;
  out.reserve(in.size());
  std::size_t i = 0;
  while (i < in.size()) {
    if (in[i] != '&') {
      out.push_back(in[i++]);
      continue;
    }
    auto semi = in.find(';', i);
    if (semi == std::string_view::npos || semi - i > 10) {
      out.push_back(in[i++]);
      continue;
    }
    auto name = in.substr(i + 1, semi - i - 1);
    bool done = false;
    if (name.size() > 1 && name[0] == '#') {
      std::uint32_t cp = 0;
      const bool hex = name[1] == 'x' || name[1] == 'X';
      auto digits = name.substr(hex ? 2 : 1);
      auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), cp, hex ? 16 : 10);
      if (ec == std::errc{} && p == digits.data() + digits.size() && !digits.empty()) {
        append_utf8(out, cp);
        done = true;
      }
    } else {
      for (const auto& [n, v] : kNamed)
        if (name == n) {
          out += v;
          done = true;
          break;
        }
    }
    if (done) {
      i = semi + 1;
    } else {
      out.push_back(in[i++]);
    }
  }
  return out;
}

std::string tidy_whitespace(std::string_view in) {
  // CRLF -> LF, trailing spaces dropped per line, at most one blank line.
  std::string out;
  out.reserve(in.size());
  std::string line;
  int blank_run = 0;
  auto flush = [&] {
    while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) line.pop_back();
    if (line.empty()) {
      if (++blank_run <= 1) out.push_back('\n');
    } else {
      blank_run = 0;
      out += line;
      out.push_back('\n');
    }
    line.clear();
  };
  for (char c : in) {
    if (c == '\n') {
      flush();
    } else {
      line.push_back(c);
    }
  }
  flush();
  return trim(out);
}

}  // namespace

NormalizedArticle normalize_article(const std::string& raw_title, const std::string& raw_body) {
  NormalizedArticle a;
  a.title = trim(sanitize_utf8(raw_title));
  a.body = tidy_whitespace(decode_entities(strip_tags(sanitize_utf8(raw_body))));
  if (a.title.empty() || a.body.empty())
    throw Error(Errc::EmptyAfterNormalization, a.title.empty() ? "title empty after normalization"
                                                               : "body empty after normalization");
  return a;
}

}  // namespace dtnl::gateway
