// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/common/files.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "dtnl/common/error.hpp"

namespace dtnl {
namespace {

[[noreturn]] void fail(const std::string& what, const std::filesystem::path& p) {
  throw Error(Errc::IoFailure, what + " " + p.string() + ": " + std::strerror(errno));
}

void write_fd(int fd, std::string_view data, const std::filesystem::path& p) {
  while (!data.empty()) {
    auto n = ::write(fd, data.data(), data.size());
    if (n < 0) {
      if (errno == EINTR) continue;
      fail("write", p);
    }
    data.remove_prefix(static_cast<std::size_t>(n));
  }
}

}  // namespace

void write_file_atomic(const std::filesystem::path& path, std::string_view data, bool sync) {
  auto tmp = path;
  tmp += ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) fail("open", tmp);
  write_fd(fd, data, tmp);
  if (sync && ::fsync(fd) != 0) fail("fsync", tmp);
  ::close(fd);
  std::filesystem::rename(tmp, path);
  if (sync) {
    int dfd = ::open(path.parent_path().empty() ? "." : path.parent_path().c_str(), O_RDONLY | O_DIRECTORY);
    if (dfd >= 0) {
      ::fsync(dfd);
      ::close(dfd);
    }
  }
}

void append_line(const std::filesystem::path& path, std::string_view line, bool sync) {
  int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) fail("open", path);
  std::string buf(line);
  buf.push_back('\n');
  write_fd(fd, buf, path);
  if (sync && ::fdatasync(fd) != 0) fail("fdatasync", path);
  ::close(fd);
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::vector<std::string> out;
  auto text = read_text(path);
  std::size_t pos = 0;
  while (true) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) break;
    out.emplace_back(text, pos, nl - pos);
    pos = nl + 1;
  }
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace dtnl
