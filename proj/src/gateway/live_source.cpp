// Copyright 2026 The dtn-learn Authors
// SPDX-License-Identifier: Apache-2.0

#include "dtnl/common/error.hpp"
#include "dtnl/gateway/source.hpp"

#ifdef DTNL_ENABLE_LIVE_FETCH
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <json.hpp>
#endif

namespace dtnl::gateway {

#ifdef DTNL_ENABLE_LIVE_FETCH
namespace {

/// MediaWiki plain-text extract client.
class LiveSource : public ArticleSource {
 public:
  explicit LiveSource(std::string base_url) : client_(base_url) {
    client_.set_connection_timeout(10);
    client_.set_read_timeout(30);
    client_.set_follow_location(true);
  }

  LookupResult lookup(const std::string& topic) override {
    httplib::Params params{{"action", "query"}, {"prop", "extracts"}, {"explaintext", "1"},
                           {"redirects", "1"},  {"format", "json"},    {"titles", topic}};
    auto res = client_.Get("/w/api.php", params, httplib::Headers{{"User-Agent", "dtn-learn/1.0"}});
    if (!res) return LookupResult::transient(httplib::to_string(res.error()));
    if (res->status >= 500) return LookupResult::transient("HTTP " + std::to_string(res->status));
    if (res->status != 200) return LookupResult::not_found();
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    if (j.is_discarded()) return LookupResult::transient("unparseable response");
    for (const auto& [key, page] : j["query"]["pages"].items()) {
      if (page.contains("missing") || !page.contains("extract")) return LookupResult::not_found();
      return LookupResult::found(topic, page["extract"].get<std::string>());
    }
    return LookupResult::not_found();
  }

 private:
  httplib::Client client_;
};

}  // namespace

std::unique_ptr<ArticleSource> make_live_source(const std::string& base_url) {
  return std::make_unique<LiveSource>(base_url);
}
#else
std::unique_ptr<ArticleSource> make_live_source(const std::string&) {
  throw Error(Errc::InvalidConfig, "live fetch backend not built (configure with -DDTNL_ENABLE_LIVE_FETCH=ON)");
}
#endif

}  // namespace dtnl::gateway
