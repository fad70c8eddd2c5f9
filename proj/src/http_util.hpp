#pragma once

#include <string>
#include <string_view>

namespace toolflow::detail {

struct UrlParts {
    std::string origin;  // scheme://host[:port]
    std::string path;    // begins with '/' or is empty
};

/// Splits an absolute http(s) URL; throws ConfigError otherwise.
UrlParts split_url(std::string_view url);

std::string url_encode(std::string_view s);

}  // namespace toolflow::detail
