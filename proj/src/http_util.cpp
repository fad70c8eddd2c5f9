#include "http_util.hpp"

#include "toolflow/core.hpp"

#include <cctype>
#include <cstdio>

namespace toolflow::detail {

UrlParts split_url(std::string_view url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) throw ConfigError("not an absolute URL: " + std::string(url));
    auto scheme = url.substr(0, scheme_end);
    if (scheme != "http" && scheme != "https") {
        throw ConfigError("unsupported URL scheme: " + std::string(scheme));
    }
    auto path_start = url.find('/', scheme_end + 3);
    UrlParts parts;
    if (path_start == std::string_view::npos) {
        parts.origin = std::string(url);
    } else {
        parts.origin = std::string(url.substr(0, path_start));
        parts.path = std::string(url.substr(path_start));
    }
    if (parts.origin.size() <= scheme_end + 3) throw ConfigError("URL has no host: " + std::string(url));
    while (parts.path.size() > 1 && parts.path.back() == '/') parts.path.pop_back();
    if (parts.path == "/") parts.path.clear();
    return parts;
}

std::string url_encode(std::string_view s) {
    std::string out;
    for (unsigned char c : s) {
        if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
            out += static_cast<char>(c);
        } else {
            char buf[4];
            std::snprintf(buf, sizeof buf, "%%%02X", c);
            out += buf;
        }
    }
    return out;
}

}  // namespace toolflow::detail
