#pragma once

#include "toolflow/core.hpp"
#include "toolflow/log.hpp"
#include "toolflow/provider.hpp"

#include <string>
#include <string_view>
#include <utility>

namespace toolflow::detail {

// complete -> parse, appending the bad reply and a corrective user message on
// MalformedOutput. Returns the parsed value and the number of re-asks.
template <typename Parse>
auto ask_with_retries(const Provider& provider, CompletionRequest req, int max_retries,
                      const std::string& format_hint, Parse&& parse)
    -> std::pair<decltype(parse(std::string_view{})), int> {
    for (int attempt = 0;; ++attempt) {
        std::string out = provider.complete(req);
        try {
            return {parse(std::string_view(out)), attempt};
        } catch (const MalformedOutput& e) {
            if (attempt >= max_retries) throw;
            log_debug(std::string("re-asking after malformed output: ") + e.what());
            req.messages.push_back({Role::Assistant, out});
            req.messages.push_back(
                {Role::User, "Your previous reply could not be parsed: " + std::string(e.what()) +
                                 ". Reply again with exactly one JSON object of the form " +
                                 format_hint + " and nothing else."});
        }
    }
}

}  // namespace toolflow::detail
