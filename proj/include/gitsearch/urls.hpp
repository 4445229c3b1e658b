#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace gitsearch {

/// Controls which query parameters are treated as tracking noise and whether
/// URL fragments are dropped during normalization.
struct UrlNormalizationPolicy {
    std::vector<std::string> tracked_param_prefixes{"utm_"};
    std::vector<std::string> tracked_param_exact{"ref", "fbclid", "gclid"};
    bool strip_fragment = true;
};

/// Byte range [begin, end) of one URL occurrence inside a text. Trailing
/// punctuation that merely abuts the URL is not part of the span.
struct UrlSpan {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::string_view view(std::string_view text) const { return text.substr(begin, end - begin); }
};

/// Finds every http/https URL occurrence, left to right, non-overlapping.
std::vector<UrlSpan> find_url_spans(std::string_view text);

/// Lowercases scheme and host, drops the fragment (per policy), removes
/// tracking query parameters, and strips trailing punctuation. Path and kept
/// query parameters are preserved verbatim.
std::string normalize_url(std::string_view url, const UrlNormalizationPolicy& policy);

/// All URLs in `text`, normalized, first-occurrence order, deduplicated.
std::vector<std::string> extract_urls(std::string_view text, const UrlNormalizationPolicy& policy);

/// Replaces every URL occurrence in `text` with its normalized form.
std::string rewrite_urls(std::string_view text, const UrlNormalizationPolicy& policy);

/// Host component of a normalized URL ("" when it cannot be determined).
std::string url_host(std::string_view url);

} // namespace gitsearch
