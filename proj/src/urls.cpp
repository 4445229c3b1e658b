#include "gitsearch/urls.hpp"

#include <algorithm>
#include <cctype>

#include "gitsearch/text_util.hpp"

namespace gitsearch {

namespace {

bool is_url_char(char c) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) return true;
    // RFC 3986 unreserved, sub-delims, and general syntax characters.
    static constexpr std::string_view kAllowed = "-._~:/?#[]@!$&'()*+,;=%";
    return kAllowed.find(c) != std::string_view::npos;
}

bool is_trailing_punctuation(char c) {
    static constexpr std::string_view kTrailing = ").,;:!?\"']}";
    return kTrailing.find(c) != std::string_view::npos;
}

bool scheme_at(std::string_view text, std::size_t pos, std::size_t& scheme_len) {
    static constexpr std::string_view kHttp = "http";
    if (pos + kHttp.size() > text.size()) return false;
    if (!iequals(text.substr(pos, 4), "http")) return false;
    std::size_t p = pos + 4;
    if (p < text.size() && (text[p] == 's' || text[p] == 'S')) ++p;
    if (p + 3 > text.size() || text.substr(p, 3) != "://") return false;
    scheme_len = p + 3 - pos;
    return true;
}

} // namespace

std::vector<UrlSpan> find_url_spans(std::string_view text) {
    std::vector<UrlSpan> spans;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t scheme_len = 0;
        if (!scheme_at(text, i, scheme_len)) {
            ++i;
            continue;
        }
        std::size_t end = i + scheme_len;
        while (end < text.size() && is_url_char(text[end])) ++end;
        // punctuation hugging the URL belongs to the surrounding sentence
        while (end > i + scheme_len && is_trailing_punctuation(text[end - 1])) --end;
        if (end > i + scheme_len) {
            spans.push_back({i, end});
            i = end;
        } else {
            i += scheme_len; // bare scheme, no host
        }
    }
    return spans;
}

std::string normalize_url(std::string_view url, const UrlNormalizationPolicy& policy) {
    std::string s(url);
    while (!s.empty() && is_trailing_punctuation(s.back())) s.pop_back();

    const std::size_t scheme_end = s.find("://");
    if (scheme_end == std::string::npos) return s;

    for (std::size_t i = 0; i < scheme_end; ++i) {
        s[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
    }
    const std::size_t authority_begin = scheme_end + 3;
    std::size_t authority_end = s.size();
    for (std::size_t i = authority_begin; i < s.size(); ++i) {
        if (s[i] == '/' || s[i] == '?' || s[i] == '#') {
            authority_end = i;
            break;
        }
    }
    for (std::size_t i = authority_begin; i < authority_end; ++i) {
        s[i] = static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
    }

    if (policy.strip_fragment) {
        if (const std::size_t hash = s.find('#', authority_end); hash != std::string::npos) {
            s.erase(hash);
        }
    }

    const std::size_t qpos = s.find('?', authority_end);
    if (qpos != std::string::npos) {
        const std::string query = s.substr(qpos + 1);
        std::string kept;
        std::size_t start = 0;
        while (start <= query.size()) {
            const std::size_t amp = query.find('&', start);
            const std::string param =
                query.substr(start, amp == std::string::npos ? std::string::npos : amp - start);
            const std::string key = ascii_lower(param.substr(0, param.find('=')));
            bool tracked = std::any_of(policy.tracked_param_exact.begin(),
                                       policy.tracked_param_exact.end(),
                                       [&](const std::string& k) { return key == k; });
            if (!tracked) {
                tracked = std::any_of(policy.tracked_param_prefixes.begin(),
                                      policy.tracked_param_prefixes.end(), [&](const std::string& p) {
                                          return !p.empty() && key.rfind(p, 0) == 0;
                                      });
            }
            if (!tracked && !param.empty()) {
                if (!kept.empty()) kept.push_back('&');
                kept += param;
            }
            if (amp == std::string::npos) break;
            start = amp + 1;
        }
        s.erase(qpos);
        if (!kept.empty()) s += "?" + kept;
    }

    while (!s.empty() && is_trailing_punctuation(s.back())) s.pop_back();
    return s;
}

std::vector<std::string> extract_urls(std::string_view text, const UrlNormalizationPolicy& policy) {
    std::vector<std::string> urls;
    for (const UrlSpan& span : find_url_spans(text)) {
        std::string normalized = normalize_url(span.view(text), policy);
        if (normalized.empty()) continue;
        if (std::find(urls.begin(), urls.end(), normalized) == urls.end()) {
            urls.push_back(std::move(normalized));
        }
    }
    return urls;
}

std::string rewrite_urls(std::string_view text, const UrlNormalizationPolicy& policy) {
    std::string out;
    out.reserve(text.size());
    std::size_t cursor = 0;
    for (const UrlSpan& span : find_url_spans(text)) {
        out += text.substr(cursor, span.begin - cursor);
        out += normalize_url(span.view(text), policy);
        cursor = span.end;
    }
    out += text.substr(cursor);
    return out;
}

std::string url_host(std::string_view url) {
    const std::size_t scheme_end = url.find("://");
    if (scheme_end == std::string_view::npos) return "";
    const std::size_t begin = scheme_end + 3;
    std::size_t end = url.size();
    for (std::size_t i = begin; i < url.size(); ++i) {
        if (url[i] == '/' || url[i] == '?' || url[i] == '#') {
            end = i;
            break;
        }
    }
    std::string_view authority = url.substr(begin, end - begin);
    if (const std::size_t at = authority.rfind('@'); at != std::string_view::npos) {
        authority = authority.substr(at + 1);
    }
    if (const std::size_t colon = authority.find(':'); colon != std::string_view::npos) {
        authority = authority.substr(0, colon);
    }
    return std::string(authority);
}

} // namespace gitsearch
