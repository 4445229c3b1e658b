#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace gitsearch {

/// Milliseconds since the Unix epoch, UTC.
using TimestampMillis = std::int64_t;

/// Number of unicode scalar values in a UTF-8 string (continuation bytes are
/// not counted; invalid bytes count as one scalar each).
std::size_t utf8_length(std::string_view text);

std::string trim(std::string_view text);

std::string ascii_lower(std::string_view text);

bool iequals(std::string_view a, std::string_view b);

/// Decodes named (&amp; &quot; &apos; &lt; &gt; &#39;) and numeric
/// (&#NN; / &#xNN;) HTML entities. Single pass; unrecognized sequences are
/// left untouched.
std::string decode_html_entities(std::string_view text);

/// "YYYY-MM-DD" (UTC) for prompt date slots.
std::string format_date_utc(TimestampMillis millis);

/// ISO-8601 "YYYY-MM-DDTHH:MM:SSZ" (UTC).
std::string format_iso8601(TimestampMillis millis);

/// Accepts ISO-8601 dates/datetimes ("2021-01-01", "2021-01-01T12:30:05Z")
/// and plain integer epoch milliseconds.
std::optional<TimestampMillis> parse_timestamp(std::string_view text);

} // namespace gitsearch
