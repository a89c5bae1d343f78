#pragma once

#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace vulncat {

enum class Severity { Error, Warning, Info };

std::string_view severity_name(Severity severity);

/// Where a finding applies. `entry` is an identifier text when one is known,
/// otherwise a file name or "<memory>".
struct Location {
    std::string entry;
    std::string field;
    std::optional<int> line;

    bool operator==(const Location&) const = default;
};

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    Location location;
    std::optional<std::string> suggestion;

    bool operator==(const Diagnostic&) const = default;
};

// The closed set of diagnostic codes. The prefix matches the default severity.
namespace codes {
inline constexpr std::string_view kTaxonomyUnknown = "E-TAXONOMY-UNKNOWN";
inline constexpr std::string_view kIdSyntax = "E-ID-SYNTAX";
inline constexpr std::string_view kDupId = "E-DUP-ID";
inline constexpr std::string_view kCoverageRange = "E-COVERAGE-RANGE";
inline constexpr std::string_view kSectionMissing = "E-SECTION-MISSING";
inline constexpr std::string_view kKeyDup = "E-KEY-DUP";
inline constexpr std::string_view kParseSource = "E-PARSE-SOURCE";
inline constexpr std::string_view kParseConsequence = "E-PARSE-CONSEQUENCE";
inline constexpr std::string_view kFieldMissing = "E-FIELD-MISSING";
inline constexpr std::string_view kFieldSyntax = "E-FIELD-SYNTAX";
inline constexpr std::string_view kSyntax = "E-SYNTAX";
inline constexpr std::string_view kExtendsCycle = "E-EXTENDS-CYCLE";
inline constexpr std::string_view kRedundantExtension = "E-REDUNDANT-EXTENSION";
inline constexpr std::string_view kExtensionInvalid = "E-EXTENSION-INVALID";
inline constexpr std::string_view kIo = "E-IO";
inline constexpr std::string_view kNotFound = "E-NOT-FOUND";
inline constexpr std::string_view kDanglingSeeAlso = "W-DANGLING-SEEALSO";
inline constexpr std::string_view kDanglingExtends = "W-DANGLING-EXTENDS";
inline constexpr std::string_view kNearMissRef = "W-NEAR-MISS-REF";
inline constexpr std::string_view kExtensionValue = "W-EXTENSION-VALUE";
inline constexpr std::string_view kDateFormat = "W-DATE-FORMAT";
inline constexpr std::string_view kPlatformOverlap = "W-PLATFORM-OVERLAP";
inline constexpr std::string_view kDupName = "W-DUP-NAME";
inline constexpr std::string_view kUnknownKey = "W-UNKNOWN-KEY";
inline constexpr std::string_view kUnknownSection = "W-UNKNOWN-SECTION";
inline constexpr std::string_view kBuiltinExtensionValue = "I-EXTENSION-VALUE";
inline constexpr std::string_view kFilenameMismatch = "I-FILENAME-MISMATCH";
}  // namespace codes

std::span<const std::string_view> all_codes();

Diagnostic make_diagnostic(Severity severity, std::string_view code, std::string message, Location location = {});

/// `SEVERITY CODE entry:field:line message`; absent parts print as "-".
std::string format_diagnostic(const Diagnostic& diagnostic);

bool has_errors(std::span<const Diagnostic> diagnostics);
std::size_t count_severity(std::span<const Diagnostic> diagnostics, Severity severity);

/// Orders by entry (identifiers in catalog order, then other labels), then
/// code, field, line and message. Stable.
void sort_diagnostics(std::vector<Diagnostic>& diagnostics);

std::ostream& operator<<(std::ostream& os, const Diagnostic& diagnostic);

}  // namespace vulncat
