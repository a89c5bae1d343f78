#include "vulncat/diagnostic.hpp"

#include <algorithm>
#include <array>
#include <sstream>
#include <tuple>

#include "vulncat/model.hpp"

namespace vulncat {

namespace {

constexpr std::array kAllCodes = {
    codes::kTaxonomyUnknown,   codes::kIdSyntax,         codes::kDupId,
    codes::kCoverageRange,     codes::kSectionMissing,   codes::kKeyDup,
    codes::kParseSource,       codes::kParseConsequence, codes::kFieldMissing,
    codes::kFieldSyntax,       codes::kSyntax,           codes::kExtendsCycle,
    codes::kRedundantExtension, codes::kExtensionInvalid, codes::kIo,
    codes::kNotFound,          codes::kDanglingSeeAlso,  codes::kDanglingExtends,
    codes::kNearMissRef,       codes::kExtensionValue,   codes::kDateFormat,
    codes::kPlatformOverlap,   codes::kDupName,          codes::kUnknownKey,
    codes::kUnknownSection,    codes::kBuiltinExtensionValue, codes::kFilenameMismatch,
};

// Identifiers first in catalog order, then any other label alphabetically.
std::tuple<int, Identifier, std::string> entry_key(const std::string& entry) {
    if (const auto id = try_parse_identifier(entry)) return {0, *id, ""};
    return {1, Identifier{}, entry};
}

}  // namespace

std::string_view severity_name(Severity severity) {
    switch (severity) {
        case Severity::Error: return "ERROR";
        case Severity::Warning: return "WARNING";
        case Severity::Info: return "INFO";
    }
    return "ERROR";
}

std::span<const std::string_view> all_codes() { return kAllCodes; }

Diagnostic make_diagnostic(Severity severity, std::string_view code, std::string message, Location location) {
    return Diagnostic{severity, std::string(code), std::move(message), std::move(location), std::nullopt};
}

std::string format_diagnostic(const Diagnostic& d) {
    std::ostringstream os;
    os << severity_name(d.severity) << ' ' << d.code << ' ' << (d.location.entry.empty() ? "-" : d.location.entry)
       << ':' << (d.location.field.empty() ? "-" : d.location.field) << ':';
    if (d.location.line) {
        os << *d.location.line;
    } else {
        os << '-';
    }
    os << ' ' << d.message;
    return os.str();
}

bool has_errors(std::span<const Diagnostic> diagnostics) {
    return count_severity(diagnostics, Severity::Error) > 0;
}

std::size_t count_severity(std::span<const Diagnostic> diagnostics, Severity severity) {
    return static_cast<std::size_t>(std::count_if(diagnostics.begin(), diagnostics.end(),
                                                  [severity](const Diagnostic& d) { return d.severity == severity; }));
}

void sort_diagnostics(std::vector<Diagnostic>& diagnostics) {
    std::stable_sort(diagnostics.begin(), diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
        const auto ka = entry_key(a.location.entry);
        const auto kb = entry_key(b.location.entry);
        if (ka != kb) return ka < kb;
        if (a.code != b.code) return a.code < b.code;
        if (a.location.field != b.location.field) return a.location.field < b.location.field;
        if (a.location.line != b.location.line) return a.location.line < b.location.line;
        return a.message < b.message;
    });
}

std::ostream& operator<<(std::ostream& os, const Diagnostic& diagnostic) {
    return os << format_diagnostic(diagnostic);
}

}  // namespace vulncat
