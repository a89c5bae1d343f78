#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vulncat/diagnostic.hpp"
#include "vulncat/model.hpp"
#include "vulncat/taxonomy.hpp"

namespace vulncat {

/// Raw `.vuln` text plus where it came from. Line separators are LF.
struct EntryText {
    std::string raw;
    std::string origin = "<memory>";
};

/// Reads a file and normalizes CRLF/CR to LF. Throws std::runtime_error when
/// the file cannot be read.
EntryText read_entry_file(const std::filesystem::path& path);

/// Value or failure; diagnostics are present in both cases.
template <typename T>
struct Parsed {
    std::optional<T> value;
    std::vector<Diagnostic> diagnostics;

    explicit operator bool() const { return value.has_value(); }
};

struct ParsedEntry {
    std::optional<VulnerabilityPattern> pattern;
    std::vector<Diagnostic> diagnostics;
    FieldLines lines;
};

/// Canonical key order for each of the four sections.
std::span<const std::string_view> section_names();
std::span<const std::string_view> section_keys(std::string_view section);

/// Parses a whole entry. Any Error leaves `pattern` empty; parsing still
/// continues key by key so that every malformed line is reported. Taxonomy
/// membership is left to validate_pattern.
ParsedEntry parse_entry(const EntryText& text, const TaxonomyRegistry& registry);

Parsed<Identifier> parse_identifier(std::string_view text);

/// `Entity (cause; cause); Entity (cause)`. Each cause is classified as a
/// functionality or a flaw by registry membership.
Parsed<std::vector<SourceAttribution>> parse_source_field(std::string_view text, const TaxonomyRegistry& registry);

/// `Base - Qualifier, Qualifier; Base`.
Parsed<std::vector<Consequence>> parse_consequence_field(std::string_view text, const TaxonomyRegistry& registry);

/// `Name (note); Name`.
Parsed<std::vector<PotentialMechanism>> parse_potential_mechanisms(std::string_view text,
                                                                   const TaxonomyRegistry& registry);

/// ISO `YYYY-MM-DD`; the dotted `MONTH.DAY.YEAR` form is accepted with a
/// W-DATE-FORMAT warning.
Parsed<Date> parse_date(std::string_view text);

/// "10%" or "10". Range is checked by validate_pattern.
Parsed<int> parse_coverage(std::string_view text);

/// Canonical text: fixed key order, `key = value`, lists joined by "; ",
/// empty fields as "-", long lines continued with a two-space indent,
/// trailing LF.
std::string serialize_entry(const VulnerabilityPattern& pattern);

}  // namespace vulncat
