#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vulncat/diagnostic.hpp"
#include "vulncat/taxonomy.hpp"

namespace vulncat {

inline constexpr std::string_view kCatalogId = "mb";

/// Ordered alphabetically, which is also the catalog iteration order.
enum class SourceRef { Archive, Java, Native, Osgi };

std::string_view source_ref_name(SourceRef ref);
std::optional<SourceRef> parse_source_ref(std::string_view text);

/// `mb.<src_ref>.<number>`. The catalog part is always "mb".
struct Identifier {
    SourceRef src_ref = SourceRef::Archive;
    unsigned number = 1;

    auto operator<=>(const Identifier&) const = default;
    bool operator==(const Identifier&) const = default;
};

std::string identifier_text(const Identifier& id);

/// Accepts "mb" or "Mb" as catalog id. No diagnostics; see parse_identifier.
std::optional<Identifier> try_parse_identifier(std::string_view text);

enum class CauseKind { Functionality, Flaw, Unclassified };

struct Cause {
    CauseKind kind = CauseKind::Unclassified;
    TaxonomyValue value;

    bool operator==(const Cause&) const = default;
};

struct SourceAttribution {
    TaxonomyValue entity;
    std::vector<Cause> causes;

    bool operator==(const SourceAttribution&) const = default;
};

struct Consequence {
    TaxonomyValue base;
    std::vector<TaxonomyValue> qualifiers;

    bool operator==(const Consequence&) const = default;
};

struct PotentialMechanism {
    TaxonomyValue name;
    std::optional<std::string> note;

    bool operator==(const PotentialMechanism&) const = default;
};

struct Date {
    int year = 1970;
    unsigned month = 1;
    unsigned day = 1;

    auto operator<=>(const Date&) const = default;
    bool operator==(const Date&) const = default;
};

/// YYYY-MM-DD.
std::string date_text(const Date& date);
bool is_valid_date(const Date& date);

struct ReferenceSection {
    std::string name;
    Identifier identifier;
    std::optional<std::string> extends;
    std::string origin;
    std::vector<TaxonomyValue> locations;
    std::vector<SourceAttribution> sources;
    std::vector<TaxonomyValue> targets;
    std::vector<Consequence> consequences;
    TaxonomyValue introduction_time;
    TaxonomyValue exploit_time;

    bool operator==(const ReferenceSection&) const = default;
};

struct DescriptionSection {
    std::string description;
    std::string preconditions;
    std::string attack_process;
    std::string consequence_description;
    std::vector<std::string> see_also;

    bool operator==(const DescriptionSection&) const = default;
};

struct ImplementationSection {
    std::string code_reference;
    TaxonomyValue osgi_profile;
    Date date;
    int test_coverage = 0;
    std::vector<TaxonomyValue> vulnerable_platforms;
    std::vector<TaxonomyValue> robust_platforms;

    bool operator==(const ImplementationSection&) const = default;
};

struct ProtectionSection {
    std::vector<TaxonomyValue> existing_mechanisms;
    std::optional<TaxonomyValue> enforcement_point;
    std::vector<PotentialMechanism> potential_mechanisms;
    std::vector<TaxonomyValue> attack_prevention;
    std::vector<TaxonomyValue> reaction;

    bool operator==(const ProtectionSection&) const = default;
};

/// A key the format does not define, kept so that it survives a round trip.
struct ExtraField {
    std::string section;
    std::string key;
    std::string value;

    bool operator==(const ExtraField&) const = default;
};

struct VulnerabilityPattern {
    ReferenceSection reference;
    DescriptionSection description;
    ImplementationSection implementation;
    ProtectionSection protection;
    std::vector<ExtraField> extra_fields;

    bool operator==(const VulnerabilityPattern&) const = default;
};

/// Line numbers of the keys a pattern was parsed from, keyed by file key.
using FieldLines = std::map<std::string, int>;

/// Checks taxonomy membership, identifier, coverage range and platform
/// disjointness against `registry`. Never throws; every finding is a
/// diagnostic. Extension values from the embedded default set are reported
/// at Info, other extensions at Warning.
std::vector<Diagnostic> validate_pattern(const VulnerabilityPattern& pattern, const TaxonomyRegistry& registry,
                                         const FieldLines* lines = nullptr);

/// Every value an entry holds in `dimension`, one per occurrence.
std::vector<std::string> values_in(const VulnerabilityPattern& pattern, Dimension dimension);

}  // namespace vulncat
