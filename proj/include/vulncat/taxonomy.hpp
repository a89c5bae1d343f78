#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vulncat/diagnostic.hpp"

namespace vulncat {

/// One controlled vocabulary of the pattern grammar. The set is closed.
enum class Dimension {
    Location,
    SourceEntity,
    Functionality,
    Flaw,
    Target,
    ConsequenceType,
    ConsequenceQualifier,
    IntroductionTime,
    ExploitTime,
    OsgiProfile,
    Platform,
    ExistingMechanism,
    EnforcementPoint,
    PotentialMechanism,
    AttackPrevention,
    Reaction,
};

inline constexpr std::array<Dimension, 16> kAllDimensions = {
    Dimension::Location,          Dimension::SourceEntity,     Dimension::Functionality,
    Dimension::Flaw,              Dimension::Target,           Dimension::ConsequenceType,
    Dimension::ConsequenceQualifier, Dimension::IntroductionTime, Dimension::ExploitTime,
    Dimension::OsgiProfile,       Dimension::Platform,         Dimension::ExistingMechanism,
    Dimension::EnforcementPoint,  Dimension::PotentialMechanism, Dimension::AttackPrevention,
    Dimension::Reaction,
};

/// Hyphenated name, e.g. "source-entity".
std::string_view dimension_name(Dimension dimension);
std::optional<Dimension> parse_dimension(std::string_view name);

enum class ValueStatus { Base, Extension, Unknown };

std::string_view status_name(ValueStatus status);

struct TaxonomyValue {
    Dimension dimension = Dimension::Location;
    std::string text;
    ValueStatus status = ValueStatus::Unknown;

    bool operator==(const TaxonomyValue&) const = default;
};

/// Grammar literals of a dimension, fully expanded, in grammar order.
std::span<const std::string_view> base_values(Dimension dimension);

/// The extension set embedded in the binary, in extensions-file syntax.
std::string_view default_extensions_text();

/// Base vocabularies plus per-dimension extension values. Base sets are shared
/// by every instance; only extensions vary. A registry is not modified once it
/// has been handed to readers.
class TaxonomyRegistry {
public:
    /// Base values only.
    TaxonomyRegistry() = default;

    /// Base values plus the embedded default extension set.
    static TaxonomyRegistry with_defaults();

    /// Exact lookup of already-normalized text. Pure.
    ValueStatus lookup(Dimension dimension, std::string_view text) const;

    /// Normalizes whitespace, then looks up `text`, falling back to a
    /// case-folded first letter. On a match the vocabulary spelling is
    /// returned; otherwise the normalized input with status Unknown.
    TaxonomyValue resolve(Dimension dimension, std::string_view text) const;

    /// Registers an extension value. Idempotent. Returns an error diagnostic
    /// when the text is empty or already a base value.
    std::optional<Diagnostic> register_extension(Dimension dimension, std::string_view text);

    /// True when the value came from the embedded default set.
    bool is_builtin_extension(Dimension dimension, std::string_view text) const;

    std::vector<std::string> extensions(Dimension dimension) const;

    /// Base and extension values in a stable order (grammar, then extensions
    /// sorted).
    std::vector<std::string> vocabulary(Dimension dimension) const;

    /// Closest vocabulary value within `max_distance` edits; ties break
    /// alphabetically.
    std::optional<std::string> nearest(Dimension dimension, std::string_view text,
                                       std::size_t max_distance = 3) const;

    /// Reads `dimension: value` lines; `#` starts a comment line.
    std::vector<Diagnostic> load_extensions(std::string_view text, std::string_view origin);
    std::vector<Diagnostic> load_extensions_file(const std::filesystem::path& path);

private:
    std::map<Dimension, std::set<std::string>> extensions_;
    std::map<Dimension, std::set<std::string>> builtin_;
    bool loading_builtin_ = false;
};

}  // namespace vulncat
