#include "vulncat/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "vulncat/text.hpp"

namespace vulncat {

namespace {

using namespace std::string_view_literals;

constexpr std::array kLocation = {
    "Bundle Archive"sv,
    "Bundle Manifest"sv,
    "Bundle Activator"sv,
    "Bundle Fragment"sv,
    "Application Code - Native Code"sv,
    "Application Code - Java Code"sv,
    "Application Code - Java API"sv,
    "Application Code - OSGi API"sv,
};

constexpr std::array kSourceEntity = {
    "OS"sv,
    "JVM - Runtime API"sv,
    "JVM - APIs"sv,
    "OSGi Platform - Module Layer"sv,
    "OSGi Platform - Life-Cycle Layer"sv,
    "OSGi Platform - Service Layer"sv,
    "OSGi Platform - Bundle Repository Client"sv,
    "Application Code"sv,
};

constexpr std::array kFunctionality = {
    "Kill utility"sv,
    "Value of Method Parameters"sv,
    "System.exit method"sv,
    "Runtime.halt method"sv,
    "Native Code Execution"sv,
    "Thread API"sv,
    "Reflection API"sv,
    "ClassLoader API"sv,
    "File API"sv,
    "Java Archive"sv,
    "Bundle Management"sv,
    "Bundle Fragments"sv,
};

constexpr std::array kFlaw = {
    "No Algorithm Safety - Java"sv,
    "No Algorithm Safety - Native Code"sv,
    "Non OSGi R4-compliant Digital Signature Validation in the JVM"sv,
    "No Verification of Bundle Archive Validity"sv,
    "No Check of Size of Loaded Bundles"sv,
    "No Check of Size of stored Data"sv,
    "No safe Bundle Start"sv,
    "No Removal of Uninstalled Bundle Data"sv,
    "Bundle Meta-data Handling - No Safe-Default"sv,
    "Uncontrolled Service Registration"sv,
    "Architecture of the Application - No Validation of Service Dependency"sv,
};

constexpr std::array kTarget = {
    "Platform"sv,
    "OSGi Element - Platform Management Utility"sv,
    "OSGi Element - Bundle"sv,
    "OSGi Element - Service"sv,
    "OSGi Element - Package"sv,
};

constexpr std::array kConsequenceType = {
    "Unavailability"sv,
    "Performance Breakdown"sv,
    "Undue Access"sv,
};

constexpr std::array kConsequenceQualifier = {
    "Platform"sv,
    "Service"sv,
    "Package"sv,
};

constexpr std::array kIntroductionTime = {
    "Platform Design or Implementation"sv,
    "Development"sv,
    "Bundle Meta-data Generation"sv,
    "Bundle Digital Signature"sv,
    "Installation"sv,
    "Service Publication or Resolution"sv,
};

constexpr std::array kExploitTime = {
    "Download"sv,
    "Installation"sv,
    "Bundle Start"sv,
    "Execution"sv,
};

constexpr std::array kOsgiProfile = {
    "CDC-1.0/Foundation-1.0"sv,
    "OSGi/Minimum-1.1"sv,
    "JRE-1.1"sv,
    "J2SE-1.2"sv,
    "J2SE-1.3"sv,
    "J2SE-1.4"sv,
    "J2SE-1.5"sv,
    "J2SE-1.6"sv,
    "PersonalJava-1.1"sv,
    "PersonalJava-1.2"sv,
    "CDC-1.0/PersonalBasis-1.0"sv,
    "CDC-1.0/PersonalJava-1.0"sv,
};

constexpr std::array kPlatform = {
    "Oscar"sv,
    "Felix"sv,
    "Knopflerfish"sv,
    "Equinox"sv,
};

constexpr std::array kExistingMechanism = {
    "Java Permissions"sv,
    "OSGi AdminPermission"sv,
    "SFelix OSGi Security Layer"sv,
};

constexpr std::array kEnforcementPoint = {
    "Platform startup"sv,
    "Bundle Installation"sv,
};

constexpr std::array kPotentialMechanism = {
    "Code static Analysis"sv,
    "OSGi Platform Modification - Bundle Startup Process"sv,
    "OSGi Platform Modification - Installation Meta-data Handling"sv,
    "OSGi Platform Modification - Service Publication"sv,
    "Bundle size control before download"sv,
    "Service-level dependency validation"sv,
    "Resource Control and Isolation - CPU"sv,
    "Resource Control and Isolation - Memory"sv,
    "Resource Control and Isolation - Disk Space"sv,
    "Access Control - FileSystem"sv,
    "Miscellaneous"sv,
};

constexpr std::array kAttackPrevention = {
    "Stop a ill-behaving thread"sv,
};

constexpr std::array kReaction = {
    "Uninstall the malicious bundle"sv,
    "Erase files"sv,
    "Stop the system process"sv,
    "Restart the platform"sv,
};

// Values the shipped catalog uses that the grammar does not list.
constexpr std::string_view kDefaultExtensions =
    "# Values used by the reference catalog that are not grammar literals.\n"
    "platform: Concierge\n"
    "platform: SFelix\n"
    "potential-mechanism: OSGi Platform Modification - Bundle Uninstall Process\n"
    "attack-prevention: Stop the ill-behaving thread\n";

struct DimensionInfo {
    Dimension dimension;
    std::string_view name;
    std::span<const std::string_view> values;
};

constexpr std::array<DimensionInfo, 16> kDimensionTable = {{
    {Dimension::Location, "location", kLocation},
    {Dimension::SourceEntity, "source-entity", kSourceEntity},
    {Dimension::Functionality, "functionality", kFunctionality},
    {Dimension::Flaw, "flaw", kFlaw},
    {Dimension::Target, "target", kTarget},
    {Dimension::ConsequenceType, "consequence-type", kConsequenceType},
    {Dimension::ConsequenceQualifier, "consequence-qualifier", kConsequenceQualifier},
    {Dimension::IntroductionTime, "introduction-time", kIntroductionTime},
    {Dimension::ExploitTime, "exploit-time", kExploitTime},
    {Dimension::OsgiProfile, "osgi-profile", kOsgiProfile},
    {Dimension::Platform, "platform", kPlatform},
    {Dimension::ExistingMechanism, "existing-mechanism", kExistingMechanism},
    {Dimension::EnforcementPoint, "enforcement-point", kEnforcementPoint},
    {Dimension::PotentialMechanism, "potential-mechanism", kPotentialMechanism},
    {Dimension::AttackPrevention, "attack-prevention", kAttackPrevention},
    {Dimension::Reaction, "reaction", kReaction},
}};

const DimensionInfo& info(Dimension dimension) {
    return kDimensionTable[static_cast<std::size_t>(dimension)];
}

bool is_base(Dimension dimension, std::string_view text) {
    const auto values = base_values(dimension);
    return std::find(values.begin(), values.end(), text) != values.end();
}

std::string fold_first_letter(std::string_view text) {
    std::string folded(text);
    const auto c = static_cast<unsigned char>(folded.front());
    folded.front() = static_cast<char>(std::isupper(c) ? std::tolower(c) : std::toupper(c));
    return folded;
}

}  // namespace

std::string_view dimension_name(Dimension dimension) { return info(dimension).name; }

std::optional<Dimension> parse_dimension(std::string_view name) {
    for (const auto& entry : kDimensionTable) {
        if (entry.name == name) return entry.dimension;
    }
    return std::nullopt;
}

std::string_view status_name(ValueStatus status) {
    switch (status) {
        case ValueStatus::Base: return "base";
        case ValueStatus::Extension: return "extension";
        case ValueStatus::Unknown: return "unknown";
    }
    return "unknown";
}

std::span<const std::string_view> base_values(Dimension dimension) { return info(dimension).values; }

std::string_view default_extensions_text() { return kDefaultExtensions; }

TaxonomyRegistry TaxonomyRegistry::with_defaults() {
    TaxonomyRegistry registry;
    registry.loading_builtin_ = true;
    const auto diagnostics = registry.load_extensions(kDefaultExtensions, "<builtin>");
    registry.loading_builtin_ = false;
    if (has_errors(diagnostics)) throw std::logic_error("embedded extension set is invalid");
    return registry;
}

ValueStatus TaxonomyRegistry::lookup(Dimension dimension, std::string_view text) const {
    if (text.empty()) return ValueStatus::Unknown;
    if (is_base(dimension, text)) return ValueStatus::Base;
    if (const auto it = extensions_.find(dimension);
        it != extensions_.end() && it->second.contains(std::string(text))) {
        return ValueStatus::Extension;
    }
    return ValueStatus::Unknown;
}

TaxonomyValue TaxonomyRegistry::resolve(Dimension dimension, std::string_view text) const {
    std::string normalized = normalize_whitespace(text);
    if (const auto status = lookup(dimension, normalized); status != ValueStatus::Unknown) {
        return {dimension, std::move(normalized), status};
    }
    if (!normalized.empty() && std::isalpha(static_cast<unsigned char>(normalized.front()))) {
        std::string folded = fold_first_letter(normalized);
        if (const auto status = lookup(dimension, folded); status != ValueStatus::Unknown) {
            return {dimension, std::move(folded), status};
        }
    }
    return {dimension, std::move(normalized), ValueStatus::Unknown};
}

std::optional<Diagnostic> TaxonomyRegistry::register_extension(Dimension dimension, std::string_view text) {
    std::string normalized = normalize_whitespace(text);
    if (normalized.empty() || normalized == "-") {
        return make_diagnostic(Severity::Error, codes::kExtensionInvalid,
                               "empty extension value for " + std::string(dimension_name(dimension)),
                               {"<registry>", std::string(dimension_name(dimension)), std::nullopt});
    }
    if (is_base(dimension, normalized)) {
        return make_diagnostic(Severity::Error, codes::kRedundantExtension,
                               "\"" + normalized + "\" is already a base " +
                                   std::string(dimension_name(dimension)) + " value",
                               {"<registry>", std::string(dimension_name(dimension)), std::nullopt});
    }
    if (loading_builtin_) builtin_[dimension].insert(normalized);
    extensions_[dimension].insert(std::move(normalized));
    return std::nullopt;
}

bool TaxonomyRegistry::is_builtin_extension(Dimension dimension, std::string_view text) const {
    const auto it = builtin_.find(dimension);
    return it != builtin_.end() && it->second.contains(std::string(text));
}

std::vector<std::string> TaxonomyRegistry::extensions(Dimension dimension) const {
    const auto it = extensions_.find(dimension);
    if (it == extensions_.end()) return {};
    return {it->second.begin(), it->second.end()};
}

std::vector<std::string> TaxonomyRegistry::vocabulary(Dimension dimension) const {
    std::vector<std::string> out(base_values(dimension).begin(), base_values(dimension).end());
    for (auto& value : extensions(dimension)) out.push_back(std::move(value));
    return out;
}

std::optional<std::string> TaxonomyRegistry::nearest(Dimension dimension, std::string_view text,
                                                     std::size_t max_distance) const {
    std::optional<std::string> best;
    std::size_t best_distance = max_distance + 1;
    for (const auto& candidate : vocabulary(dimension)) {
        const std::size_t distance = edit_distance(text, candidate);
        if (distance < best_distance || (distance == best_distance && best && candidate < *best)) {
            best = candidate;
            best_distance = distance;
        }
    }
    return best;
}

std::vector<Diagnostic> TaxonomyRegistry::load_extensions(std::string_view text, std::string_view origin) {
    std::vector<Diagnostic> diagnostics;
    std::istringstream stream{std::string(text)};
    std::string raw;
    int line_number = 0;
    while (std::getline(stream, raw)) {
        ++line_number;
        const std::string_view line = trim(raw);
        if (line.empty() || line.front() == '#') continue;
        const Location where{std::string(origin), "", line_number};
        const auto colon = line.find(':');
        if (colon == std::string_view::npos) {
            diagnostics.push_back(make_diagnostic(Severity::Error, codes::kSyntax,
                                                  "expected `dimension: value`", where));
            continue;
        }
        const auto name = trim(line.substr(0, colon));
        const auto dimension = parse_dimension(name);
        if (!dimension) {
            diagnostics.push_back(make_diagnostic(Severity::Error, codes::kExtensionInvalid,
                                                  "unknown dimension \"" + std::string(name) + "\"", where));
            continue;
        }
        if (auto failure = register_extension(*dimension, line.substr(colon + 1))) {
            failure->location = {std::string(origin), std::string(name), line_number};
            diagnostics.push_back(std::move(*failure));
        }
    }
    return diagnostics;
}

std::vector<Diagnostic> TaxonomyRegistry::load_extensions_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        return {make_diagnostic(Severity::Error, codes::kIo, "cannot read extensions file",
                                {path.string(), "", std::nullopt})};
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return load_extensions(buffer.str(), path.string());
}

}  // namespace vulncat
