#include "vulncat/model.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <set>

#include "vulncat/text.hpp"

namespace vulncat {

std::string_view source_ref_name(SourceRef ref) {
    switch (ref) {
        case SourceRef::Archive: return "archive";
        case SourceRef::Java: return "java";
        case SourceRef::Native: return "native";
        case SourceRef::Osgi: return "osgi";
    }
    return "archive";
}

std::optional<SourceRef> parse_source_ref(std::string_view text) {
    for (auto ref : {SourceRef::Archive, SourceRef::Java, SourceRef::Native, SourceRef::Osgi}) {
        if (source_ref_name(ref) == text) return ref;
    }
    return std::nullopt;
}

std::string identifier_text(const Identifier& id) {
    return std::string(kCatalogId) + "." + std::string(source_ref_name(id.src_ref)) + "." +
           std::to_string(id.number);
}

std::optional<Identifier> try_parse_identifier(std::string_view text) {
    const auto first = text.find('.');
    if (first == std::string_view::npos) return std::nullopt;
    const auto second = text.find('.', first + 1);
    if (second == std::string_view::npos) return std::nullopt;

    const auto catalog = text.substr(0, first);
    if (catalog != "mb" && catalog != "Mb") return std::nullopt;
    const auto ref = parse_source_ref(text.substr(first + 1, second - first - 1));
    if (!ref) return std::nullopt;

    const auto digits = text.substr(second + 1);
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        return std::nullopt;
    }
    unsigned number = 0;
    const auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), number);
    if (ec != std::errc{} || end != digits.data() + digits.size() || number == 0) return std::nullopt;
    return Identifier{*ref, number};
}

std::string date_text(const Date& date) {
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%04d-%02u-%02u", date.year, date.month, date.day);
    return buffer;
}

bool is_valid_date(const Date& date) {
    if (date.year < 0 || date.year > 3000) return false;
    const std::chrono::year_month_day ymd{std::chrono::year{date.year}, std::chrono::month{date.month},
                                          std::chrono::day{date.day}};
    return ymd.ok();
}

namespace {

class Validator {
public:
    Validator(const VulnerabilityPattern& pattern, const TaxonomyRegistry& registry, const FieldLines* lines)
        : registry_(registry), lines_(lines), entry_(identifier_text(pattern.reference.identifier)) {}

    void error(std::string_view code, std::string_view field, std::string message) {
        add(Severity::Error, code, field, std::move(message));
    }

    void add(Severity severity, std::string_view code, std::string_view field, std::string message,
             std::optional<std::string> suggestion = std::nullopt) {
        Diagnostic d = make_diagnostic(severity, code, std::move(message), {entry_, std::string(field), line(field)});
        d.suggestion = std::move(suggestion);
        diagnostics_.push_back(std::move(d));
    }

    /// Reports on a value whose membership has already been decided.
    void report(std::string_view field, Dimension dimension, const std::string& text, ValueStatus status,
                std::string_view vocabulary_label, std::optional<std::string> suggestion) {
        if (status == ValueStatus::Unknown) {
            std::string message = "unknown " + std::string(vocabulary_label) + " value \"" + text + "\"";
            if (suggestion) message += " (did you mean \"" + *suggestion + "\"?)";
            add(Severity::Error, codes::kTaxonomyUnknown, field, std::move(message), std::move(suggestion));
        } else if (status == ValueStatus::Extension) {
            const bool builtin = registry_.is_builtin_extension(dimension, text);
            add(builtin ? Severity::Info : Severity::Warning,
                builtin ? codes::kBuiltinExtensionValue : codes::kExtensionValue, field,
                std::string(dimension_name(dimension)) + " value \"" + text + "\" is an extension");
        }
    }

    void check(std::string_view field, Dimension dimension, const TaxonomyValue& value) {
        const auto status = registry_.lookup(dimension, value.text);
        std::optional<std::string> suggestion;
        if (status == ValueStatus::Unknown) suggestion = registry_.nearest(dimension, value.text);
        report(field, dimension, value.text, status, dimension_name(dimension), std::move(suggestion));
    }

    void check_all(std::string_view field, Dimension dimension, const std::vector<TaxonomyValue>& values) {
        for (const auto& value : values) check(field, dimension, value);
    }

    void check_cause(const Cause& cause) {
        const auto& text = cause.value.text;
        const auto as_functionality = registry_.lookup(Dimension::Functionality, text);
        const auto as_flaw = registry_.lookup(Dimension::Flaw, text);
        switch (cause.kind) {
            case CauseKind::Functionality: {
                report("source", Dimension::Functionality, text, as_functionality, "functionality",
                       as_functionality == ValueStatus::Unknown
                           ? registry_.nearest(Dimension::Functionality, text)
                           : std::nullopt);
                return;
            }
            case CauseKind::Flaw: {
                report("source", Dimension::Flaw, text, as_flaw, "flaw",
                       as_flaw == ValueStatus::Unknown ? registry_.nearest(Dimension::Flaw, text)
                                                       : std::nullopt);
                return;
            }
            case CauseKind::Unclassified: break;
        }
        if (as_functionality != ValueStatus::Unknown) {
            report("source", Dimension::Functionality, text, as_functionality, "functionality", std::nullopt);
        } else if (as_flaw != ValueStatus::Unknown) {
            report("source", Dimension::Flaw, text, as_flaw, "flaw", std::nullopt);
        } else {
            auto suggestion = registry_.nearest(Dimension::Functionality, text);
            auto flaw_suggestion = registry_.nearest(Dimension::Flaw, text);
            if (!suggestion ||
                (flaw_suggestion && edit_distance(text, *flaw_suggestion) < edit_distance(text, *suggestion))) {
                suggestion = flaw_suggestion;
            }
            report("source", Dimension::Functionality, text, ValueStatus::Unknown, "functionality or flaw",
                   std::move(suggestion));
        }
    }

    std::vector<Diagnostic> take() { return std::move(diagnostics_); }

private:
    std::optional<int> line(std::string_view field) const {
        if (!lines_) return std::nullopt;
        const auto it = lines_->find(std::string(field));
        if (it == lines_->end()) return std::nullopt;
        return it->second;
    }

    const TaxonomyRegistry& registry_;
    const FieldLines* lines_;
    std::string entry_;
    std::vector<Diagnostic> diagnostics_;
};

}  // namespace

std::vector<Diagnostic> validate_pattern(const VulnerabilityPattern& pattern, const TaxonomyRegistry& registry,
                                         const FieldLines* lines) {
    Validator v(pattern, registry, lines);
    const auto& ref = pattern.reference;
    const auto& desc = pattern.description;
    const auto& impl = pattern.implementation;
    const auto& prot = pattern.protection;

    if (ref.identifier.number == 0) v.error(codes::kIdSyntax, "identifier", "identifier number must be positive");
    if (ref.name.empty()) v.error(codes::kFieldMissing, "name", "vulnerability name is empty");
    if (desc.description.empty()) v.error(codes::kFieldMissing, "description", "description is empty");

    if (ref.locations.empty()) v.error(codes::kFieldMissing, "location", "at least one location is required");
    v.check_all("location", Dimension::Location, ref.locations);

    if (ref.sources.empty()) v.error(codes::kFieldMissing, "source", "at least one source is required");
    for (const auto& source : ref.sources) {
        v.check("source", Dimension::SourceEntity, source.entity);
        if (source.causes.empty()) {
            v.error(codes::kParseSource, "source", "source entity \"" + source.entity.text + "\" names no cause");
        }
        for (const auto& cause : source.causes) v.check_cause(cause);
    }

    if (ref.targets.empty()) v.error(codes::kFieldMissing, "target", "at least one target is required");
    v.check_all("target", Dimension::Target, ref.targets);

    if (ref.consequences.empty()) {
        v.error(codes::kFieldMissing, "consequence-type", "at least one consequence is required");
    }
    for (const auto& consequence : ref.consequences) {
        v.check("consequence-type", Dimension::ConsequenceType, consequence.base);
        v.check_all("consequence-type", Dimension::ConsequenceQualifier, consequence.qualifiers);
        std::set<std::string> seen;
        for (const auto& qualifier : consequence.qualifiers) {
            if (!seen.insert(qualifier.text).second) {
                v.error(codes::kParseConsequence, "consequence-type",
                        "duplicate qualifier \"" + qualifier.text + "\"");
            }
        }
    }

    v.check("introduction-time", Dimension::IntroductionTime, ref.introduction_time);
    v.check("exploit-time", Dimension::ExploitTime, ref.exploit_time);

    v.check("osgi-profile", Dimension::OsgiProfile, impl.osgi_profile);
    if (!is_valid_date(impl.date)) v.error(codes::kFieldSyntax, "date", "invalid date " + date_text(impl.date));
    if (impl.test_coverage < 0 || impl.test_coverage > 100) {
        v.error(codes::kCoverageRange, "test-coverage",
                "test coverage " + std::to_string(impl.test_coverage) + "% is outside 0..100");
    }
    v.check_all("vulnerable-platforms", Dimension::Platform, impl.vulnerable_platforms);
    v.check_all("robust-platforms", Dimension::Platform, impl.robust_platforms);
    for (const auto& vulnerable : impl.vulnerable_platforms) {
        for (const auto& robust : impl.robust_platforms) {
            if (vulnerable.text == robust.text) {
                v.add(Severity::Warning, codes::kPlatformOverlap, "robust-platforms",
                      "platform \"" + robust.text + "\" is listed as both vulnerable and robust");
            }
        }
    }

    v.check_all("existing-mechanisms", Dimension::ExistingMechanism, prot.existing_mechanisms);
    if (prot.enforcement_point) v.check("enforcement-point", Dimension::EnforcementPoint, *prot.enforcement_point);
    for (const auto& mechanism : prot.potential_mechanisms) {
        v.check("potential-mechanisms", Dimension::PotentialMechanism, mechanism.name);
    }
    v.check_all("attack-prevention", Dimension::AttackPrevention, prot.attack_prevention);
    v.check_all("reaction", Dimension::Reaction, prot.reaction);
    return v.take();
}

std::vector<std::string> values_in(const VulnerabilityPattern& pattern, Dimension dimension) {
    std::vector<std::string> out;
    const auto add_all = [&out](const std::vector<TaxonomyValue>& values) {
        for (const auto& value : values) out.push_back(value.text);
    };
    const auto add_one = [&out](const TaxonomyValue& value) {
        if (!value.text.empty()) out.push_back(value.text);
    };
    const auto add_causes = [&](CauseKind kind) {
        for (const auto& source : pattern.reference.sources) {
            for (const auto& cause : source.causes) {
                if (cause.kind == kind) out.push_back(cause.value.text);
            }
        }
    };
    const auto& ref = pattern.reference;
    const auto& impl = pattern.implementation;
    const auto& prot = pattern.protection;
    switch (dimension) {
        case Dimension::Location: add_all(ref.locations); break;
        case Dimension::SourceEntity:
            for (const auto& source : ref.sources) out.push_back(source.entity.text);
            break;
        case Dimension::Functionality: add_causes(CauseKind::Functionality); break;
        case Dimension::Flaw: add_causes(CauseKind::Flaw); break;
        case Dimension::Target: add_all(ref.targets); break;
        case Dimension::ConsequenceType:
            for (const auto& consequence : ref.consequences) out.push_back(consequence.base.text);
            break;
        case Dimension::ConsequenceQualifier:
            for (const auto& consequence : ref.consequences) add_all(consequence.qualifiers);
            break;
        case Dimension::IntroductionTime: add_one(ref.introduction_time); break;
        case Dimension::ExploitTime: add_one(ref.exploit_time); break;
        case Dimension::OsgiProfile: add_one(impl.osgi_profile); break;
        case Dimension::Platform:
            add_all(impl.vulnerable_platforms);
            add_all(impl.robust_platforms);
            break;
        case Dimension::ExistingMechanism: add_all(prot.existing_mechanisms); break;
        case Dimension::EnforcementPoint:
            if (prot.enforcement_point) add_one(*prot.enforcement_point);
            break;
        case Dimension::PotentialMechanism:
            for (const auto& mechanism : prot.potential_mechanisms) out.push_back(mechanism.name.text);
            break;
        case Dimension::AttackPrevention: add_all(prot.attack_prevention); break;
        case Dimension::Reaction: add_all(prot.reaction); break;
    }
    return out;
}

}  // namespace vulncat
