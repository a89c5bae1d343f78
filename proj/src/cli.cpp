#include "vulncat/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "vulncat/analysis.hpp"
#include "vulncat/catalog.hpp"
#include "vulncat/parser.hpp"
#include "vulncat/report.hpp"
#include "vulncat/text.hpp"

namespace vulncat {

namespace {

constexpr const char* kExtensionsEnv = "VULNCAT_EXTENSIONS";

struct Options {
    bool strict = false;
    std::string extensions;
    std::string directory;

    std::string by;
    bool include_zero = false;
    std::string format;

    std::string output = "report";
    std::string target = "md";
    bool dump_model = false;
    std::string title;

    std::string key;
    std::vector<std::string> filters;
};

/// Fatal condition that maps to exit code 2.
/// Fatal condition that maps to exit code 2. I/O failures are reported as
/// E-IO diagnostics, usage mistakes as plain messages.
struct UsageFailure {
    std::string message;
    bool io = false;
};

void print(std::ostream& err, const std::vector<Diagnostic>& diagnostics, bool include_info) {
    for (const auto& d : diagnostics) {
        if (include_info || d.severity != Severity::Info) err << format_diagnostic(d) << '\n';
    }
}

int exit_for(const std::vector<Diagnostic>& diagnostics, bool strict) {
    if (has_errors(diagnostics)) return kExitFindings;
    if (strict && count_severity(diagnostics, Severity::Warning) > 0) return kExitFindings;
    return kExitOk;
}

class Session {
public:
    Session(const Options& options, std::ostream& out, std::ostream& err) : options_(options), out_(out), err_(err) {}

    int validate() {
        const auto& catalog = load();
        auto diagnostics = catalog.load_diagnostics;
        sort_diagnostics(diagnostics);
        print(err_, diagnostics, false);
        out_ << catalog.size() << " entries, " << count_severity(diagnostics, Severity::Error) << " errors, "
             << count_severity(diagnostics, Severity::Warning) << " warnings\n";
        return exit_for(diagnostics, options_.strict);
    }

    int lint() {
        const auto& catalog = load();
        const auto diagnostics = vulncat::lint(catalog, registry_);
        print(err_, diagnostics, true);
        out_ << catalog.size() << " entries, " << count_severity(diagnostics, Severity::Error) << " errors, "
             << count_severity(diagnostics, Severity::Warning) << " warnings, "
             << count_severity(diagnostics, Severity::Info) << " infos\n";
        return exit_for(diagnostics, options_.strict);
    }

    int stats() {
        std::vector<Dimension> dimensions(kAllDimensions.begin(), kAllDimensions.end());
        if (!options_.by.empty()) {
            const auto dimension = parse_dimension(options_.by);
            if (!dimension) throw UsageFailure{"unknown dimension \"" + options_.by + "\""};
            dimensions = {*dimension};
        }
        const auto& catalog = load();
        std::vector<Histogram> histograms;
        for (const auto dimension : dimensions) histograms.push_back(histogram(catalog, dimension, {options_.include_zero}));

        if (options_.format == "json") {
            out_ << (options_.by.empty() ? histograms_json(histograms) : histogram_json(histograms.front()));
        } else {
            for (std::size_t i = 0; i < histograms.size(); ++i) {
                if (i) out_ << '\n';
                out_ << histogram_table(histograms[i]);
            }
            if (options_.by.empty()) {
                out_ << '\n' << summary_table(platform_summary(platform_matrix(catalog, registry_)));
                out_ << '\n' << coverage_text(coverage_summary(catalog), mechanism_coverage(catalog));
            }
        }
        return finish_load();
    }

    int matrix() {
        const auto& catalog = load();
        const auto m = platform_matrix(catalog, registry_);
        if (options_.format == "json") out_ << matrix_json(m);
        else if (options_.format == "csv") out_ << matrix_csv(m);
        else out_ << matrix_table(m);
        return finish_load();
    }

    int report() {
        const auto target = parse_render_target(options_.target);
        if (!target) throw UsageFailure{"unknown target \"" + options_.target + "\""};
        const auto& catalog = load();
        GenerateOptions generate_options;
        generate_options.dump_model = options_.dump_model;
        if (!options_.title.empty()) generate_options.report.title = options_.title;
        const auto result = generate(catalog, registry_, *target, options_.output, generate_options);
        print(err_, result.diagnostics, false);
        for (const auto& path : result.written) out_ << "wrote " << path.string() << '\n';
        if (std::any_of(result.diagnostics.begin(), result.diagnostics.end(),
                        [](const Diagnostic& d) { return d.code == codes::kIo; })) {
            return kExitUsage;
        }
        if (result.written.empty()) return kExitFindings;
        return finish_load();
    }

    int show() {
        const auto& catalog = load();
        const auto* pattern = get(catalog, options_.key);
        if (!pattern) {
            err_ << format_diagnostic(make_diagnostic(Severity::Error, codes::kNotFound,
                                                      "no entry with identifier or name \"" + options_.key + "\""))
                 << '\n';
            return kExitFindings;
        }
        if (options_.format == "vuln") {
            out_ << serialize_entry(*pattern);
        } else {
            out_ << pattern->reference.name << " (" << identifier_text(pattern->reference.identifier) << ")\n";
            for (const auto& [heading, items] : entry_fields(*pattern)) {
                out_ << '\n' << heading << '\n';
                for (const auto& item : items) out_ << "  " << item.label << ": " << item.text << '\n';
            }
        }
        return finish_load();
    }

    int query() {
        std::vector<std::pair<Dimension, std::string>> filters;
        for (const auto& filter : options_.filters) {
            const auto equals = filter.find('=');
            if (equals == std::string::npos) throw UsageFailure{"filter \"" + filter + "\" is not dimension=value"};
            const auto name = std::string(trim(std::string_view(filter).substr(0, equals)));
            const auto dimension = parse_dimension(name);
            if (!dimension) throw UsageFailure{"unknown dimension \"" + name + "\""};
            filters.emplace_back(*dimension, std::string(trim(std::string_view(filter).substr(equals + 1))));
        }
        load_registry();
        bool unknown = false;
        for (auto& [dimension, value] : filters) {
            auto resolved = registry_.resolve(dimension, value);
            if (resolved.status == ValueStatus::Unknown) {
                auto d = make_diagnostic(Severity::Error, codes::kTaxonomyUnknown,
                                         "\"" + resolved.text + "\" is not a value of " +
                                             std::string(dimension_name(dimension)),
                                         {"", std::string(dimension_name(dimension)), std::nullopt});
                if (auto near = registry_.nearest(dimension, resolved.text)) d.message += "; did you mean \"" + *near + "\"?";
                err_ << format_diagnostic(d) << '\n';
                unknown = true;
            }
            value = resolved.text;
        }
        if (unknown) return kExitUsage;

        const auto& catalog = load();
        for (const auto& [id, pattern] : catalog.entries) {
            const bool match = std::all_of(filters.begin(), filters.end(), [&](const auto& filter) {
                const auto values = values_in(pattern, filter.first);
                return std::find(values.begin(), values.end(), filter.second) != values.end();
            });
            if (match) out_ << identifier_text(id) << '\n';
        }
        return finish_load();
    }

private:
    void load_registry() {
        if (registry_loaded_) return;
        registry_ = TaxonomyRegistry::with_defaults();
        std::string path = options_.extensions;
        if (path.empty()) {
            if (const char* env = std::getenv(kExtensionsEnv)) path = env;
        }
        if (!path.empty()) {
            const auto diagnostics = registry_.load_extensions_file(path);
            for (const auto& d : diagnostics) {
                if (d.code == codes::kIo) throw UsageFailure{d.message + ": " + path, true};
            }
            registry_diagnostics_ = diagnostics;
        }
        registry_loaded_ = true;
    }

    const Catalog& load() {
        load_registry();
        if (!catalog_) {
            try {
                catalog_ = load_catalog(options_.directory, registry_);
            } catch (const CatalogError& error) {
                throw UsageFailure{error.what(), true};
            }
            auto& diagnostics = catalog_->load_diagnostics;
            diagnostics.insert(diagnostics.begin(), registry_diagnostics_.begin(), registry_diagnostics_.end());
        }
        return *catalog_;
    }

    /// Exit code for commands whose output is data: load problems still count.
    int finish_load() {
        auto diagnostics = catalog_->load_diagnostics;
        sort_diagnostics(diagnostics);
        print(err_, diagnostics, false);
        return exit_for(diagnostics, options_.strict);
    }

    const Options& options_;
    std::ostream& out_;
    std::ostream& err_;
    TaxonomyRegistry registry_;
    bool registry_loaded_ = false;
    std::vector<Diagnostic> registry_diagnostics_;
    std::optional<Catalog> catalog_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options options;
    CLI::App app{"Validate, lint, analyze and render vulnerability pattern catalogs", "vulncat"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_flag("--strict", options.strict, "Treat warnings as failures");
    app.add_option("--extensions", options.extensions,
                   "Taxonomy extensions file (falls back to $VULNCAT_EXTENSIONS)");

    const auto add_dir = [&](CLI::App* sub) {
        sub->add_option("dir", options.directory, "Catalog directory")->required();
    };

    auto* validate = app.add_subcommand("validate", "Parse and validate every entry");
    add_dir(validate);
    auto* lint = app.add_subcommand("lint", "Validate and check cross-entry references");
    add_dir(lint);

    auto* stats = app.add_subcommand("stats", "Per-dimension histograms");
    add_dir(stats);
    stats->add_option("--by", options.by, "Single dimension, e.g. source-entity");
    stats->add_flag("--include-zero", options.include_zero, "List Base values that never occur");
    options.format = "table";
    stats->add_option("--format", options.format)->check(CLI::IsMember({"table", "json"}));

    auto* matrix = app.add_subcommand("matrix", "Platform vulnerability matrix");
    add_dir(matrix);
    matrix->add_option("--format", options.format)->check(CLI::IsMember({"table", "json", "csv"}));

    auto* report = app.add_subcommand("report", "Render the catalog book");
    add_dir(report);
    report->add_option("-o,--output", options.output, "Output path; its extension is replaced");
    report->add_option("--target", options.target)->check(CLI::IsMember({"md", "tex"}));
    report->add_flag("--dump-model", options.dump_model, "Also write <stem>.report.json");
    report->add_option("--title", options.title, "Document title");

    auto* show = app.add_subcommand("show", "Print one entry");
    add_dir(show);
    show->add_option("key", options.key, "Identifier or name")->required();
    show->add_option("--format", options.format)->check(CLI::IsMember({"text", "vuln"}));

    auto* query = app.add_subcommand("query", "List entries matching dimension=value filters");
    add_dir(query);
    query->add_option("filters", options.filters, "dimension=value, all must match");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& error) {
        const int code = app.exit(error, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }
    if (show->parsed() && options.format == "table") options.format = "text";

    Session session(options, out, err);
    try {
        if (validate->parsed()) return session.validate();
        if (lint->parsed()) return session.lint();
        if (stats->parsed()) return session.stats();
        if (matrix->parsed()) return session.matrix();
        if (report->parsed()) return session.report();
        if (show->parsed()) return session.show();
        if (query->parsed()) return session.query();
    } catch (const UsageFailure& failure) {
        if (failure.io) err << format_diagnostic(make_diagnostic(Severity::Error, codes::kIo, failure.message)) << '\n';
        else err << "usage error: " << failure.message << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

}  // namespace vulncat
