#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "attrlens/cli/commands.hpp"

namespace {

std::map<std::string, std::string> parse_assignments(const std::vector<std::string>& pairs,
                                                     const std::string& file,
                                                     const attrlens::ProjectConfig& cfg) {
    std::map<std::string, std::string> out;
    if (!file.empty()) {
        attrlens::json j;
        try {
            j = attrlens::json::parse(attrlens::read_file(cfg.resolve(file)));
        } catch (const attrlens::json::exception& e) {
            throw attrlens::ConfigError(std::string("malformed assignments file: ") + e.what());
        }
        for (const auto& [category, tmpl] : j.items()) out[category] = tmpl.get<std::string>();
    }
    for (const auto& pair : pairs) {
        auto eq = pair.find('=');
        if (eq == std::string::npos)
            throw attrlens::InvalidAssignment("expected category=template, got: " + pair);
        out[pair.substr(0, eq)] = pair.substr(eq + 1);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    using namespace attrlens;

    CLI::App app{"Dataset bias analysis with model-generated visual attributes"};
    app.require_subcommand(1);

    std::string config_path;
    std::string mock_fixtures;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Project config file (JSON)")->required();
        sub->add_option("--mock-fixtures", mock_fixtures,
                        "Route every backend to this scripted fixture file (JSONL)");
    };

    int n_override = 0, m_override = 0;
    auto* generate = app.add_subcommand("generate", "Query the chat backend for an attribute schema");
    add_common(generate);
    auto* n_opt = generate->add_option("--n", n_override, "Number of attribute categories");
    auto* m_opt = generate->add_option("--m", m_override, "Number of attributes per category");

    std::vector<std::string> assign_pairs;
    std::string assignments_file;
    auto* review = app.add_subcommand("review", "Assign caption templates to generated categories");
    add_common(review);
    review->add_option("--assign", assign_pairs, "Assignment category=template (repeatable)");
    review->add_option("--assignments-file", assignments_file,
                       "JSON file mapping category names to templates");

    double alpha_override = 0.0;
    auto* annotate = app.add_subcommand("annotate", "Annotate the corpus against the schema");
    add_common(annotate);
    auto* alpha_opt =
        annotate->add_option("--alpha", alpha_override, "Detection score threshold in (0,1)");

    std::vector<std::string> report_names;
    double beta_override = 0.0;
    auto* report = app.add_subcommand("report", "Write bias statistics as CSV and Markdown");
    add_common(report);
    report->add_option("--reports", report_names,
                       "Statistics to produce: histograms, crosstab, diff, auc, confusion, sweep")
        ->delimiter(',');
    auto* beta_opt = report->add_option("--beta", beta_override, "Recall match threshold in (0,1)");

    CLI11_PARSE(app, argc, argv);

    try {
        ProjectConfig cfg = load_project_config(config_path);
        if (*n_opt) cfg.domain.n_categories = n_override;
        if (*m_opt) cfg.domain.m_attributes = m_override;
        if (*alpha_opt) cfg.annotator.alpha = alpha_override;
        if (*beta_opt) cfg.recall.beta = beta_override;
        validate_domain(cfg.domain);
        validate_annotator_config(cfg.annotator);
        validate_recall_config(cfg.recall);

        ProjectLock lock(config_path + ".lock");

        if (generate->parsed()) {
            BackendInstances backends = make_backends(cfg, mock_fixtures);
            return cmd_generate(cfg, backends, std::cout, std::cerr);
        }
        if (review->parsed()) {
            auto assignments = parse_assignments(assign_pairs, assignments_file, cfg);
            return cmd_review(cfg, assignments, std::cout, std::cerr);
        }
        if (annotate->parsed()) {
            BackendInstances backends = make_backends(cfg, mock_fixtures);
            return cmd_annotate(cfg, backends, std::cout, std::cerr);
        }
        if (report->parsed()) {
            BackendInstances backends = make_backends(cfg, mock_fixtures);
            return cmd_report(cfg, backends, report_names, std::cout, std::cerr);
        }
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
