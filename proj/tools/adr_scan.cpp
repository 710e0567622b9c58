#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adr/errors.hpp"
#include "adr/features.hpp"
#include "adr/ingest.hpp"
#include "adr/pipeline.hpp"
#include "adr/synth.hpp"
#include "adr/temporal.hpp"

namespace {

struct LoadedData {
    adr::Cohort cohort;
    adr::CodeTree tree;
};

LoadedData load_data_dir(const std::string& dir) {
    LoadedData data;
    data.cohort = adr::load_cohort(dir + "/patients.csv", dir + "/medical.csv",
                                   dir + "/therapy.csv");
    data.tree = adr::load_code_tree(dir + "/codes.csv");
    return data;
}

std::vector<std::string> split_codes(const std::string& joined) {
    std::vector<std::string> codes;
    std::string current;
    for (char c : joined) {
        if (c == ',') {
            if (!current.empty()) codes.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) codes.push_back(current);
    return codes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Detects rare adverse-drug-reaction signals in longitudinal coded health records"};
    app.require_subcommand(1);

    auto* generate = app.add_subcommand("generate", "Generate a synthetic cohort with injected ground truth");
    std::string spec_path;
    std::string generate_out;
    generate->add_option("--spec", spec_path, "Cohort recipe JSON")->required();
    generate->add_option("--out", generate_out, "Output directory")->required();

    auto* run = app.add_subcommand("run", "Rank candidate codes for a drug");
    std::string method_text;
    std::string data_dir;
    adr::RunConfig config;
    std::string indicators_path, adrs_path, noise_path, irrelevant_path;
    std::string holdout_joined;
    std::string report_csv, report_json;
    run->add_option("--method", method_text, "dress|oe|mutara|hunt")->required();
    run->add_option("--data", data_dir, "Directory with patients/medical/therapy/codes CSVs")->required();
    run->add_option("--drug", config.drug, "Target drug code (9 digits)")->required();
    run->add_option("--drug-name", config.drug_name, "Drug name for description matching");
    run->add_option("--indicators", indicators_path, "Indicator term list, one per line");
    run->add_option("--adrs", adrs_path, "Known-ADR term list, one per line");
    run->add_option("--noise-prefixes", noise_path, "Noise code prefixes, one per line");
    run->add_option("--irrelevant-prefixes", irrelevant_path, "Extra prefixes filtered at ranking");
    run->add_option("--t1", config.t1, "Window start offset (days)");
    run->add_option("--t2", config.t2, "Window end offset (days)");
    run->add_option("--t3", config.t3, "History filter depth (days)");
    run->add_option("--mu", config.learn.mu, "Objective smoothing");
    run->add_option("--tol", config.learn.tol, "Optimizer stopping tolerance");
    run->add_option("--max-iter", config.learn.max_iter, "Optimizer iteration cap");
    run->add_option("--k", config.k, "Signalling threshold (top-k)");
    run->add_option("--seed", config.seed, "Seed for randomized windows");
    run->add_option("--holdout", holdout_joined, "Codes whose labels are hidden, comma-separated");
    run->add_flag("--literal-transform", config.literal_transform,
                  "Map points by the metric matrix itself instead of its square root");
    run->add_option("--out", report_csv, "Report CSV path")->required();
    run->add_option("--json", report_json, "Optional report JSON path");

    auto* features_cmd = app.add_subcommand("features", "Dump the candidate feature matrix");
    std::string features_data, features_drug, features_out;
    features_cmd->add_option("--data", features_data, "Data directory")->required();
    features_cmd->add_option("--drug", features_drug, "Target drug code")->required();
    features_cmd->add_option("--out", features_out, "Feature CSV path")->required();

    try {
        app.parse(argc, argv);

        if (generate->parsed()) {
            const adr::SynthSpec spec = adr::load_synth_spec(spec_path);
            std::filesystem::create_directories(generate_out);
            adr::generate_to_dir(spec, generate_out);
            return 0;
        }

        if (run->parsed()) {
            const adr::Method method = adr::parse_method(method_text);
            LoadedData data = load_data_dir(data_dir);
            const adr::Cohort cohort = adr::preprocess(data.cohort);
            if (!indicators_path.empty()) {
                config.indicator_terms =
                    adr::load_term_list(indicators_path, adr::TermList::Kind::Indicator);
            }
            if (!adrs_path.empty()) {
                config.adr_terms = adr::load_term_list(adrs_path, adr::TermList::Kind::Adr);
            }
            if (!noise_path.empty()) config.noise_prefixes = adr::load_prefix_list(noise_path);
            if (!irrelevant_path.empty()) {
                config.irrelevant_prefixes = adr::load_prefix_list(irrelevant_path);
            }
            config.holdout_codes = split_codes(holdout_joined);

            adr::SignalReport report;
            if (method == adr::Method::Dress) {
                std::vector<std::string> warnings;
                report = adr::run_dress(cohort, data.tree, config, nullptr, &warnings);
                for (const std::string& warning : warnings) {
                    std::cerr << "warning: " << warning << '\n';
                }
            } else {
                report = adr::run_baseline(cohort, data.tree, method, config);
            }
            adr::write_report_csv(report, report_csv);
            if (!report_json.empty()) adr::write_report_json(report, report_json);
            return 0;
        }

        if (features_cmd->parsed()) {
            LoadedData data = load_data_dir(features_data);
            const adr::Cohort cohort = adr::preprocess(data.cohort);
            const adr::FeatureMatrix matrix =
                adr::feature_matrix(cohort, adr::candidate_set(cohort, features_drug));
            adr::write_feature_csv(matrix, features_out);
            return 0;
        }
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const adr::InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const adr::PipelineError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
