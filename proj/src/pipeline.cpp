#include "adr/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "adr/errors.hpp"
#include "adr/format.hpp"
#include "adr/temporal.hpp"

namespace adr {
namespace {

bool matches_prefix(const CodeId& code, const std::vector<std::string>& prefixes) {
    for (const std::string& prefix : prefixes) {
        if (!prefix.empty() && code.compare(0, prefix.size(), prefix) == 0) return true;
    }
    return false;
}

void sort_and_rank(std::vector<ScoredCandidate>& survivors,
                   std::vector<ScoredCandidate>& filtered) {
    std::sort(survivors.begin(), survivors.end(),
              [](const ScoredCandidate& a, const ScoredCandidate& b) {
                  if (a.raw_score != b.raw_score) return a.raw_score > b.raw_score;
                  return a.code < b.code;
              });
    for (std::size_t i = 0; i < survivors.size(); ++i) {
        survivors[i].rank = static_cast<int>(i + 1);
    }
    std::sort(filtered.begin(), filtered.end(),
              [](const ScoredCandidate& a, const ScoredCandidate& b) { return a.code < b.code; });
    survivors.insert(survivors.end(), filtered.begin(), filtered.end());
}

std::vector<std::string> combined_irrelevant(const RunConfig& config) {
    std::vector<std::string> prefixes = config.noise_prefixes;
    prefixes.insert(prefixes.end(), config.irrelevant_prefixes.begin(),
                    config.irrelevant_prefixes.end());
    return prefixes;
}

template <typename Step>
auto attributed(const char* step_name, Step&& step) {
    try {
        return step();
    } catch (const PipelineError& e) {
        throw PipelineError(std::string(step_name) + ": " + e.what());
    }
}

}  // namespace

std::string method_name(Method method) {
    switch (method) {
        case Method::Dress: return "DRESS";
        case Method::Oe: return "OE";
        case Method::Mutara: return "MUTARA";
        case Method::Hunt: return "HUNT";
    }
    return "DRESS";
}

Method parse_method(const std::string& text) {
    if (text == "dress") return Method::Dress;
    if (text == "oe") return Method::Oe;
    if (text == "mutara") return Method::Mutara;
    if (text == "hunt") return Method::Hunt;
    throw InputError("unknown method '" + text + "' (expected dress|oe|mutara|hunt)");
}

MutaraConfig mutara_config(const RunConfig& config) {
    MutaraConfig m;
    m.t1 = config.t1;
    m.t2 = config.t2;
    m.t3 = config.t3;
    m.rng_seed = config.seed;
    return m;
}

std::vector<ScoredCandidate> score_and_rank(const FeatureMatrix& features,
                                            const std::vector<int>& cluster_of_row,
                                            const std::vector<std::string>& irrelevant_prefixes,
                                            const CodeTree& tree) {
    if (cluster_of_row.size() != features.codes.size()) {
        throw PipelineError("score_and_rank: cluster result does not cover all candidates");
    }
    std::vector<ScoredCandidate> survivors;
    std::vector<ScoredCandidate> filtered;
    for (std::size_t i = 0; i < features.codes.size(); ++i) {
        const FeatureVector& v = features.raw[i];
        ScoredCandidate entry;
        entry.code = v.code;
        entry.description = tree.description_of(v.code);
        const int cluster = cluster_of_row[i];
        entry.cluster = cluster == 0 ? Label::Adr : cluster == 1 ? Label::Indicator : Label::Noise;
        const double unfiltered = (1.0 - v.expect) * v.abratio30;
        const double beta = entry.cluster == Label::Noise ? 3.0 : 1.0;
        entry.raw_score = unfiltered / beta;
        if (entry.cluster == Label::Indicator) {
            entry.filtered_by = "indicator-cluster";
        } else if (unfiltered < 1.0) {
            entry.filtered_by = "score<1";
        } else if (matches_prefix(entry.code, irrelevant_prefixes)) {
            entry.filtered_by = "irrelevant-code";
        }
        (entry.filtered_by.empty() ? survivors : filtered).push_back(std::move(entry));
    }
    sort_and_rank(survivors, filtered);
    return survivors;
}

SignalReport run_dress(const Cohort& cohort, const CodeTree& tree, const RunConfig& config,
                       const FeatureMatrix* precomputed, std::vector<std::string>* warnings) {
    SignalReport report;
    report.drug = config.drug;
    report.method = Method::Dress;
    report.k = config.k;
    report.seed = config.seed;
    report.config = config;

    // Step 1: candidate attributes.
    const FeatureMatrix matrix = attributed("step 1 (attributes)", [&] {
        if (precomputed && precomputed->drug == config.drug) return *precomputed;
        return feature_matrix(cohort, candidate_set(cohort, config.drug));
    });
    report.candidate_count = static_cast<int>(matrix.codes.size());

    // Step 2: seed labels, then the evaluation holdout.
    CandidateSet candidates;
    candidates.drug = config.drug;
    candidates.codes.insert(matrix.codes.begin(), matrix.codes.end());
    const LabelAssignment labels = attributed("step 2 (labelling)", [&] {
        const LabelAssignment merged = merge_labels({
            label_noise(candidates, tree, config.noise_prefixes),
            label_indicators(candidates, tree, config.indicator_terms, matrix),
            label_adrs(candidates, tree, config.adr_terms, config.drug_name, matrix),
        });
        LabelAssignment after = holdout(merged, config.holdout_codes, warnings);
        require_min_seeds(after);
        return after;
    });
    report.adr_seeds = labels.count(Label::Adr);
    report.indicator_seeds = labels.count(Label::Indicator);
    report.noise_seeds = labels.count(Label::Noise);
    report.held_out = labels.held_out;

    std::vector<Eigen::VectorXd> points;
    points.reserve(matrix.codes.size());
    for (const auto& row : matrix.standardized) {
        points.emplace_back(Eigen::Map<const Eigen::VectorXd>(row.data(), kFeatureDim));
    }
    std::vector<Label> row_labels(matrix.codes.size(), Label::Unlabelled);
    for (std::size_t i = 0; i < matrix.codes.size(); ++i) {
        const auto it = labels.labels.find(matrix.codes[i]);
        if (it != labels.labels.end()) row_labels[i] = it->second;
    }

    // Step 3: metric learning and the point transform.
    const std::vector<Eigen::VectorXd> transformed = attributed("step 3 (metric learning)", [&] {
        LearnResult learned = learn_metric(points, row_labels, config.learn);
        report.learn_iterations = learned.iterations;
        return transform_points(points, learned.metric, config.literal_transform);
    });

    // Step 4: seeded clustering with pinned labels.
    std::vector<std::vector<int>> seeds(3);
    for (std::size_t i = 0; i < row_labels.size(); ++i) {
        if (row_labels[i] == Label::Adr) seeds[0].push_back(static_cast<int>(i));
        if (row_labels[i] == Label::Indicator) seeds[1].push_back(static_cast<int>(i));
        if (row_labels[i] == Label::Noise) seeds[2].push_back(static_cast<int>(i));
    }
    const ClusterResult clusters = attributed("step 4 (clustering)", [&] {
        return constrained_kmeans(transformed, seeds, config.kmeans_max_iter);
    });
    report.kmeans_iterations = clusters.iterations;

    // Step 5: filter, score, rank.
    report.entries = attributed("step 5 (scoring)", [&] {
        return score_and_rank(matrix, clusters.assignment, combined_irrelevant(config), tree);
    });
    return report;
}

SignalReport run_baseline(const Cohort& cohort, const CodeTree& tree, Method method,
                          const RunConfig& config, const FeatureMatrix* precomputed) {
    if (method == Method::Dress) return run_dress(cohort, tree, config, precomputed);

    SignalReport report;
    report.drug = config.drug;
    report.method = method;
    report.k = config.k;
    report.seed = config.seed;
    report.config = config;

    const std::vector<std::string> irrelevant = combined_irrelevant(config);

    std::vector<ScoredCandidate> survivors;
    std::vector<ScoredCandidate> filtered;
    const auto classify = [&](ScoredCandidate entry, const std::string& method_filter) {
        if (!method_filter.empty()) {
            entry.filtered_by = method_filter;
        } else if (matches_prefix(entry.code, irrelevant)) {
            entry.filtered_by = "irrelevant-code";
        }
        (entry.filtered_by.empty() ? survivors : filtered).push_back(std::move(entry));
    };

    if (method == Method::Oe) {
        const FeatureMatrix matrix = precomputed && precomputed->drug == config.drug
                                         ? *precomputed
                                         : feature_matrix(cohort, candidate_set(cohort, config.drug));
        report.candidate_count = static_cast<int>(matrix.codes.size());
        for (const FeatureVector& v : matrix.raw) {
            ScoredCandidate entry;
            entry.code = v.code;
            entry.description = tree.description_of(v.code);
            entry.raw_score = v.ic_delta;
            classify(std::move(entry), v.zeta1 == 1 || v.zeta2 == 1 ? "zeta-filter" : "");
        }
    } else {
        const CandidateSet candidates = [&] {
            if (precomputed && precomputed->drug == config.drug) {
                CandidateSet c;
                c.drug = config.drug;
                c.codes.insert(precomputed->codes.begin(), precomputed->codes.end());
                return c;
            }
            return candidate_set(cohort, config.drug);
        }();
        report.candidate_count = static_cast<int>(candidates.codes.size());
        const std::vector<CodeId> universe(candidates.codes.begin(), candidates.codes.end());
        const std::vector<HuntEntry> scan = hunt_rank(cohort, universe, config.drug,
                                                      mutara_config(config));
        for (const HuntEntry& h : scan) {
            ScoredCandidate entry;
            entry.code = h.code;
            entry.description = tree.description_of(h.code);
            entry.raw_score = method == Method::Mutara ? h.ulev : h.ratio;
            classify(std::move(entry), "");
        }
    }

    sort_and_rank(survivors, filtered);
    report.entries = std::move(survivors);
    return report;
}

std::vector<CodeId> signal_topk(const SignalReport& report, int k) {
    if (k < 1) throw InputError("signal_topk: k must be at least 1");
    std::vector<CodeId> top;
    for (const ScoredCandidate& entry : report.entries) {
        if (entry.rank == 0) continue;
        top.push_back(entry.code);
        if (static_cast<int>(top.size()) == k) break;
    }
    return top;
}

namespace {

std::string csv_escape(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

}  // namespace

void write_report_csv(const SignalReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "rank,code,description,score,cluster,filtered_by,method\n";
    const std::string method = method_name(report.method);
    for (const ScoredCandidate& entry : report.entries) {
        if (entry.rank > 0) out << entry.rank;
        out << ',' << entry.code << ',' << csv_escape(entry.description) << ','
            << format_double(entry.raw_score) << ','
            << (report.method == Method::Dress ? label_name(entry.cluster) : "") << ','
            << entry.filtered_by << ',' << method << '\n';
    }
}

void write_report_json(const SignalReport& report, const std::string& path) {
    nlohmann::json j;
    j["drug"] = report.drug;
    j["method"] = method_name(report.method);
    j["k"] = report.k;
    j["seed"] = report.seed;

    nlohmann::json config;
    config["drug"] = report.config.drug;
    config["drug_name"] = report.config.drug_name;
    config["indicator_terms"] = report.config.indicator_terms.terms;
    config["adr_terms"] = report.config.adr_terms.terms;
    config["noise_prefixes"] = report.config.noise_prefixes;
    config["irrelevant_prefixes"] = report.config.irrelevant_prefixes;
    config["t1"] = report.config.t1;
    config["t2"] = report.config.t2;
    config["t3"] = report.config.t3;
    config["mu"] = report.config.learn.mu;
    config["tol"] = report.config.learn.tol;
    config["max_iter"] = report.config.learn.max_iter;
    config["kmeans_max_iter"] = report.config.kmeans_max_iter;
    config["k"] = report.config.k;
    config["seed"] = report.config.seed;
    config["holdout"] = report.config.holdout_codes;
    config["literal_transform"] = report.config.literal_transform;
    j["config"] = config;

    nlohmann::json counts;
    counts["candidates"] = report.candidate_count;
    counts["adr_seeds"] = report.adr_seeds;
    counts["indicator_seeds"] = report.indicator_seeds;
    counts["noise_seeds"] = report.noise_seeds;
    counts["learn_iterations"] = report.learn_iterations;
    counts["kmeans_iterations"] = report.kmeans_iterations;
    counts["held_out"] = report.held_out;
    j["counts"] = counts;

    j["entries"] = nlohmann::json::array();
    for (const ScoredCandidate& entry : report.entries) {
        nlohmann::json e;
        if (entry.rank > 0) {
            e["rank"] = entry.rank;
        } else {
            e["rank"] = nullptr;
        }
        e["code"] = entry.code;
        e["description"] = entry.description;
        e["score"] = entry.raw_score;
        if (report.method == Method::Dress) e["cluster"] = label_name(entry.cluster);
        if (!entry.filtered_by.empty()) e["filtered_by"] = entry.filtered_by;
        j["entries"].push_back(std::move(e));
    }

    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << j.dump(2) << '\n';
}

}  // namespace adr
