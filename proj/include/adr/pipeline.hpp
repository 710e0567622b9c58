#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "adr/baselines.hpp"
#include "adr/code_tree.hpp"
#include "adr/features.hpp"
#include "adr/ingest.hpp"
#include "adr/labeling.hpp"
#include "adr/learning.hpp"

namespace adr {

enum class Method { Dress, Oe, Mutara, Hunt };

std::string method_name(Method method);          // "DRESS", "OE", "MUTARA", "HUNT"
Method parse_method(const std::string& text);    // lowercase CLI spelling

struct RunConfig {
    DrugId drug;
    std::string drug_name;
    TermList indicator_terms{TermList::Kind::Indicator, {}};
    TermList adr_terms{TermList::Kind::Adr, {}};
    std::vector<std::string> noise_prefixes;
    std::vector<std::string> irrelevant_prefixes;
    int t1 = 1;
    int t2 = 30;
    int t3 = 180;
    LearnConfig learn;
    int kmeans_max_iter = 100;
    int k = 100;  // signalling threshold
    std::uint64_t seed = 0;
    std::vector<CodeId> holdout_codes;
    bool literal_transform = false;  // map points by S instead of S^(1/2)
};

MutaraConfig mutara_config(const RunConfig& config);

struct ScoredCandidate {
    CodeId code;
    std::string description;
    double raw_score = 0.0;
    Label cluster = Label::Unlabelled;  // meaningful for DRESS only
    std::string filtered_by;  // "", indicator-cluster, score<1, irrelevant-code, zeta-filter
    int rank = 0;             // 0 = filtered, else 1..m with no gaps
};

struct SignalReport {
    DrugId drug;
    Method method = Method::Dress;
    std::vector<ScoredCandidate> entries;  // ranked entries first, then filtered
    int k = 100;
    std::uint64_t seed = 0;

    int candidate_count = 0;
    int adr_seeds = 0;
    int indicator_seeds = 0;
    int noise_seeds = 0;
    int learn_iterations = 0;
    int kmeans_iterations = 0;
    std::vector<CodeId> held_out;

    RunConfig config;  // snapshot recorded for report regeneration
};

// Step-5 filter and ranking: drops indicator-cluster codes, codes with
// (1-expect)*abratio30 < 1, and irrelevant-prefix codes; scores survivors
// with beta 1 (ADR cluster) or 3 (noise cluster); sorts descending with ties
// on ascending code text.
std::vector<ScoredCandidate> score_and_rank(const FeatureMatrix& features,
                                            const std::vector<int>& cluster_of_row,
                                            const std::vector<std::string>& irrelevant_prefixes,
                                            const CodeTree& tree);

// The five steps in order: attributes, labels(+holdout), metric learning,
// constrained clustering, filter/score/rank. `precomputed` may carry a
// feature matrix already built for this cohort and drug.
SignalReport run_dress(const Cohort& cohort, const CodeTree& tree, const RunConfig& config,
                       const FeatureMatrix* precomputed = nullptr,
                       std::vector<std::string>* warnings = nullptr);

SignalReport run_baseline(const Cohort& cohort, const CodeTree& tree, Method method,
                          const RunConfig& config, const FeatureMatrix* precomputed = nullptr);

// The first min(k, m) ranked codes.
std::vector<CodeId> signal_topk(const SignalReport& report, int k);

void write_report_csv(const SignalReport& report, const std::string& path);
void write_report_json(const SignalReport& report, const std::string& path);

}  // namespace adr
