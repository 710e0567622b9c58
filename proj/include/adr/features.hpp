#pragma once

#include <array>
#include <set>
#include <string>
#include <vector>

#include "adr/patient.hpp"

namespace adr {

constexpr int kFeatureDim = 9;

// The nine numeric attributes computed for a candidate code, in the fixed
// order used by the learner and the CSV dump.
struct FeatureVector {
    CodeId code;
    DrugId drug;
    double abratio30 = 0.0;
    double abratio365 = 0.0;
    double dop = 0.0;
    double expect = 0.0;
    double lev3 = 0.0;
    double lev2 = 0.0;
    double ic_delta = 0.0;
    int zeta1 = 0;
    int zeta2 = 0;

    std::array<double, kFeatureDim> as_array() const {
        return {abratio30, abratio365, dop,      expect,
                lev3,      lev2,       ic_delta, static_cast<double>(zeta1),
                static_cast<double>(zeta2)};
    }
};

// The set G: codes recorded within a month after some patient's first
// prescription of the drug.
struct CandidateSet {
    std::set<CodeId> codes;
    DrugId drug;
};

// Throws InputError when the drug is never prescribed in the cohort.
CandidateSet candidate_set(const Cohort& cohort, const DrugId& drug);

// Patients with the code in days [1, window] after first exposure over
// patients with it in days [-window, -1]; denominator clamped to 1.
double abratio(const Cohort& cohort, const CodeId& code, const DrugId& drug, int window);

// Day-of-prescription count over the prior-year count, denominator clamped.
double dop(const Cohort& cohort, const CodeId& code, const DrugId& drug);

// Fraction of post-window patients who also had the code in the month before
// exposure. Throws PipelineError when no patient has it post-window.
double expectedness(const Cohort& cohort, const CodeId& code, const DrugId& drug);

// abratio over the code's prefix class: any code sharing the first `level`
// characters counts as an occurrence.
double abratio_level(const Cohort& cohort, const CodeId& code, const DrugId& drug, int level);

FeatureVector feature_vector(const Cohort& cohort, const CodeId& code, const DrugId& drug);

// Feature rows for every candidate, plus a z-scored copy for the learner.
// Attributes with zero variance standardize to 0.
struct FeatureMatrix {
    DrugId drug;
    std::vector<CodeId> codes;  // ascending, aligned with rows
    std::vector<FeatureVector> raw;
    std::vector<std::array<double, kFeatureDim>> standardized;
    std::array<double, kFeatureDim> mean{};
    std::array<double, kFeatureDim> stddev{};

    int index_of(const CodeId& code) const;  // -1 when absent
};

// Batched equivalent of feature_vector over all candidates: one cohort pass
// per window shape instead of one per code.
FeatureMatrix feature_matrix(const Cohort& cohort, const CandidateSet& candidates);

void write_feature_csv(const FeatureMatrix& matrix, const std::string& path);

}  // namespace adr
