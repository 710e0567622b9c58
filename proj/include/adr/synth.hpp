#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "adr/code_tree.hpp"
#include "adr/patient.hpp"

namespace adr {

// Recipe for a seeded synthetic cohort with injected ground truth.
// Exposed patients receive the indication code 1-7 days before their first
// (and only) prescription of the target drug, then each ADR code with its
// incidence probability at a uniform day in [exposure+1, exposure+30].
// Background codes fire as independent daily Bernoulli draws over
// [0, observation_days]; the indication or an ADR code may also appear in
// background_codes to give it a baseline occurrence rate.
struct SynthSpec {
    int n_patients = 0;
    DrugId drug;
    CodeId indication_code;
    std::vector<std::pair<CodeId, double>> adr_codes;         // (code, incidence in [0,1])
    std::vector<std::pair<CodeId, double>> background_codes;  // (code, daily rate)
    int observation_days = 0;
    std::uint64_t rng_seed = 0;

    double exposed_fraction = 0.5;
    std::vector<std::pair<DrugId, double>> comparator_drugs;  // (drug, per-patient probability)
    std::map<CodeId, std::string> descriptions;               // optional display text per code
};

// Exact injected counts, written to manifest.json.
struct GroundTruth {
    int exposed_count = 0;
    int indication_injected = 0;
    std::map<CodeId, int> adr_injected;        // patients that received the injection
    std::map<DrugId, int> comparator_counts;   // patients prescribed each comparator
};

struct SynthResult {
    Cohort cohort;
    CodeTree codes;
    GroundTruth truth;
};

// Throws InputError on out-of-range probabilities/rates, malformed codes,
// or adr_codes overlapping indication_code.
void validate_spec(const SynthSpec& spec);

SynthSpec load_synth_spec(const std::string& path);

// Deterministic given spec.rng_seed: one generator stream, patients in id order.
SynthResult generate_synthetic(const SynthSpec& spec);

void write_manifest(const SynthSpec& spec, const GroundTruth& truth, const std::string& path);

// Convenience for the CLI: generate and write patients/medical/therapy/codes
// CSVs plus manifest.json into dir.
void generate_to_dir(const SynthSpec& spec, const std::string& dir);

}  // namespace adr
