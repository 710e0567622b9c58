#pragma once

#include <map>
#include <string>
#include <vector>

#include "adr/code_tree.hpp"
#include "adr/features.hpp"
#include "adr/ingest.hpp"

namespace adr {

enum class Label { Unlabelled, Adr, Indicator, Noise };

std::string label_name(Label label);

// Seed labels over candidate codes. Non-UNLABELLED codes carry the term or
// prefix that justified the label.
struct LabelAssignment {
    std::map<CodeId, Label> labels;
    std::map<CodeId, std::string> provenance;
    std::vector<CodeId> held_out;

    int count(Label label) const;
};

// Candidates whose code text starts with a listed prefix. Throws InputError
// when the prefix list is empty.
LabelAssignment label_noise(const CandidateSet& candidates, const CodeTree& tree,
                            const std::vector<std::string>& noise_prefixes);

// Candidates whose description contains an indicator term (case-insensitive)
// and whose abratio30 validates as < 1.
LabelAssignment label_indicators(const CandidateSet& candidates, const CodeTree& tree,
                                 const TermList& terms, const FeatureMatrix& features);

// Candidates whose description contains an ADR term with abratio30 >= 1.5,
// or whose description contains both the drug name and "adverse" (that rule
// skips the ratio validation).
LabelAssignment label_adrs(const CandidateSet& candidates, const CodeTree& tree,
                           const TermList& terms, const std::string& drug_name,
                           const FeatureMatrix& features);

// Union of the parts with conflict precedence NOISE > INDICATOR > ADR.
LabelAssignment merge_labels(const std::vector<LabelAssignment>& parts);

// Sets the listed codes to UNLABELLED and records them. Hiding an already
// unlabelled code is a no-op that only emits a warning line.
LabelAssignment holdout(const LabelAssignment& assignment, const std::vector<CodeId>& hide,
                        std::vector<std::string>* warnings = nullptr);

// Each of the three seed labels needs at least `minimum` members for the
// clustering seeds to be non-degenerate; throws PipelineError otherwise.
void require_min_seeds(const LabelAssignment& assignment, int minimum = 2);

void write_label_csv(const LabelAssignment& assignment, const std::string& path);

}  // namespace adr
