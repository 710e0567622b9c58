#include "adr/labeling.hpp"

#include <algorithm>
#include <fstream>

#include "adr/errors.hpp"

namespace adr {
namespace {

std::string lowercase(const std::string& s) {
    std::string out = s;
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

bool contains(const std::string& haystack_lower, const std::string& needle_lower) {
    return !needle_lower.empty() && haystack_lower.find(needle_lower) != std::string::npos;
}

int precedence(Label label) {
    switch (label) {
        case Label::Noise: return 3;
        case Label::Indicator: return 2;
        case Label::Adr: return 1;
        case Label::Unlabelled: return 0;
    }
    return 0;
}

}  // namespace

std::string label_name(Label label) {
    switch (label) {
        case Label::Adr: return "ADR";
        case Label::Indicator: return "INDICATOR";
        case Label::Noise: return "NOISE";
        case Label::Unlabelled: return "UNLABELLED";
    }
    return "UNLABELLED";
}

int LabelAssignment::count(Label label) const {
    int n = 0;
    for (const auto& [code, l] : labels) {
        if (l == label) ++n;
    }
    return n;
}

LabelAssignment label_noise(const CandidateSet& candidates, const CodeTree& tree,
                            const std::vector<std::string>& noise_prefixes) {
    (void)tree;
    if (noise_prefixes.empty()) throw InputError("noise prefix list is empty");
    LabelAssignment out;
    for (const CodeId& code : candidates.codes) {
        for (const std::string& prefix : noise_prefixes) {
            if (code.compare(0, prefix.size(), prefix) == 0) {
                out.labels[code] = Label::Noise;
                out.provenance[code] = prefix;
                break;
            }
        }
    }
    return out;
}

LabelAssignment label_indicators(const CandidateSet& candidates, const CodeTree& tree,
                                 const TermList& terms, const FeatureMatrix& features) {
    LabelAssignment out;
    for (const CodeId& code : candidates.codes) {
        const std::string description = lowercase(tree.description_of(code));
        for (const std::string& term : terms.terms) {
            if (!contains(description, term)) continue;
            const int row = features.index_of(code);
            if (row >= 0 && features.raw[static_cast<std::size_t>(row)].abratio30 < 1.0) {
                out.labels[code] = Label::Indicator;
                out.provenance[code] = term;
            }
            break;
        }
    }
    return out;
}

LabelAssignment label_adrs(const CandidateSet& candidates, const CodeTree& tree,
                           const TermList& terms, const std::string& drug_name,
                           const FeatureMatrix& features) {
    LabelAssignment out;
    const std::string drug_lower = lowercase(drug_name);
    for (const CodeId& code : candidates.codes) {
        const std::string description = lowercase(tree.description_of(code));
        // Descriptions naming the drug together with "adverse" are known
        // reactions by construction; no ratio validation applies.
        if (contains(description, drug_lower) && contains(description, "adverse")) {
            out.labels[code] = Label::Adr;
            out.provenance[code] = drug_lower + "+adverse";
            continue;
        }
        for (const std::string& term : terms.terms) {
            if (!contains(description, term)) continue;
            const int row = features.index_of(code);
            if (row >= 0 && features.raw[static_cast<std::size_t>(row)].abratio30 >= 1.5) {
                out.labels[code] = Label::Adr;
                out.provenance[code] = term;
            }
            break;
        }
    }
    return out;
}

LabelAssignment merge_labels(const std::vector<LabelAssignment>& parts) {
    LabelAssignment out;
    for (const LabelAssignment& part : parts) {
        for (const auto& [code, label] : part.labels) {
            if (label == Label::Unlabelled) continue;
            const auto it = out.labels.find(code);
            if (it == out.labels.end() || precedence(label) > precedence(it->second)) {
                out.labels[code] = label;
                const auto prov = part.provenance.find(code);
                if (prov != part.provenance.end()) out.provenance[code] = prov->second;
            }
        }
    }
    return out;
}

LabelAssignment holdout(const LabelAssignment& assignment, const std::vector<CodeId>& hide,
                        std::vector<std::string>* warnings) {
    LabelAssignment out = assignment;
    for (const CodeId& code : hide) {
        const auto it = out.labels.find(code);
        if (it == out.labels.end() || it->second == Label::Unlabelled) {
            if (warnings) {
                warnings->push_back("holdout: '" + code + "' carries no label; nothing hidden");
            }
            continue;
        }
        out.labels.erase(it);
        out.provenance.erase(code);
        out.held_out.push_back(code);
    }
    return out;
}

void require_min_seeds(const LabelAssignment& assignment, int minimum) {
    const int adr = assignment.count(Label::Adr);
    const int indicator = assignment.count(Label::Indicator);
    const int noise = assignment.count(Label::Noise);
    if (adr < minimum || indicator < minimum || noise < minimum) {
        throw PipelineError("need at least " + std::to_string(minimum) +
                            " seeds per label after holdout, got ADR=" + std::to_string(adr) +
                            " INDICATOR=" + std::to_string(indicator) +
                            " NOISE=" + std::to_string(noise));
    }
}

void write_label_csv(const LabelAssignment& assignment, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "code,label,provenance\n";
    for (const auto& [code, label] : assignment.labels) {
        const auto prov = assignment.provenance.find(code);
        out << code << ',' << label_name(label) << ','
            << (prov == assignment.provenance.end() ? "" : prov->second) << '\n';
    }
}

}  // namespace adr
