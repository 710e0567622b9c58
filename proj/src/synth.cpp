#include "adr/synth.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "adr/errors.hpp"
#include "adr/ingest.hpp"
#include "adr/rng.hpp"

namespace adr {
namespace {

void check_probability(double p, const std::string& what) {
    if (!(p >= 0.0 && p <= 1.0)) {
        throw InputError(what + " must lie in [0,1], got " + std::to_string(p));
    }
}

void check_code(const CodeId& code, const std::string& what) {
    if (!is_valid_code(code)) throw InputError(what + ": bad code '" + code + "'");
}

std::string patient_id(int index) {
    std::ostringstream out;
    out << 'p';
    out.width(7);
    out.fill('0');
    out << index;
    return out.str();
}

}  // namespace

void validate_spec(const SynthSpec& spec) {
    if (spec.n_patients <= 0) throw InputError("n_patients must be positive");
    if (spec.observation_days <= 0) throw InputError("observation_days must be positive");
    if (!is_valid_drug(spec.drug)) throw InputError("bad drug '" + spec.drug + "'");
    check_code(spec.indication_code, "indication_code");
    check_probability(spec.exposed_fraction, "exposed_fraction");
    for (const auto& [code, incidence] : spec.adr_codes) {
        check_code(code, "adr_codes");
        check_probability(incidence, "incidence of " + code);
        if (code == spec.indication_code) {
            throw InputError("adr_codes must be disjoint from indication_code ('" + code + "')");
        }
    }
    for (const auto& [code, rate] : spec.background_codes) {
        check_code(code, "background_codes");
        if (!(rate >= 0.0 && rate <= 1.0)) {
            throw InputError("daily rate of " + code + " must lie in [0,1]");
        }
    }
    for (const auto& [drug, probability] : spec.comparator_drugs) {
        if (!is_valid_drug(drug)) throw InputError("bad comparator drug '" + drug + "'");
        if (drug == spec.drug) throw InputError("comparator duplicates target drug");
        check_probability(probability, "probability of comparator " + drug);
    }
}

SynthSpec load_synth_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    SynthSpec spec;
    try {
        spec.n_patients = j.at("n_patients").get<int>();
        spec.drug = j.at("drug").get<std::string>();
        spec.indication_code = j.at("indication_code").get<std::string>();
        for (const auto& entry : j.at("adr_codes")) {
            spec.adr_codes.emplace_back(entry.at("code").get<std::string>(),
                                        entry.at("incidence").get<double>());
        }
        for (const auto& entry : j.at("background_codes")) {
            spec.background_codes.emplace_back(entry.at("code").get<std::string>(),
                                               entry.at("rate").get<double>());
        }
        spec.observation_days = j.at("observation_days").get<int>();
        spec.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        if (j.contains("exposed_fraction")) {
            spec.exposed_fraction = j.at("exposed_fraction").get<double>();
        }
        if (j.contains("comparator_drugs")) {
            for (const auto& entry : j.at("comparator_drugs")) {
                spec.comparator_drugs.emplace_back(entry.at("drug").get<std::string>(),
                                                   entry.at("probability").get<double>());
            }
        }
        if (j.contains("descriptions")) {
            for (const auto& [code, text] : j.at("descriptions").items()) {
                spec.descriptions[code] = text.get<std::string>();
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError(path + ": " + e.what());
    }
    validate_spec(spec);
    return spec;
}

SynthResult generate_synthetic(const SynthSpec& spec) {
    validate_spec(spec);
    SynthResult result;
    result.cohort.patients.reserve(static_cast<std::size_t>(spec.n_patients));

    const AgeDay obs = spec.observation_days;
    // Exposure sits deep enough in the record for long pre-exposure reference
    // windows, and far enough from the end that the prescription plus its
    // 30-day outcome window survive end-of-record truncation.
    const AgeDay exposure_lo = std::max<AgeDay>(8, (obs * 42) / 100);
    const AgeDay exposure_hi = std::max<AgeDay>(exposure_lo, obs - 430);
    const AgeDay comparator_lo = std::max<AgeDay>(1, (obs * 13) / 100);
    const AgeDay comparator_hi = std::max<AgeDay>(comparator_lo, obs - 430);

    Rng rng(spec.rng_seed);
    for (int i = 1; i <= spec.n_patients; ++i) {
        PatientRecord patient;
        patient.patient_id = patient_id(i);
        patient.registration_age = 0;

        if (rng.bernoulli(spec.exposed_fraction)) {
            ++result.truth.exposed_count;
            const AgeDay exposure = static_cast<AgeDay>(rng.uniform_int(exposure_lo, exposure_hi));
            const AgeDay gap = static_cast<AgeDay>(rng.uniform_int(1, 7));
            patient.events[exposure - gap].insert(spec.indication_code);
            ++result.truth.indication_injected;
            patient.prescriptions[exposure].insert(spec.drug);
            for (const auto& [code, incidence] : spec.adr_codes) {
                if (incidence > 0.0 && rng.bernoulli(incidence)) {
                    const AgeDay offset = static_cast<AgeDay>(rng.uniform_int(1, 30));
                    patient.events[exposure + offset].insert(code);
                    ++result.truth.adr_injected[code];
                }
            }
        }

        for (const auto& [drug, probability] : spec.comparator_drugs) {
            if (probability > 0.0 && rng.bernoulli(probability)) {
                const AgeDay day =
                    static_cast<AgeDay>(rng.uniform_int(comparator_lo, comparator_hi));
                patient.prescriptions[day].insert(drug);
                ++result.truth.comparator_counts[drug];
            }
        }

        for (const auto& [code, rate] : spec.background_codes) {
            if (rate <= 0.0) continue;
            // Skip-sampling: successive gaps are geometric, so the visited days
            // are exactly the successes of per-day Bernoulli(rate) draws.
            std::int64_t day = -1;
            while ((day += rng.geometric_gap(rate)) <= obs) {
                patient.events[static_cast<AgeDay>(day)].insert(code);
            }
        }

        result.cohort.patients.push_back(std::move(patient));
    }

    // Code dictionary: every referenced code plus its ancestors, so the
    // loaded tree has no orphans.
    std::set<CodeId> referenced;
    referenced.insert(spec.indication_code);
    for (const auto& [code, incidence] : spec.adr_codes) referenced.insert(code);
    for (const auto& [code, rate] : spec.background_codes) referenced.insert(code);
    std::set<CodeId> all_codes;
    for (CodeId code : referenced) {
        while (!code.empty()) {
            all_codes.insert(code);
            code = code_parent(code);
        }
    }
    for (const CodeId& code : all_codes) {
        CodeTree::Node node;
        const auto it = spec.descriptions.find(code);
        if (it != spec.descriptions.end()) {
            node.description = it->second;
        } else if (referenced.count(code)) {
            node.description = "synthetic code " + code;
        } else {
            node.description = "category " + code;
        }
        node.level = code_level(code);
        if (node.level > 1) node.parent = code_parent(code);
        result.codes.nodes[code] = std::move(node);
    }

    return result;
}

void write_manifest(const SynthSpec& spec, const GroundTruth& truth, const std::string& path) {
    nlohmann::json j;
    j["n_patients"] = spec.n_patients;
    j["drug"] = spec.drug;
    j["rng_seed"] = spec.rng_seed;
    j["observation_days"] = spec.observation_days;
    j["exposed_count"] = truth.exposed_count;
    j["indication_code"] = spec.indication_code;
    j["indication_injected"] = truth.indication_injected;
    j["adr_injected"] = nlohmann::json::object();
    for (const auto& [code, incidence] : spec.adr_codes) {
        const auto it = truth.adr_injected.find(code);
        j["adr_injected"][code] = it == truth.adr_injected.end() ? 0 : it->second;
    }
    j["comparator_counts"] = nlohmann::json::object();
    for (const auto& [drug, count] : truth.comparator_counts) {
        j["comparator_counts"][drug] = count;
    }
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << j.dump(2) << '\n';
}

void generate_to_dir(const SynthSpec& spec, const std::string& dir) {
    const SynthResult result = generate_synthetic(spec);
    write_cohort(result.cohort, dir);
    write_code_tree(result.codes, dir + "/codes.csv");
    write_manifest(spec, result.truth, dir + "/manifest.json");
}

}  // namespace adr
