#include "adr/temporal.hpp"

#include <algorithm>

#include "adr/errors.hpp"

namespace adr {

std::set<AgeDay> recorded_ages(const PatientRecord& patient, RecordKind kind) {
    std::set<AgeDay> ages;
    if (kind == RecordKind::Events) {
        for (const auto& [age, codes] : patient.events) {
            if (!codes.empty()) ages.insert(age);
        }
    } else {
        for (const auto& [age, drugs] : patient.prescriptions) {
            if (!drugs.empty()) ages.insert(age);
        }
    }
    return ages;
}

std::set<AgeDay> prescription_ages(const PatientRecord& patient, const DrugId& drug) {
    std::set<AgeDay> ages;
    for (const auto& [age, drugs] : patient.prescriptions) {
        if (drugs.count(drug)) ages.insert(age);
    }
    return ages;
}

std::optional<AgeDay> first_prescription(const PatientRecord& patient, const DrugId& drug) {
    for (const auto& [age, drugs] : patient.prescriptions) {
        if (drugs.count(drug)) return age;
    }
    return std::nullopt;
}

std::vector<AgeDay> era_starts(const PatientRecord& patient, const DrugId& drug) {
    const std::set<AgeDay> ages = prescription_ages(patient, drug);
    std::vector<AgeDay> starts;
    std::optional<AgeDay> previous;
    for (AgeDay age : ages) {
        // first prescription always opens an era; later ones only after a
        // gap of at least 386 days from the nearest earlier prescription
        if (!previous || age - *previous >= 386) starts.push_back(age);
        previous = age;
    }
    return starts;
}

AgeInterval era_interval(const PatientRecord& patient, const DrugId& drug,
                         int t1, int t2, int k) {
    if (t1 > t2) throw InputError("era_interval: t1 > t2");
    const std::vector<AgeDay> starts = era_starts(patient, drug);
    if (k < 1 || static_cast<std::size_t>(k) > starts.size()) return AgeInterval::empty();
    const std::int64_t start = starts[static_cast<std::size_t>(k - 1)];
    return AgeInterval::closed(start + t1, start + t2);
}

std::set<CodeId> events_in_interval(const PatientRecord& patient, const AgeInterval& interval) {
    std::set<CodeId> codes;
    if (interval.is_empty) return codes;
    auto it = patient.events.lower_bound(interval.lo);
    const auto end = patient.events.upper_bound(interval.hi);
    for (; it != end; ++it) codes.insert(it->second.begin(), it->second.end());
    return codes;
}

bool interval_has_event(const PatientRecord& patient, const AgeInterval& interval) {
    if (interval.is_empty) return false;
    auto it = patient.events.lower_bound(interval.lo);
    const auto end = patient.events.upper_bound(interval.hi);
    for (; it != end; ++it) {
        if (!it->second.empty()) return true;
    }
    return false;
}

bool interval_has_code(const PatientRecord& patient, const AgeInterval& interval,
                       const CodeId& code) {
    if (interval.is_empty) return false;
    auto it = patient.events.lower_bound(interval.lo);
    const auto end = patient.events.upper_bound(interval.hi);
    for (; it != end; ++it) {
        if (it->second.count(code)) return true;
    }
    return false;
}

bool interval_has_prefix(const PatientRecord& patient, const AgeInterval& interval,
                         const std::string& prefix) {
    if (interval.is_empty) return false;
    auto it = patient.events.lower_bound(interval.lo);
    const auto end = patient.events.upper_bound(interval.hi);
    for (; it != end; ++it) {
        for (const CodeId& code : it->second) {
            if (code.compare(0, prefix.size(), prefix) == 0) return true;
        }
    }
    return false;
}

int occurs_first_era(const CodeId& code, const DrugId& drug,
                     const PatientRecord& patient, int t1, int t2) {
    return interval_has_code(patient, era_interval(patient, drug, t1, t2, 1), code) ? 1 : 0;
}

int occurs_per_era(const CodeId& code, const DrugId& drug,
                   const PatientRecord& patient, int t1, int t2) {
    if (t1 > t2) throw InputError("occurs_per_era: t1 > t2");
    const std::vector<AgeDay> starts = era_starts(patient, drug);
    int count = 0;
    for (AgeDay start : starts) {
        const auto iv = AgeInterval::closed(static_cast<std::int64_t>(start) + t1,
                                            static_cast<std::int64_t>(start) + t2);
        if (interval_has_code(patient, iv, code)) ++count;
    }
    return count;
}

Cohort preprocess(const Cohort& cohort) {
    if (cohort.preprocessed) {
        throw InputError("preprocess: cohort is already preprocessed");
    }
    Cohort out;
    out.preprocessed = true;
    out.patients.reserve(cohort.patients.size());
    for (const auto& patient : cohort.patients) {
        PatientRecord kept;
        kept.patient_id = patient.patient_id;
        kept.registration_age = patient.registration_age;

        const std::int64_t event_floor = static_cast<std::int64_t>(patient.registration_age) + 365;
        for (const auto& [age, codes] : patient.events) {
            if (age >= event_floor) kept.events[age] = codes;
        }

        // A record that ends in prescriptions sheds its whole tail: the trim
        // repeats until no prescription lies within 30 days of the patient's
        // maximum surviving record age, so the ceiling settles on the last
        // kept event and re-running the filters changes nothing.
        if (!kept.events.empty()) {
            const std::int64_t prescription_ceiling =
                static_cast<std::int64_t>(kept.events.rbegin()->first) - 30;
            for (const auto& [age, drugs] : patient.prescriptions) {
                if (age <= prescription_ceiling) kept.prescriptions[age] = drugs;
            }
        }
        out.patients.push_back(std::move(kept));
    }
    return out;
}

}  // namespace adr
