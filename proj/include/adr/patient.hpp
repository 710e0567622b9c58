#ifndef ADR_PATIENT_HPP
#define ADR_PATIENT_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "adr/types.hpp"

namespace adr {

/// One patient's longitudinal record: dated event codes and dated
/// prescriptions, both keyed by age in days. Days with no entry are simply
/// absent from the maps.
struct PatientRecord {
    std::string patient_id;
    AgeDay registration_age = 0;
    std::map<AgeDay, std::set<CodeId>> events;
    std::map<AgeDay, std::set<DrugId>> prescriptions;
};

struct Cohort {
    std::vector<PatientRecord> patients;
    bool preprocessed = false;

    /// Sorted union of every drug appearing in any prescription row.
    std::vector<DrugId> drug_universe() const;

    const PatientRecord* find_patient(const std::string& id) const;
};

}  // namespace adr

#endif
