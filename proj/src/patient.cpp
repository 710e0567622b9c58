#include "adr/patient.hpp"

#include <set>

namespace adr {

std::vector<DrugId> Cohort::drug_universe() const {
    std::set<DrugId> drugs;
    for (const auto& patient : patients) {
        for (const auto& [age, day_drugs] : patient.prescriptions) {
            drugs.insert(day_drugs.begin(), day_drugs.end());
        }
    }
    return {drugs.begin(), drugs.end()};
}

const PatientRecord* Cohort::find_patient(const std::string& id) const {
    for (const auto& patient : patients) {
        if (patient.patient_id == id) return &patient;
    }
    return nullptr;
}

}  // namespace adr
