#ifndef ADR_TEMPORAL_HPP
#define ADR_TEMPORAL_HPP

#include <optional>
#include <set>
#include <vector>

#include "adr/patient.hpp"
#include "adr/types.hpp"

namespace adr {

enum class RecordKind { Events, Prescriptions };

/// Ages at which the patient has at least one record of the given kind.
std::set<AgeDay> recorded_ages(const PatientRecord& patient, RecordKind kind);

/// Ages at which the patient was prescribed the given drug.
std::set<AgeDay> prescription_ages(const PatientRecord& patient, const DrugId& drug);

/// Earliest prescription age, or nullopt if the drug was never prescribed.
std::optional<AgeDay> first_prescription(const PatientRecord& patient, const DrugId& drug);

/// Exposure era starts, ascending: the first prescription plus every later
/// prescription separated from its nearest earlier prescription of the same
/// drug by at least 386 days.
std::vector<AgeDay> era_starts(const PatientRecord& patient, const DrugId& drug);

/// [era_k + t1, era_k + t2] for the k-th exposure era (k is 1-based), with
/// the lower bound clamped at age 0. Empty when fewer than k eras exist.
/// Rejects t1 > t2.
AgeInterval era_interval(const PatientRecord& patient, const DrugId& drug,
                         int t1, int t2, int k);

/// Union of the patient's event codes over the interval.
std::set<CodeId> events_in_interval(const PatientRecord& patient, const AgeInterval& interval);

/// True if the patient has at least one event of any code in the interval.
bool interval_has_event(const PatientRecord& patient, const AgeInterval& interval);

/// True if any event code in the interval equals `code` (no set is built).
bool interval_has_code(const PatientRecord& patient, const AgeInterval& interval,
                       const CodeId& code);

/// True if any event code in the interval starts with the given prefix.
bool interval_has_prefix(const PatientRecord& patient, const AgeInterval& interval,
                         const std::string& prefix);

/// 1 if the code is recorded inside the window around the first exposure
/// era, else 0.
int occurs_first_era(const CodeId& code, const DrugId& drug,
                     const PatientRecord& patient, int t1, int t2);

/// Number of exposure eras whose window contains the code.
int occurs_per_era(const CodeId& code, const DrugId& drug,
                   const PatientRecord& patient, int t1, int t2);

/// Drops each patient's events recorded within the first year after
/// registration and prescriptions within the last 30 days of that patient's
/// maximum recorded age (events or prescriptions). Rejects a cohort that
/// was already preprocessed.
Cohort preprocess(const Cohort& cohort);

}  // namespace adr

#endif
