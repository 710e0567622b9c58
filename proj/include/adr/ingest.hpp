#ifndef ADR_INGEST_HPP
#define ADR_INGEST_HPP

#include <string>
#include <vector>

#include "adr/code_tree.hpp"
#include "adr/patient.hpp"

namespace adr {

/// Lowercased, deduplicated label-matching strings loaded from a term file.
struct TermList {
    enum class Kind { Indicator, Adr };
    Kind kind = Kind::Indicator;
    std::vector<std::string> terms;
};

/// Loads a cohort from the three CSV tables:
///   patients.csv  patid,registration_age
///   medical.csv   patid,age,code
///   therapy.csv   patid,age,drugcode
/// Malformed rows and rows naming unknown patients are errors that include
/// the file and line number.
Cohort load_cohort(const std::string& patients_path, const std::string& medical_path,
                   const std::string& therapy_path);

/// Writes the three cohort CSVs into `dir` with canonical row order, so that
/// identical cohorts serialize to identical bytes.
void write_cohort(const Cohort& cohort, const std::string& dir);

/// codes.csv rows are `code,description`; duplicates and orphan non-level-1
/// codes are errors.
CodeTree load_code_tree(const std::string& codes_path);

void write_code_tree(const CodeTree& tree, const std::string& codes_path);

/// One term per line, trimmed, lowercased, blank lines skipped, duplicates
/// removed (first occurrence kept).
TermList load_term_list(const std::string& path, TermList::Kind kind);

/// One code prefix per line, used by the noise and irrelevant-code filters.
std::vector<std::string> load_prefix_list(const std::string& path);

}  // namespace adr

#endif
