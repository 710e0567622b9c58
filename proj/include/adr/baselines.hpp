#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "adr/patient.hpp"
#include "adr/temporal.hpp"

namespace adr {

// Era-level occurrence counts behind the observed/expected statistics.
// n_de: eras of `drug` whose (t1,t2) window contains `code`.
// n_dot_e: the same summed over every drug in the cohort.
// n_d_dot: eras of `drug` whose window contains at least one event of any code.
// n_dot_dot: the same summed over every drug.
struct ContingencyCounts {
    long long n_de = 0;
    long long n_dot_e = 0;
    long long n_d_dot = 0;
    long long n_dot_dot = 0;
    int t1 = 0;
    int t2 = 0;
};

ContingencyCounts contingency(const Cohort& cohort, const CodeId& code, const DrugId& drug,
                              int t1, int t2);

// E = n_d_dot * n_dot_e / n_dot_dot, 0 when n_dot_dot = 0.
double expected(const ContingencyCounts& counts);

// Smoothed disproportionality: log2((n_de + 1/2) / (E + 1/2)).
double ic_value(const ContingencyCounts& counts);
double ic(const Cohort& cohort, const CodeId& code, const DrugId& drug, int t1, int t2);

// The IC_delta arithmetic on precomputed post (0,30) and control (-810,-630)
// window counts; shared with the batched feature builder.
double ic_delta_from_counts(const ContingencyCounts& post, const ContingencyCounts& control);

// Post-window IC contrasted against the 27-to-21-months-prior control window.
// E* = n_de(-810,-630) * E(0,30) / E(-810,-630); when the control window has
// expectation 0 the statistic degrades to plain ic(0,30).
double ic_delta(const Cohort& cohort, const CodeId& code, const DrugId& drug);

// zeta1 = 1 iff IC(-30,-1) > IC(0,30); zeta2 = 1 iff IC(0,0) > IC(0,30).
std::pair<int, int> zeta_filters(const Cohort& cohort, const CodeId& code, const DrugId& drug);

struct MutaraConfig {
    int t1 = 1;
    int t2 = 30;
    int t3 = 180;   // history filter depth, days before first prescription
    std::uint64_t rng_seed = 0;

    int min_span() const { return t2 >= t1 ? t2 - t1 : t1 - t2; }
};

// Per-patient observation window. Exposed patients always participate;
// unexposed patients need an event history wide enough to hold the window,
// otherwise they are excluded from the statistic entirely.
struct MutaraWindow {
    bool excluded = false;
    bool exposed = false;
    AgeInterval window = AgeInterval::empty();
    AgeInterval filter = AgeInterval::empty();  // pre-exposure history window, exposed only
};

MutaraWindow mutara_window(const PatientRecord& patient, const DrugId& drug,
                           const MutaraConfig& config);

// h*: 1 iff the code falls in the patient's window and, for exposed patients,
// not in the t3-day history filter before first prescription.
int unexpected_occurrence(const CodeId& code, const DrugId& drug, const PatientRecord& patient,
                          const MutaraConfig& config);

// uL = mean(h* * exposed) - mean(exposed) * mean(h*) over included patients.
double unexpected_leverage(const Cohort& cohort, const CodeId& code, const DrugId& drug,
                           const MutaraConfig& config);

// L: same shape as uL but without the history filter.
double leverage(const Cohort& cohort, const CodeId& code, const DrugId& drug,
                const MutaraConfig& config);

struct HuntEntry {
    CodeId code;
    double lev = 0.0;
    double ulev = 0.0;
    int lev_rank = 0;
    int ulev_rank = 0;
    double ratio = 0.0;  // lev_rank / ulev_rank
};

// Ranks candidates by leverage-rank / unexpected-leverage-rank, descending.
// All descending sorts break ties by ascending code text.
std::vector<HuntEntry> hunt_rank(const Cohort& cohort, const std::vector<CodeId>& candidates,
                                 const DrugId& drug, const MutaraConfig& config);

}  // namespace adr
