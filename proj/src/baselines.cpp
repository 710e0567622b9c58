#include "adr/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "adr/errors.hpp"
#include "adr/rng.hpp"

namespace adr {
namespace {

double smoothed_log_ratio(double observed, double expected_value) {
    return std::log2((observed + 0.5) / (expected_value + 0.5));
}

AgeInterval offset_window(AgeDay anchor, int t1, int t2) {
    return AgeInterval::closed(static_cast<std::int64_t>(anchor) + t1,
                               static_cast<std::int64_t>(anchor) + t2);
}

}  // namespace

ContingencyCounts contingency(const Cohort& cohort, const CodeId& code, const DrugId& drug,
                              int t1, int t2) {
    if (t1 > t2) throw InputError("contingency: t1 > t2");
    ContingencyCounts counts;
    counts.t1 = t1;
    counts.t2 = t2;
    for (const PatientRecord& patient : cohort.patients) {
        std::set<DrugId> drugs;
        for (const auto& [age, prescribed] : patient.prescriptions) {
            drugs.insert(prescribed.begin(), prescribed.end());
        }
        for (const DrugId& d : drugs) {
            const bool is_target = d == drug;
            for (AgeDay start : era_starts(patient, d)) {
                const AgeInterval window = offset_window(start, t1, t2);
                if (interval_has_code(patient, window, code)) {
                    ++counts.n_dot_e;
                    if (is_target) ++counts.n_de;
                }
                if (interval_has_event(patient, window)) {
                    ++counts.n_dot_dot;
                    if (is_target) ++counts.n_d_dot;
                }
            }
        }
    }
    return counts;
}

double expected(const ContingencyCounts& counts) {
    if (counts.n_dot_dot == 0) return 0.0;
    return static_cast<double>(counts.n_d_dot) * static_cast<double>(counts.n_dot_e) /
           static_cast<double>(counts.n_dot_dot);
}

double ic_value(const ContingencyCounts& counts) {
    return smoothed_log_ratio(static_cast<double>(counts.n_de), expected(counts));
}

double ic(const Cohort& cohort, const CodeId& code, const DrugId& drug, int t1, int t2) {
    return ic_value(contingency(cohort, code, drug, t1, t2));
}

double ic_delta_from_counts(const ContingencyCounts& post, const ContingencyCounts& control) {
    const double e_post = expected(post);
    const double e_control = expected(control);
    // The control-window calibration of the expectation is undefined when the
    // control expectation vanishes; degrade to the plain post-window IC.
    const double e_star = e_control == 0.0
                              ? e_post
                              : static_cast<double>(control.n_de) * e_post / e_control;
    return smoothed_log_ratio(static_cast<double>(post.n_de), e_star);
}

double ic_delta(const Cohort& cohort, const CodeId& code, const DrugId& drug) {
    return ic_delta_from_counts(contingency(cohort, code, drug, 0, 30),
                                contingency(cohort, code, drug, -810, -630));
}

std::pair<int, int> zeta_filters(const Cohort& cohort, const CodeId& code, const DrugId& drug) {
    const double post = ic(cohort, code, drug, 0, 30);
    const double pre = ic(cohort, code, drug, -30, -1);
    const double day_of = ic(cohort, code, drug, 0, 0);
    return {pre > post ? 1 : 0, day_of > post ? 1 : 0};
}

MutaraWindow mutara_window(const PatientRecord& patient, const DrugId& drug,
                           const MutaraConfig& config) {
    if (config.t1 > config.t2) throw InputError("mutara_window: t1 > t2");
    if (config.t3 <= 0) throw InputError("mutara_window: t3 must be positive");
    MutaraWindow result;
    const std::set<AgeDay> ages = prescription_ages(patient, drug);
    if (!ages.empty()) {
        result.exposed = true;
        const AgeDay alpha1 = *ages.begin();
        // The window end anchors on the repeat prescription when the drug is
        // repeated within a month, else on the first prescription itself.
        AgeDay alpha2 = alpha1;
        if (ages.size() > 1) {
            const AgeDay second = *std::next(ages.begin());
            if (second - alpha1 < 30) alpha2 = second;
        }
        result.window = AgeInterval::closed(static_cast<std::int64_t>(alpha1) + config.t1,
                                            static_cast<std::int64_t>(alpha2) + config.t2);
        result.filter = AgeInterval::closed(static_cast<std::int64_t>(alpha1) - config.t3,
                                            static_cast<std::int64_t>(alpha1) - 1);
        return result;
    }
    const std::set<AgeDay> history = recorded_ages(patient, RecordKind::Events);
    const int width = config.min_span();
    if (history.empty() || *history.rbegin() - *history.begin() < width) {
        result.excluded = true;
        return result;
    }
    const AgeDay lo = *history.begin();
    const std::uint64_t slack =
        static_cast<std::uint64_t>(*history.rbegin() - *history.begin() - width);
    const std::uint64_t offset = keyed_uniform(config.rng_seed, patient.patient_id, slack);
    result.window = AgeInterval::closed(static_cast<std::int64_t>(lo) + static_cast<std::int64_t>(offset),
                                        static_cast<std::int64_t>(lo) + static_cast<std::int64_t>(offset) + width);
    return result;
}

int unexpected_occurrence(const CodeId& code, const DrugId& drug, const PatientRecord& patient,
                          const MutaraConfig& config) {
    const MutaraWindow w = mutara_window(patient, drug, config);
    if (w.excluded) throw PipelineError("unexpected_occurrence: excluded patient");
    if (!interval_has_code(patient, w.window, code)) return 0;
    if (w.exposed && interval_has_code(patient, w.filter, code)) return 0;
    return 1;
}

namespace {

struct LeverageSums {
    long long included = 0;
    long long exposed = 0;
    long long hits = 0;
    long long exposed_hits = 0;
};

double finish_leverage(const LeverageSums& sums) {
    if (sums.included == 0) throw PipelineError("leverage: no included patients");
    const double n = static_cast<double>(sums.included);
    return static_cast<double>(sums.exposed_hits) / n -
           (static_cast<double>(sums.exposed) / n) * (static_cast<double>(sums.hits) / n);
}

double leverage_impl(const Cohort& cohort, const CodeId& code, const DrugId& drug,
                     const MutaraConfig& config, bool apply_filter) {
    LeverageSums sums;
    for (const PatientRecord& patient : cohort.patients) {
        const MutaraWindow w = mutara_window(patient, drug, config);
        if (w.excluded) continue;
        ++sums.included;
        int hit = interval_has_code(patient, w.window, code) ? 1 : 0;
        if (hit && apply_filter && w.exposed && interval_has_code(patient, w.filter, code)) {
            hit = 0;
        }
        sums.hits += hit;
        if (w.exposed) {
            ++sums.exposed;
            sums.exposed_hits += hit;
        }
    }
    return finish_leverage(sums);
}

}  // namespace

double unexpected_leverage(const Cohort& cohort, const CodeId& code, const DrugId& drug,
                           const MutaraConfig& config) {
    return leverage_impl(cohort, code, drug, config, true);
}

double leverage(const Cohort& cohort, const CodeId& code, const DrugId& drug,
                const MutaraConfig& config) {
    return leverage_impl(cohort, code, drug, config, false);
}

std::vector<HuntEntry> hunt_rank(const Cohort& cohort, const std::vector<CodeId>& candidates,
                                 const DrugId& drug, const MutaraConfig& config) {
    if (candidates.empty()) throw PipelineError("hunt_rank: empty candidate set");

    // One window scan per patient, shared across candidates.
    std::vector<std::pair<const PatientRecord*, MutaraWindow>> scans;
    scans.reserve(cohort.patients.size());
    long long included = 0;
    long long exposed = 0;
    for (const PatientRecord& patient : cohort.patients) {
        MutaraWindow w = mutara_window(patient, drug, config);
        if (w.excluded) continue;
        ++included;
        if (w.exposed) ++exposed;
        scans.emplace_back(&patient, w);
    }
    if (included == 0) throw PipelineError("hunt_rank: no included patients");

    std::vector<HuntEntry> entries;
    entries.reserve(candidates.size());
    for (const CodeId& code : candidates) {
        LeverageSums plain{included, exposed, 0, 0};
        LeverageSums filtered{included, exposed, 0, 0};
        for (const auto& [patient, w] : scans) {
            if (!interval_has_code(*patient, w.window, code)) continue;
            plain.hits += 1;
            if (w.exposed) plain.exposed_hits += 1;
            if (w.exposed && interval_has_code(*patient, w.filter, code)) continue;
            filtered.hits += 1;
            if (w.exposed) filtered.exposed_hits += 1;
        }
        HuntEntry entry;
        entry.code = code;
        entry.lev = finish_leverage(plain);
        entry.ulev = finish_leverage(filtered);
        entries.push_back(std::move(entry));
    }

    // 1-based positions in the two descending orders; ties by code text.
    const auto assign_ranks = [&entries](double HuntEntry::* value, int HuntEntry::* rank) {
        std::vector<HuntEntry*> order;
        order.reserve(entries.size());
        for (HuntEntry& e : entries) order.push_back(&e);
        std::sort(order.begin(), order.end(), [value](const HuntEntry* a, const HuntEntry* b) {
            if (a->*value != b->*value) return a->*value > b->*value;
            return a->code < b->code;
        });
        for (std::size_t i = 0; i < order.size(); ++i) {
            order[i]->*rank = static_cast<int>(i + 1);
        }
    };
    assign_ranks(&HuntEntry::lev, &HuntEntry::lev_rank);
    assign_ranks(&HuntEntry::ulev, &HuntEntry::ulev_rank);
    for (HuntEntry& e : entries) {
        e.ratio = static_cast<double>(e.lev_rank) / static_cast<double>(e.ulev_rank);
    }
    std::sort(entries.begin(), entries.end(), [](const HuntEntry& a, const HuntEntry& b) {
        if (a.ratio != b.ratio) return a.ratio > b.ratio;
        return a.code < b.code;
    });
    return entries;
}

}  // namespace adr
