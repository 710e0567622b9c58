#include "adr/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "adr/baselines.hpp"
#include "adr/errors.hpp"
#include "adr/format.hpp"
#include "adr/temporal.hpp"

namespace adr {
namespace {

AgeInterval anchored(AgeDay anchor, int t1, int t2) {
    return AgeInterval::closed(static_cast<std::int64_t>(anchor) + t1,
                               static_cast<std::int64_t>(anchor) + t2);
}

double clamped_ratio(long long numerator, long long denominator) {
    return static_cast<double>(numerator) / static_cast<double>(std::max(1LL, denominator));
}

}  // namespace

CandidateSet candidate_set(const Cohort& cohort, const DrugId& drug) {
    CandidateSet result;
    result.drug = drug;
    bool prescribed = false;
    for (const PatientRecord& patient : cohort.patients) {
        const auto first = first_prescription(patient, drug);
        if (!first) continue;
        prescribed = true;
        const std::set<CodeId> codes =
            events_in_interval(patient, anchored(*first, 1, 30));
        result.codes.insert(codes.begin(), codes.end());
    }
    if (!prescribed) {
        throw InputError("drug '" + drug + "' is never prescribed in the cohort");
    }
    return result;
}

double abratio(const Cohort& cohort, const CodeId& code, const DrugId& drug, int window) {
    long long post = 0;
    long long pre = 0;
    for (const PatientRecord& patient : cohort.patients) {
        post += occurs_first_era(code, drug, patient, 1, window);
        pre += occurs_first_era(code, drug, patient, -window, -1);
    }
    return clamped_ratio(post, pre);
}

double dop(const Cohort& cohort, const CodeId& code, const DrugId& drug) {
    long long day_of = 0;
    long long prior_year = 0;
    for (const PatientRecord& patient : cohort.patients) {
        day_of += occurs_first_era(code, drug, patient, 0, 0);
        prior_year += occurs_first_era(code, drug, patient, -365, -1);
    }
    return clamped_ratio(day_of, prior_year);
}

double expectedness(const Cohort& cohort, const CodeId& code, const DrugId& drug) {
    long long post = 0;
    long long both = 0;
    for (const PatientRecord& patient : cohort.patients) {
        const int after = occurs_first_era(code, drug, patient, 1, 30);
        if (!after) continue;
        ++post;
        both += occurs_first_era(code, drug, patient, -30, -1);
    }
    if (post == 0) {
        throw PipelineError("expectedness undefined: '" + code +
                            "' never occurs in the month after exposure");
    }
    return static_cast<double>(both) / static_cast<double>(post);
}

double abratio_level(const Cohort& cohort, const CodeId& code, const DrugId& drug, int level) {
    if (level < 1 || level > kCodeLength) throw InputError("abratio_level: bad level");
    const std::string prefix = code.substr(0, static_cast<std::size_t>(level));
    long long post = 0;
    long long pre = 0;
    for (const PatientRecord& patient : cohort.patients) {
        const auto first = first_prescription(patient, drug);
        if (!first) continue;
        if (interval_has_prefix(patient, anchored(*first, 1, 30), prefix)) ++post;
        if (interval_has_prefix(patient, anchored(*first, -30, -1), prefix)) ++pre;
    }
    return clamped_ratio(post, pre);
}

FeatureVector feature_vector(const Cohort& cohort, const CodeId& code, const DrugId& drug) {
    FeatureVector v;
    v.code = code;
    v.drug = drug;
    v.abratio30 = abratio(cohort, code, drug, 30);
    v.abratio365 = abratio(cohort, code, drug, 365);
    v.dop = dop(cohort, code, drug);
    v.expect = expectedness(cohort, code, drug);
    v.lev3 = abratio_level(cohort, code, drug, 3);
    v.lev2 = abratio_level(cohort, code, drug, 2);
    v.ic_delta = ic_delta(cohort, code, drug);
    const auto [z1, z2] = zeta_filters(cohort, code, drug);
    v.zeta1 = z1;
    v.zeta2 = z2;
    return v;
}

int FeatureMatrix::index_of(const CodeId& code) const {
    const auto it = std::lower_bound(codes.begin(), codes.end(), code);
    if (it == codes.end() || *it != code) return -1;
    return static_cast<int>(it - codes.begin());
}

FeatureMatrix feature_matrix(const Cohort& cohort, const CandidateSet& candidates) {
    FeatureMatrix m;
    m.drug = candidates.drug;
    m.codes.assign(candidates.codes.begin(), candidates.codes.end());
    const std::size_t n = m.codes.size();

    std::map<CodeId, int> row_of;
    std::map<std::string, std::vector<int>> level3_rows;
    std::map<std::string, std::vector<int>> level2_rows;
    for (std::size_t i = 0; i < n; ++i) {
        row_of[m.codes[i]] = static_cast<int>(i);
        level3_rows[m.codes[i].substr(0, 3)].push_back(static_cast<int>(i));
        level2_rows[m.codes[i].substr(0, 2)].push_back(static_cast<int>(i));
    }

    std::vector<long long> post30(n), pre30(n), post365(n), pre365(n), day0(n), both30(n);
    std::vector<long long> lev3post(n), lev3pre(n), lev2post(n), lev2pre(n);

    // Era-level counts for IC_delta / zeta: post month, 27-to-21-months-prior
    // control, pre month, day of prescription.
    constexpr int kWindows = 4;
    constexpr int wt1[kWindows] = {0, -810, -30, 0};
    constexpr int wt2[kWindows] = {30, -630, -1, 0};
    std::array<std::vector<long long>, kWindows> n_de;
    std::array<std::vector<long long>, kWindows> n_dot_e;
    std::array<long long, kWindows> n_d_dot{};
    std::array<long long, kWindows> n_dot_dot{};
    for (int w = 0; w < kWindows; ++w) {
        n_de[w].assign(n, 0);
        n_dot_e[w].assign(n, 0);
    }

    const auto bump_prefixes = [&](const std::set<CodeId>& window_codes,
                                   std::vector<long long>& lev3_counts,
                                   std::vector<long long>& lev2_counts) {
        std::set<std::string> seen3;
        std::set<std::string> seen2;
        for (const CodeId& code : window_codes) {
            seen3.insert(code.substr(0, 3));
            seen2.insert(code.substr(0, 2));
        }
        for (const std::string& prefix : seen3) {
            const auto it = level3_rows.find(prefix);
            if (it == level3_rows.end()) continue;
            for (int row : it->second) ++lev3_counts[static_cast<std::size_t>(row)];
        }
        for (const std::string& prefix : seen2) {
            const auto it = level2_rows.find(prefix);
            if (it == level2_rows.end()) continue;
            for (int row : it->second) ++lev2_counts[static_cast<std::size_t>(row)];
        }
    };

    for (const PatientRecord& patient : cohort.patients) {
        const auto first = first_prescription(patient, m.drug);
        if (first) {
            const AgeDay anchor = *first;
            const std::set<CodeId> in_post30 = events_in_interval(patient, anchored(anchor, 1, 30));
            const std::set<CodeId> in_pre30 =
                events_in_interval(patient, anchored(anchor, -30, -1));
            const std::set<CodeId> in_post365 =
                events_in_interval(patient, anchored(anchor, 1, 365));
            const std::set<CodeId> in_pre365 =
                events_in_interval(patient, anchored(anchor, -365, -1));
            const std::set<CodeId> in_day0 = events_in_interval(patient, anchored(anchor, 0, 0));

            const auto bump = [&row_of](const std::set<CodeId>& codes,
                                        std::vector<long long>& counts) {
                for (const CodeId& code : codes) {
                    const auto it = row_of.find(code);
                    if (it != row_of.end()) ++counts[static_cast<std::size_t>(it->second)];
                }
            };
            bump(in_post30, post30);
            bump(in_pre30, pre30);
            bump(in_post365, post365);
            bump(in_pre365, pre365);
            bump(in_day0, day0);
            for (const CodeId& code : in_post30) {
                const auto it = row_of.find(code);
                if (it != row_of.end() && in_pre30.count(code)) {
                    ++both30[static_cast<std::size_t>(it->second)];
                }
            }
            bump_prefixes(in_post30, lev3post, lev2post);
            bump_prefixes(in_pre30, lev3pre, lev2pre);
        }

        std::set<DrugId> drugs;
        for (const auto& [age, prescribed] : patient.prescriptions) {
            drugs.insert(prescribed.begin(), prescribed.end());
        }
        for (const DrugId& d : drugs) {
            const bool is_target = d == m.drug;
            for (AgeDay start : era_starts(patient, d)) {
                for (int w = 0; w < kWindows; ++w) {
                    const std::set<CodeId> in_window =
                        events_in_interval(patient, anchored(start, wt1[w], wt2[w]));
                    if (!in_window.empty()) {
                        ++n_dot_dot[w];
                        if (is_target) ++n_d_dot[w];
                    }
                    for (const CodeId& code : in_window) {
                        const auto it = row_of.find(code);
                        if (it == row_of.end()) continue;
                        ++n_dot_e[w][static_cast<std::size_t>(it->second)];
                        if (is_target) ++n_de[w][static_cast<std::size_t>(it->second)];
                    }
                }
            }
        }
    }

    m.raw.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (post30[i] == 0) {
            throw PipelineError("expectedness undefined: '" + m.codes[i] +
                                "' never occurs in the month after exposure");
        }
        FeatureVector& v = m.raw[i];
        v.code = m.codes[i];
        v.drug = m.drug;
        v.abratio30 = clamped_ratio(post30[i], pre30[i]);
        v.abratio365 = clamped_ratio(post365[i], pre365[i]);
        v.dop = clamped_ratio(day0[i], pre365[i]);
        v.expect = static_cast<double>(both30[i]) / static_cast<double>(post30[i]);
        v.lev3 = clamped_ratio(lev3post[i], lev3pre[i]);
        v.lev2 = clamped_ratio(lev2post[i], lev2pre[i]);

        std::array<ContingencyCounts, kWindows> counts;
        for (int w = 0; w < kWindows; ++w) {
            counts[w].n_de = n_de[w][i];
            counts[w].n_dot_e = n_dot_e[w][i];
            counts[w].n_d_dot = n_d_dot[w];
            counts[w].n_dot_dot = n_dot_dot[w];
            counts[w].t1 = wt1[w];
            counts[w].t2 = wt2[w];
        }
        v.ic_delta = ic_delta_from_counts(counts[0], counts[1]);
        const double post_ic = ic_value(counts[0]);
        v.zeta1 = ic_value(counts[2]) > post_ic ? 1 : 0;
        v.zeta2 = ic_value(counts[3]) > post_ic ? 1 : 0;
    }

    m.standardized.resize(n);
    const double count = static_cast<double>(n);
    for (int k = 0; k < kFeatureDim; ++k) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) sum += m.raw[i].as_array()[static_cast<std::size_t>(k)];
        const double mean = n == 0 ? 0.0 : sum / count;
        double ss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = m.raw[i].as_array()[static_cast<std::size_t>(k)] - mean;
            ss += d * d;
        }
        const double sd = n == 0 ? 0.0 : std::sqrt(ss / count);
        m.mean[static_cast<std::size_t>(k)] = mean;
        m.stddev[static_cast<std::size_t>(k)] = sd;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = m.raw[i].as_array()[static_cast<std::size_t>(k)];
            m.standardized[i][static_cast<std::size_t>(k)] = sd > 0.0 ? (x - mean) / sd : 0.0;
        }
    }

    return m;
}

void write_feature_csv(const FeatureMatrix& matrix, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write " + path);
    out << "code,abratio30,abratio365,dop,expect,lev3,lev2,ic_delta,zeta1,zeta2\n";
    for (const FeatureVector& v : matrix.raw) {
        out << v.code << ',' << format_double(v.abratio30) << ',' << format_double(v.abratio365)
            << ',' << format_double(v.dop) << ',' << format_double(v.expect) << ','
            << format_double(v.lev3) << ',' << format_double(v.lev2) << ','
            << format_double(v.ic_delta) << ',' << v.zeta1 << ',' << v.zeta2 << '\n';
    }
}

}  // namespace adr
