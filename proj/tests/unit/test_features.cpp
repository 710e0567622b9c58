#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "adr/baselines.hpp"
#include "adr/errors.hpp"
#include "adr/features.hpp"
#include "adr/temporal.hpp"
#include "oracle.hpp"
#include "support.hpp"

using namespace adr;
using testsupport::add_event;
using testsupport::add_rx;
using testsupport::make_patient;

namespace {

constexpr const char* kDrug = "900000001";

// n patients prescribed at day 1000, with the given event offsets relative to
// the prescription applied to every patient.
Cohort uniform_cohort(int n, const CodeId& code, const std::vector<int>& offsets) {
    Cohort cohort;
    for (int i = 0; i < n; ++i) {
        PatientRecord& p = make_patient(cohort, "p" + std::to_string(i));
        add_rx(p, 1000, kDrug);
        for (int offset : offsets) add_event(p, 1000 + offset, code);
    }
    return cohort;
}

bool is_finite(double x) { return std::isfinite(x); }

}  // namespace

TEST_SUITE("features") {

TEST_CASE("candidate sets") {
    SUBCASE("three-patient sample for drug 979596759") {
        const Cohort sample = testsupport::sample_cohort();
        const CandidateSet g = candidate_set(sample, "979596759");
        CHECK(g.drug == "979596759");
        CHECK(g.codes == std::set<CodeId>{"A123.", "D25.."});
    }

    SUBCASE("never-prescribed drug is an error") {
        const Cohort sample = testsupport::sample_cohort();
        CHECK_THROWS_AS(candidate_set(sample, "999999999"), InputError);
    }

    SUBCASE("prescribed drug with no post-window events gives an empty set") {
        Cohort cohort;
        PatientRecord& p = make_patient(cohort, "p1");
        add_rx(p, 1000, kDrug);
        add_event(p, 990, "A123.");
        const CandidateSet g = candidate_set(cohort, kDrug);
        CHECK(g.codes.empty());
    }

    SUBCASE("membership means at least one first-era window hit") {
        const Cohort cohort = testsupport::random_cohort(101, 40);
        for (const char* drug : {"900000001", "900000002"}) {
            const CandidateSet g = candidate_set(cohort, drug);
            for (const CodeId& code : g.codes) {
                int total = 0;
                for (const PatientRecord& p : cohort.patients) {
                    total += occurs_first_era(code, drug, p, 1, 30);
                }
                CHECK(total >= 1);
            }
        }
    }
}

TEST_CASE("before-after ratio") {
    SUBCASE("balanced occurrences give one") {
        Cohort cohort = uniform_cohort(5, "A123.", {-10, 10});
        CHECK(abratio(cohort, "A123.", kDrug, 30) == 1.0);
    }

    SUBCASE("clamped denominator") {
        Cohort cohort = uniform_cohort(3, "A123.", {10});
        CHECK(abratio(cohort, "A123.", kDrug, 30) == 3.0);
    }

    SUBCASE("no post-window occurrences give zero") {
        Cohort cohort = uniform_cohort(2, "A123.", {-10});
        CHECK(abratio(cohort, "A123.", kDrug, 30) == 0.0);
    }

    SUBCASE("both windows empty give zero, not NaN") {
        Cohort cohort = uniform_cohort(2, "A123.", {});
        CHECK(abratio(cohort, "A123.", kDrug, 30) == 0.0);
    }

    SUBCASE("the yearly window sees what the monthly one misses") {
        Cohort cohort = uniform_cohort(2, "A123.", {200});
        CHECK(abratio(cohort, "A123.", kDrug, 30) == 0.0);
        CHECK(abratio(cohort, "A123.", kDrug, 365) == 2.0);
    }
}

TEST_CASE("day-of-prescription ratio") {
    SUBCASE("never on day zero") {
        Cohort cohort = uniform_cohort(3, "A123.", {-100, 10});
        CHECK(dop(cohort, "A123.", kDrug) == 0.0);
    }

    SUBCASE("two on day zero, four in the prior year") {
        Cohort cohort;
        for (int i = 0; i < 4; ++i) {
            PatientRecord& p = make_patient(cohort, "p" + std::to_string(i));
            add_rx(p, 1000, kDrug);
            add_event(p, 900, "A123.");
            if (i < 2) add_event(p, 1000, "A123.");
        }
        CHECK(dop(cohort, "A123.", kDrug) == 0.5);
    }

    SUBCASE("only on day zero, clamped") {
        Cohort cohort = uniform_cohort(2, "A123.", {0});
        CHECK(dop(cohort, "A123.", kDrug) == 2.0);
    }
}

TEST_CASE("expectedness") {
    SUBCASE("chronic code present on both sides for everyone") {
        Cohort cohort = uniform_cohort(3, "A123.", {-10, 10});
        CHECK(expectedness(cohort, "A123.", kDrug) == 1.0);
    }

    SUBCASE("fresh code never seen before") {
        Cohort cohort = uniform_cohort(3, "A123.", {10});
        CHECK(expectedness(cohort, "A123.", kDrug) == 0.0);
    }

    SUBCASE("one of four post-window patients had it before") {
        Cohort cohort;
        for (int i = 0; i < 4; ++i) {
            PatientRecord& p = make_patient(cohort, "p" + std::to_string(i));
            add_rx(p, 1000, kDrug);
            add_event(p, 1010, "A123.");
            if (i == 0) add_event(p, 990, "A123.");
        }
        CHECK(expectedness(cohort, "A123.", kDrug) == 0.25);
    }

    SUBCASE("code absent from every post window is an error") {
        Cohort cohort = uniform_cohort(2, "A123.", {-10});
        CHECK_THROWS_AS(expectedness(cohort, "A123.", kDrug), PipelineError);
    }
}

TEST_CASE("prefix-class ratios") {
    SUBCASE("singleton class equals the plain monthly ratio") {
        const Cohort sample = testsupport::sample_cohort();
        CHECK(abratio_level(sample, "D25..", "979596759", 3) ==
              abratio(sample, "D25..", "979596759", 30));
        CHECK(abratio_level(sample, "D25..", "979596759", 2) ==
              abratio(sample, "D25..", "979596759", 30));
    }

    SUBCASE("two siblings pool into the class count") {
        Cohort cohort;
        PatientRecord& p1 = make_patient(cohort, "p1");
        add_rx(p1, 1000, kDrug);
        add_event(p1, 1010, "A11a.");
        PatientRecord& p2 = make_patient(cohort, "p2");
        add_rx(p2, 1000, kDrug);
        add_event(p2, 1012, "A11b.");
        CHECK(abratio_level(cohort, "A11a.", kDrug, 3) == 2.0);
        CHECK(abratio_level(cohort, "A11b.", kDrug, 3) == 2.0);
        CHECK(abratio_level(cohort, "A11a.", kDrug, 2) == 2.0);
        CHECK(abratio(cohort, "A11a.", kDrug, 30) == 1.0);
    }

    SUBCASE("bad level is rejected") {
        const Cohort sample = testsupport::sample_cohort();
        CHECK_THROWS_AS(abratio_level(sample, "D25..", "979596759", 0), InputError);
        CHECK_THROWS_AS(abratio_level(sample, "D25..", "979596759", 6), InputError);
    }
}

TEST_CASE("assembled vector matches the individual statistics") {
    const Cohort sample = testsupport::sample_cohort();
    const FeatureVector v = feature_vector(sample, "D25..", "979596759");
    CHECK(v.code == "D25..");
    CHECK(v.drug == "979596759");
    CHECK(v.abratio30 == abratio(sample, "D25..", "979596759", 30));
    CHECK(v.abratio365 == abratio(sample, "D25..", "979596759", 365));
    CHECK(v.dop == dop(sample, "D25..", "979596759"));
    CHECK(v.expect == expectedness(sample, "D25..", "979596759"));
    CHECK(v.lev3 == abratio_level(sample, "D25..", "979596759", 3));
    CHECK(v.lev2 == abratio_level(sample, "D25..", "979596759", 2));
    CHECK(v.ic_delta == ic_delta(sample, "D25..", "979596759"));
    const auto [z1, z2] = zeta_filters(sample, "D25..", "979596759");
    CHECK(v.zeta1 == z1);
    CHECK(v.zeta2 == z2);

    const auto arr = v.as_array();
    CHECK(arr[0] == v.abratio30);
    CHECK(arr[3] == v.expect);
    CHECK(arr[6] == v.ic_delta);
    CHECK(arr[8] == static_cast<double>(v.zeta2));
}

TEST_CASE("feature matrix") {
    SUBCASE("rows agree bit-for-bit with per-code evaluation") {
        for (std::uint64_t seed : {111u, 112u}) {
            Cohort cohort = preprocess(testsupport::random_cohort(seed, 50));
            for (const DrugId& drug : cohort.drug_universe()) {
                const CandidateSet g = candidate_set(cohort, drug);
                if (g.codes.empty()) continue;
                const FeatureMatrix m = feature_matrix(cohort, g);
                REQUIRE(m.raw.size() == g.codes.size());
                CHECK(std::is_sorted(m.codes.begin(), m.codes.end()));
                for (std::size_t i = 0; i < m.codes.size(); ++i) {
                    const FeatureVector direct = feature_vector(cohort, m.codes[i], drug);
                    const FeatureVector& row = m.raw[i];
                    CHECK(row.abratio30 == direct.abratio30);
                    CHECK(row.abratio365 == direct.abratio365);
                    CHECK(row.dop == direct.dop);
                    CHECK(row.expect == direct.expect);
                    CHECK(row.lev3 == direct.lev3);
                    CHECK(row.lev2 == direct.lev2);
                    CHECK(row.ic_delta == direct.ic_delta);
                    CHECK(row.zeta1 == direct.zeta1);
                    CHECK(row.zeta2 == direct.zeta2);
                }
            }
        }
    }

    SUBCASE("no attribute is ever NaN or infinite") {
        Cohort cohort = preprocess(testsupport::random_cohort(113, 50));
        for (const DrugId& drug : cohort.drug_universe()) {
            const CandidateSet g = candidate_set(cohort, drug);
            if (g.codes.empty()) continue;
            const FeatureMatrix m = feature_matrix(cohort, g);
            for (const FeatureVector& row : m.raw) {
                for (double x : row.as_array()) CHECK(is_finite(x));
            }
            for (const auto& row : m.standardized) {
                for (double x : row) CHECK(is_finite(x));
            }
        }
    }

    SUBCASE("standardized columns have zero mean and unit or zero spread") {
        Cohort cohort = preprocess(testsupport::random_cohort(114, 60));
        const CandidateSet g = candidate_set(cohort, "900000001");
        REQUIRE(!g.codes.empty());
        const FeatureMatrix m = feature_matrix(cohort, g);
        const double n = static_cast<double>(m.standardized.size());
        for (int k = 0; k < kFeatureDim; ++k) {
            double sum = 0.0, ss = 0.0;
            for (const auto& row : m.standardized) {
                sum += row[static_cast<std::size_t>(k)];
                ss += row[static_cast<std::size_t>(k)] * row[static_cast<std::size_t>(k)];
            }
            CHECK(std::abs(sum / n) < 1e-9);
            const double var = ss / n;
            if (m.stddev[static_cast<std::size_t>(k)] > 0.0) {
                CHECK(var == doctest::Approx(1.0).epsilon(1e-9));
            } else {
                CHECK(var == 0.0);
            }
        }
    }

    SUBCASE("patient order does not matter") {
        Cohort cohort = preprocess(testsupport::random_cohort(115, 40));
        Cohort reversed = cohort;
        std::reverse(reversed.patients.begin(), reversed.patients.end());
        const CandidateSet g = candidate_set(cohort, "900000002");
        const CandidateSet g2 = candidate_set(reversed, "900000002");
        CHECK(g.codes == g2.codes);
        REQUIRE(!g.codes.empty());
        const FeatureMatrix a = feature_matrix(cohort, g);
        const FeatureMatrix b = feature_matrix(reversed, g2);
        REQUIRE(a.codes == b.codes);
        for (std::size_t i = 0; i < a.raw.size(); ++i) {
            CHECK(a.raw[i].as_array() == b.raw[i].as_array());
        }
    }

    SUBCASE("row lookup") {
        Cohort cohort = uniform_cohort(2, "A123.", {10});
        const CandidateSet g = candidate_set(cohort, kDrug);
        const FeatureMatrix m = feature_matrix(cohort, g);
        CHECK(m.index_of("A123.") == 0);
        CHECK(m.index_of("Z9z..") == -1);
    }

    SUBCASE("ratio features match the brute-force scanner") {
        int checked = 0;
        for (std::uint64_t seed : {116u, 117u, 118u}) {
            Cohort cohort = preprocess(testsupport::random_cohort(seed, 200));
            const oracle::Rows rows = oracle::Rows::flatten(cohort);
            for (const DrugId& drug : cohort.drug_universe()) {
                const CandidateSet g = candidate_set(cohort, drug);
                if (g.codes.empty()) continue;
                const FeatureMatrix m = feature_matrix(cohort, g);
                for (std::size_t i = 0; i < m.codes.size(); ++i) {
                    const CodeId& code = m.codes[i];
                    const FeatureVector& row = m.raw[i];
                    CHECK(row.abratio30 ==
                          doctest::Approx(oracle::abratio(rows, code, drug, 30)).epsilon(1e-12));
                    CHECK(row.abratio365 ==
                          doctest::Approx(oracle::abratio(rows, code, drug, 365)).epsilon(1e-12));
                    CHECK(row.dop ==
                          doctest::Approx(oracle::dop(rows, code, drug)).epsilon(1e-12));
                    CHECK(row.lev3 == doctest::Approx(oracle::abratio_level(rows, code, drug, 3))
                                          .epsilon(1e-12));
                    CHECK(row.lev2 == doctest::Approx(oracle::abratio_level(rows, code, drug, 2))
                                          .epsilon(1e-12));
                    double expect_value = 0.0;
                    REQUIRE(oracle::expectedness(rows, code, drug, &expect_value));
                    CHECK(row.expect == doctest::Approx(expect_value).epsilon(1e-12));
                    ++checked;
                }
            }
        }
        CHECK(checked >= 20);
    }
}

TEST_CASE("feature csv dump") {
    Cohort cohort;
    PatientRecord& p1 = make_patient(cohort, "p1");
    add_rx(p1, 1000, kDrug);
    add_event(p1, 1010, "A11a.");
    PatientRecord& p2 = make_patient(cohort, "p2");
    add_rx(p2, 1000, kDrug);
    add_event(p2, 1012, "A11b.");

    const FeatureMatrix m = feature_matrix(cohort, candidate_set(cohort, kDrug));
    testsupport::TempDir dir("features");
    const std::string path = dir.file("features.csv");
    write_feature_csv(m, path);
    CHECK(testsupport::read_file(path) ==
          "code,abratio30,abratio365,dop,expect,lev3,lev2,ic_delta,zeta1,zeta2\n"
          "A11a.,1,1,0,0,2,2,0,0,0\n"
          "A11b.,1,1,0,0,2,2,0,0,0\n");
}

}  // TEST_SUITE
