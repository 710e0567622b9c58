#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "adr/errors.hpp"
#include "adr/labeling.hpp"
#include "support.hpp"

using namespace adr;

namespace {

// Minimal feature matrix carrying only the monthly ratio, which is all the
// label validation reads. Entries must be given in ascending code order.
FeatureMatrix matrix_with(const std::vector<std::pair<CodeId, double>>& ratios) {
    FeatureMatrix m;
    for (const auto& [code, ratio] : ratios) {
        m.codes.push_back(code);
        FeatureVector v;
        v.code = code;
        v.abratio30 = ratio;
        m.raw.push_back(v);
        m.standardized.push_back({});
    }
    return m;
}

CandidateSet candidates_of(const FeatureMatrix& m) {
    CandidateSet g;
    g.codes.insert(m.codes.begin(), m.codes.end());
    g.drug = "900000001";
    return g;
}

TermList terms(TermList::Kind kind, std::vector<std::string> words) {
    TermList list;
    list.kind = kind;
    list.terms = std::move(words);
    return list;
}

}  // namespace

TEST_SUITE("labeling") {

TEST_CASE("noise labels come from code-text prefixes") {
    const FeatureMatrix m = matrix_with({{"A123.", 2.0}, {"Z1a..", 0.5}});
    const CandidateSet g = candidates_of(m);
    CodeTree tree;
    testsupport::put_code_chain(tree, "A123.", "anything");
    testsupport::put_code_chain(tree, "Z1a..", "administrative note");

    SUBCASE("prefix match") {
        const LabelAssignment a = label_noise(g, tree, {"Z"});
        CHECK(a.labels.size() == 1);
        REQUIRE(a.labels.count("Z1a.."));
        CHECK(a.labels.at("Z1a..") == Label::Noise);
        CHECK(a.provenance.at("Z1a..") == "Z");
    }

    SUBCASE("no overlap labels nothing") {
        CHECK(label_noise(g, tree, {"Q"}).labels.empty());
    }

    SUBCASE("empty prefix list is rejected") {
        CHECK_THROWS_AS(label_noise(g, tree, {}), InputError);
    }
}

TEST_CASE("indicator labels need a term match and a low ratio") {
    CodeTree tree;
    testsupport::put_code_chain(tree, "G20..", "Essential Hypertension");
    testsupport::put_code_chain(tree, "G21..", "essential hypertension follow-up");
    testsupport::put_code_chain(tree, "B99..", "unrelated finding");
    const TermList indicator_terms = terms(TermList::Kind::Indicator, {"hypertension"});

    SUBCASE("matching term with ratio below one") {
        const FeatureMatrix m = matrix_with({{"G20..", 0.6}});
        const LabelAssignment a = label_indicators(candidates_of(m), tree, indicator_terms, m);
        REQUIRE(a.labels.count("G20.."));
        CHECK(a.labels.at("G20..") == Label::Indicator);
        CHECK(a.provenance.at("G20..") == "hypertension");
    }

    SUBCASE("matching term with ratio at or above one fails validation") {
        const FeatureMatrix m = matrix_with({{"G20..", 1.2}});
        CHECK(label_indicators(candidates_of(m), tree, indicator_terms, m).labels.empty());
    }

    SUBCASE("no term match") {
        const FeatureMatrix m = matrix_with({{"B99..", 0.2}});
        CHECK(label_indicators(candidates_of(m), tree, indicator_terms, m).labels.empty());
    }

    SUBCASE("mixed case in both description and candidate set") {
        const FeatureMatrix m = matrix_with({{"G20..", 0.6}, {"G21..", 0.7}});
        const LabelAssignment a = label_indicators(candidates_of(m), tree, indicator_terms, m);
        CHECK(a.labels.size() == 2);
    }
}

TEST_CASE("reaction labels") {
    CodeTree tree;
    testsupport::put_code_chain(tree, "J51..", "nausea symptom");
    testsupport::put_code_chain(tree, "TJ01.", "Ciprofloxacin ADVERSE reaction");
    testsupport::put_code_chain(tree, "B99..", "unrelated finding");
    const TermList adr_terms = terms(TermList::Kind::Adr, {"nausea"});

    SUBCASE("term match with a high ratio") {
        const FeatureMatrix m = matrix_with({{"J51..", 2.0}});
        const LabelAssignment a =
            label_adrs(candidates_of(m), tree, adr_terms, "ciprofloxacin", m);
        REQUIRE(a.labels.count("J51.."));
        CHECK(a.labels.at("J51..") == Label::Adr);
        CHECK(a.provenance.at("J51..") == "nausea");
    }

    SUBCASE("term match below the 1.5 threshold fails validation") {
        const FeatureMatrix m = matrix_with({{"J51..", 1.4}});
        CHECK(label_adrs(candidates_of(m), tree, adr_terms, "ciprofloxacin", m).labels.empty());
    }

    SUBCASE("drug name plus adverse needs no ratio") {
        const FeatureMatrix m = matrix_with({{"TJ01.", 0.1}});
        const LabelAssignment a =
            label_adrs(candidates_of(m), tree, adr_terms, "ciprofloxacin", m);
        REQUIRE(a.labels.count("TJ01."));
        CHECK(a.labels.at("TJ01.") == Label::Adr);
        CHECK(a.provenance.at("TJ01.") == "ciprofloxacin+adverse");
    }

    SUBCASE("unrelated description stays unlabelled") {
        const FeatureMatrix m = matrix_with({{"B99..", 9.0}});
        CHECK(label_adrs(candidates_of(m), tree, adr_terms, "ciprofloxacin", m).labels.empty());
    }
}

TEST_CASE("merging partial assignments") {
    LabelAssignment noise;
    noise.labels["Z1a.."] = Label::Noise;
    noise.provenance["Z1a.."] = "Z";
    LabelAssignment indicators;
    indicators.labels["G20.."] = Label::Indicator;
    indicators.provenance["G20.."] = "hypertension";
    LabelAssignment adrs;
    adrs.labels["J51.."] = Label::Adr;
    adrs.provenance["J51.."] = "nausea";

    SUBCASE("disjoint parts simply union") {
        const LabelAssignment merged = merge_labels({noise, indicators, adrs});
        CHECK(merged.labels.size() == 3);
        CHECK(merged.labels.at("Z1a..") == Label::Noise);
        CHECK(merged.labels.at("G20..") == Label::Indicator);
        CHECK(merged.labels.at("J51..") == Label::Adr);
        CHECK(merged.provenance.at("J51..") == "nausea");
    }

    SUBCASE("empty part is an identity") {
        const LabelAssignment merged = merge_labels({LabelAssignment{}, adrs});
        CHECK(merged.labels == adrs.labels);
        CHECK(merged.provenance == adrs.provenance);
    }

    SUBCASE("noise beats a conflicting reaction label in either order") {
        LabelAssignment conflicting;
        conflicting.labels["Z1a.."] = Label::Adr;
        conflicting.provenance["Z1a.."] = "rupture";
        for (const auto& parts :
             {std::vector<LabelAssignment>{noise, conflicting},
              std::vector<LabelAssignment>{conflicting, noise}}) {
            const LabelAssignment merged = merge_labels(parts);
            CHECK(merged.labels.at("Z1a..") == Label::Noise);
            CHECK(merged.provenance.at("Z1a..") == "Z");
        }
    }

    SUBCASE("indicator beats a conflicting reaction label") {
        LabelAssignment conflicting;
        conflicting.labels["G20.."] = Label::Adr;
        const LabelAssignment merged = merge_labels({conflicting, indicators});
        CHECK(merged.labels.at("G20..") == Label::Indicator);
    }
}

TEST_CASE("holding out codes") {
    LabelAssignment assignment;
    assignment.labels["J51.."] = Label::Adr;
    assignment.provenance["J51.."] = "nausea";
    assignment.labels["G20.."] = Label::Indicator;
    assignment.provenance["G20.."] = "hypertension";

    SUBCASE("hiding a labelled code removes it and records it") {
        std::vector<std::string> warnings;
        const LabelAssignment out = holdout(assignment, {"J51.."}, &warnings);
        CHECK(warnings.empty());
        CHECK(out.labels.count("J51..") == 0);
        CHECK(out.provenance.count("J51..") == 0);
        CHECK(out.held_out == std::vector<CodeId>{"J51.."});
        CHECK(out.labels.at("G20..") == Label::Indicator);  // untouched
    }

    SUBCASE("hiding an unlabelled code is a warning, not a change") {
        std::vector<std::string> warnings;
        const LabelAssignment out = holdout(assignment, {"X99.."}, &warnings);
        REQUIRE(warnings.size() == 1);
        CHECK(warnings[0].find("X99..") != std::string::npos);
        CHECK(out.labels == assignment.labels);
        CHECK(out.held_out.empty());
    }

    SUBCASE("difference is exactly the hidden labelled codes") {
        const LabelAssignment out = holdout(assignment, {"J51..", "X99.."});
        CHECK(out.labels.size() == assignment.labels.size() - 1);
        for (const auto& [code, label] : out.labels) {
            CHECK(assignment.labels.at(code) == label);
        }
    }
}

TEST_CASE("minimum seed requirement") {
    LabelAssignment assignment;
    assignment.labels["A0a.."] = Label::Adr;
    assignment.labels["A0b.."] = Label::Adr;
    assignment.labels["G20.."] = Label::Indicator;
    assignment.labels["G21.."] = Label::Indicator;
    assignment.labels["Z1a.."] = Label::Noise;
    assignment.labels["Z1b.."] = Label::Noise;

    CHECK_NOTHROW(require_min_seeds(assignment));
    CHECK_NOTHROW(require_min_seeds(assignment, 2));
    CHECK_THROWS_AS(require_min_seeds(assignment, 3), PipelineError);

    LabelAssignment thin = assignment;
    thin.labels.erase("G21..");
    CHECK_THROWS_WITH_AS(require_min_seeds(thin), doctest::Contains("INDICATOR=1"),
                         PipelineError);
}

TEST_CASE("labels combined over a candidate set stay disjoint and validated") {
    CodeTree tree;
    testsupport::put_code_chain(tree, "G20..", "essential hypertension");
    testsupport::put_code_chain(tree, "J51..", "nausea symptom");
    testsupport::put_code_chain(tree, "Z1a..", "nausea admin note");  // noise wins
    testsupport::put_code_chain(tree, "B99..", "unrelated finding");
    const FeatureMatrix m = matrix_with(
        {{"B99..", 1.0}, {"G20..", 0.4}, {"J51..", 3.0}, {"Z1a..", 2.5}});
    const CandidateSet g = candidates_of(m);

    const LabelAssignment merged = merge_labels({
        label_noise(g, tree, {"Z"}),
        label_indicators(g, tree, terms(TermList::Kind::Indicator, {"hypertension"}), m),
        label_adrs(g, tree, terms(TermList::Kind::Adr, {"nausea"}), "ciprofloxacin", m),
    });

    CHECK(merged.labels.at("Z1a..") == Label::Noise);
    CHECK(merged.labels.at("G20..") == Label::Indicator);
    CHECK(merged.labels.at("J51..") == Label::Adr);
    CHECK(merged.labels.count("B99..") == 0);

    for (const auto& [code, label] : merged.labels) {
        CHECK(g.codes.count(code) == 1);
        CHECK(label != Label::Unlabelled);
        CHECK(!merged.provenance.at(code).empty());
        const int row = m.index_of(code);
        REQUIRE(row >= 0);
        if (label == Label::Indicator) {
            CHECK(m.raw[static_cast<std::size_t>(row)].abratio30 < 1.0);
        }
    }
}

TEST_CASE("label csv dump") {
    LabelAssignment assignment;
    assignment.labels["J51.."] = Label::Adr;
    assignment.provenance["J51.."] = "nausea";
    assignment.labels["Z1a.."] = Label::Noise;
    assignment.provenance["Z1a.."] = "Z";

    testsupport::TempDir dir("labels");
    const std::string path = dir.file("labels.csv");
    write_label_csv(assignment, path);
    CHECK(testsupport::read_file(path) ==
          "code,label,provenance\n"
          "J51..,ADR,nausea\n"
          "Z1a..,NOISE,Z\n");
}

}  // TEST_SUITE
