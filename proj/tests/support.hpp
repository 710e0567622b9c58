#pragma once

// Shared test fixtures: a small hand-checkable cohort, a randomized cohort
// builder, and scratch-directory helpers.

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "adr/code_tree.hpp"
#include "adr/patient.hpp"
#include "adr/rng.hpp"
#include "adr/types.hpp"

namespace testsupport {

inline adr::PatientRecord make_patient(std::string id, adr::AgeDay registration = 0) {
    adr::PatientRecord p;
    p.patient_id = std::move(id);
    p.registration_age = registration;
    return p;
}

// Appends a fresh patient and returns a reference to it. The reference is
// invalidated by the next append, so finish one patient before adding another.
inline adr::PatientRecord& make_patient(adr::Cohort& cohort, std::string id,
                                        adr::AgeDay registration = 0) {
    cohort.patients.push_back(make_patient(std::move(id), registration));
    return cohort.patients.back();
}

inline void add_event(adr::PatientRecord& p, adr::AgeDay age, const adr::CodeId& code) {
    p.events[age].insert(code);
}

inline void add_rx(adr::PatientRecord& p, adr::AgeDay age, const adr::DrugId& drug) {
    p.prescriptions[age].insert(drug);
}

// Three-patient cohort behind the worked examples: two drugs, one of them
// prescribed across two widely separated eras.
inline adr::Cohort sample_cohort() {
    adr::Cohort c;

    adr::PatientRecord jj3 = make_patient("jj3");
    add_rx(jj3, 10000, "979596759");
    add_rx(jj3, 20000, "969686881");
    add_rx(jj3, 20001, "969686881");
    add_rx(jj3, 20001, "912314611");
    add_event(jj3, 9999, "A123.");
    add_event(jj3, 10000, "F1...");
    add_event(jj3, 10000, "C1...");
    add_event(jj3, 10001, "A123.");
    add_event(jj3, 10013, "D25..");
    add_event(jj3, 18020, "C12..");
    add_event(jj3, 20001, "C121.");

    adr::PatientRecord aa2 = make_patient("aa2");
    add_rx(aa2, 15001, "912314611");
    add_rx(aa2, 15031, "912314611");
    add_rx(aa2, 15061, "912314611");
    add_rx(aa2, 25304, "912314611");
    add_event(aa2, 15001, "B21..");

    adr::PatientRecord bb8 = make_patient("bb8");
    add_rx(bb8, 10000, "979596759");
    add_event(bb8, 9078, "A123.");
    add_event(bb8, 10000, "F12..");
    add_event(bb8, 10000, "A123.");
    add_event(bb8, 10010, "D25..");
    add_event(bb8, 27002, "C11..");

    c.patients = {std::move(jj3), std::move(aa2), std::move(bb8)};
    return c;
}

inline void put_code(adr::CodeTree& tree, const adr::CodeId& code, std::string description) {
    adr::CodeTree::Node node;
    node.description = std::move(description);
    node.level = adr::code_level(code);
    if (node.level > 1) node.parent = adr::code_parent(code);
    tree.nodes[code] = std::move(node);
}

// Adds the code and any missing ancestors so the tree stays orphan-free.
inline void put_code_chain(adr::CodeTree& tree, const adr::CodeId& code,
                           const std::string& description) {
    put_code(tree, code, description);
    adr::CodeId parent = adr::code_parent(code);
    while (!parent.empty() && !tree.contains(parent)) {
        put_code(tree, parent, "category " + parent);
        parent = adr::code_parent(parent);
    }
}

inline adr::CodeTree sample_tree() {
    adr::CodeTree tree;
    for (const char* code : {"A123.", "B21..", "C1...", "C11..", "C12..", "C121.",
                             "D25..", "F1...", "F12.."}) {
        put_code_chain(tree, code, "sample code");
    }
    return tree;
}

// Randomized cohort with repeated prescriptions (multiple exposure eras) and
// events spread over a few thousand days; registration age 0 throughout.
inline adr::Cohort random_cohort(std::uint64_t seed, int n_patients = 60) {
    static const std::vector<adr::CodeId> kCodes = {
        "A123.", "A124.", "A12..", "A1...", "B21..", "C1...",
        "C12..", "D25..", "F1...", "H0a..", "Z9z..", "Z9y..",
    };
    static const std::vector<adr::DrugId> kDrugs = {"900000001", "900000002", "900000003"};

    adr::Rng rng(seed);
    adr::Cohort c;
    for (int i = 0; i < n_patients; ++i) {
        adr::PatientRecord p = make_patient("r" + std::to_string(1000 + i));
        const int n_events = static_cast<int>(rng.uniform_int(0, 14));
        for (int j = 0; j < n_events; ++j) {
            const adr::AgeDay age = static_cast<adr::AgeDay>(rng.uniform_int(0, 4200));
            p.events[age].insert(kCodes[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(kCodes.size()) - 1))]);
        }
        const int n_rx = static_cast<int>(rng.uniform_int(0, 6));
        for (int j = 0; j < n_rx; ++j) {
            const adr::AgeDay age = static_cast<adr::AgeDay>(rng.uniform_int(0, 4200));
            p.prescriptions[age].insert(kDrugs[static_cast<std::size_t>(
                rng.uniform_int(0, static_cast<std::int64_t>(kDrugs.size()) - 1))]);
        }
        c.patients.push_back(std::move(p));
    }
    return c;
}

inline bool patients_equal(const adr::PatientRecord& a, const adr::PatientRecord& b) {
    return a.patient_id == b.patient_id && a.registration_age == b.registration_age &&
           a.events == b.events && a.prescriptions == b.prescriptions;
}

inline bool cohorts_equal(const adr::Cohort& a, const adr::Cohort& b) {
    if (a.patients.size() != b.patients.size()) return false;
    for (std::size_t i = 0; i < a.patients.size(); ++i) {
        if (!patients_equal(a.patients[i], b.patients[i])) return false;
    }
    return true;
}

// Scratch directory removed on destruction.
struct TempDir {
    std::filesystem::path path;

    explicit TempDir(const std::string& tag) {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("adr-test-" + tag + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }

    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }

    std::string file(const std::string& name) const { return (path / name).string(); }
};

inline std::string write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
    return path;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

}  // namespace testsupport
