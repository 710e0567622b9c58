#include "adr/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "adr/errors.hpp"

namespace adr {
namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
}

[[noreturn]] void row_error(const std::string& path, int line_no, const std::string& why) {
    throw InputError(path + ":" + std::to_string(line_no) + ": " + why);
}

AgeDay parse_age(const std::string& text, const std::string& path, int line_no) {
    const std::string t = trim(text);
    AgeDay value = 0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        row_error(path, line_no, "non-integer age '" + t + "'");
    }
    if (value < 0) row_error(path, line_no, "negative age '" + t + "'");
    return value;
}

std::ifstream open_or_throw(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    return in;
}

void expect_header(std::ifstream& in, const std::string& path, const std::string& header) {
    std::string line;
    if (!std::getline(in, line) || trim(line) != header) {
        throw InputError(path + ":1: expected header '" + header + "'");
    }
}

}  // namespace

Cohort load_cohort(const std::string& patients_path, const std::string& medical_path,
                   const std::string& therapy_path) {
    Cohort cohort;
    std::unordered_map<std::string, std::size_t> index;

    {
        std::ifstream in = open_or_throw(patients_path);
        expect_header(in, patients_path, "patid,registration_age");
        std::string line;
        int line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            const auto fields = split_csv(line);
            if (fields.size() != 2) row_error(patients_path, line_no, "expected 2 columns");
            const std::string id = trim(fields[0]);
            if (id.empty()) row_error(patients_path, line_no, "empty patient id");
            if (index.count(id)) row_error(patients_path, line_no, "duplicate patient '" + id + "'");
            PatientRecord patient;
            patient.patient_id = id;
            patient.registration_age = parse_age(fields[1], patients_path, line_no);
            index[id] = cohort.patients.size();
            cohort.patients.push_back(std::move(patient));
        }
    }

    {
        std::ifstream in = open_or_throw(medical_path);
        expect_header(in, medical_path, "patid,age,code");
        std::string line;
        int line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            const auto fields = split_csv(line);
            if (fields.size() != 3) row_error(medical_path, line_no, "expected 3 columns");
            const std::string id = trim(fields[0]);
            const auto it = index.find(id);
            if (it == index.end()) row_error(medical_path, line_no, "unknown patient '" + id + "'");
            const AgeDay age = parse_age(fields[1], medical_path, line_no);
            const std::string code = trim(fields[2]);
            if (!is_valid_code(code)) row_error(medical_path, line_no, "bad code '" + code + "'");
            cohort.patients[it->second].events[age].insert(code);
        }
    }

    {
        std::ifstream in = open_or_throw(therapy_path);
        expect_header(in, therapy_path, "patid,age,drugcode");
        std::string line;
        int line_no = 1;
        while (std::getline(in, line)) {
            ++line_no;
            if (trim(line).empty()) continue;
            const auto fields = split_csv(line);
            if (fields.size() != 3) row_error(therapy_path, line_no, "expected 3 columns");
            const std::string id = trim(fields[0]);
            const auto it = index.find(id);
            if (it == index.end()) row_error(therapy_path, line_no, "unknown patient '" + id + "'");
            const AgeDay age = parse_age(fields[1], therapy_path, line_no);
            const std::string drug = trim(fields[2]);
            if (!is_valid_drug(drug)) row_error(therapy_path, line_no, "bad drugcode '" + drug + "'");
            cohort.patients[it->second].prescriptions[age].insert(drug);
        }
    }

    return cohort;
}

void write_cohort(const Cohort& cohort, const std::string& dir) {
    std::vector<const PatientRecord*> ordered;
    ordered.reserve(cohort.patients.size());
    for (const auto& p : cohort.patients) ordered.push_back(&p);
    std::sort(ordered.begin(), ordered.end(),
              [](const PatientRecord* a, const PatientRecord* b) {
                  return a->patient_id < b->patient_id;
              });

    std::ofstream patients(dir + "/patients.csv");
    std::ofstream medical(dir + "/medical.csv");
    std::ofstream therapy(dir + "/therapy.csv");
    if (!patients || !medical || !therapy) throw InputError("cannot write cohort files in " + dir);

    patients << "patid,registration_age\n";
    medical << "patid,age,code\n";
    therapy << "patid,age,drugcode\n";
    for (const PatientRecord* p : ordered) {
        patients << p->patient_id << ',' << p->registration_age << '\n';
        for (const auto& [age, codes] : p->events) {
            for (const CodeId& code : codes) {
                medical << p->patient_id << ',' << age << ',' << code << '\n';
            }
        }
        for (const auto& [age, drugs] : p->prescriptions) {
            for (const DrugId& drug : drugs) {
                therapy << p->patient_id << ',' << age << ',' << drug << '\n';
            }
        }
    }
}

CodeTree load_code_tree(const std::string& codes_path) {
    std::ifstream in = open_or_throw(codes_path);
    expect_header(in, codes_path, "code,description");
    CodeTree tree;
    std::string line;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) row_error(codes_path, line_no, "expected 2 columns");
        const std::string code = trim(line.substr(0, comma));
        const std::string description = trim(line.substr(comma + 1));
        const int level = code_level(code);
        if (level == 0) row_error(codes_path, line_no, "bad code '" + code + "'");
        if (tree.nodes.count(code)) row_error(codes_path, line_no, "duplicate code '" + code + "'");
        CodeTree::Node node;
        node.description = description;
        node.level = level;
        if (level > 1) node.parent = code_parent(code);
        tree.nodes[code] = std::move(node);
    }
    for (const auto& [code, node] : tree.nodes) {
        if (node.parent && !tree.nodes.count(*node.parent)) {
            throw InputError(codes_path + ": orphan code '" + code + "' (parent '" +
                             *node.parent + "' not listed)");
        }
    }
    return tree;
}

void write_code_tree(const CodeTree& tree, const std::string& codes_path) {
    std::ofstream out(codes_path);
    if (!out) throw InputError("cannot write " + codes_path);
    out << "code,description\n";
    for (const auto& [code, node] : tree.nodes) {
        out << code << ',' << node.description << '\n';
    }
}

TermList load_term_list(const std::string& path, TermList::Kind kind) {
    std::ifstream in = open_or_throw(path);
    TermList list;
    list.kind = kind;
    std::set<std::string> seen;
    std::string line;
    while (std::getline(in, line)) {
        std::string term = trim(line);
        if (term.empty()) continue;
        std::transform(term.begin(), term.end(), term.begin(),
                       [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
        if (seen.insert(term).second) list.terms.push_back(term);
    }
    return list;
}

std::vector<std::string> load_prefix_list(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    std::vector<std::string> prefixes;
    std::set<std::string> seen;
    std::string line;
    while (std::getline(in, line)) {
        const std::string prefix = trim(line);
        if (prefix.empty()) continue;
        if (seen.insert(prefix).second) prefixes.push_back(prefix);
    }
    return prefixes;
}

}  // namespace adr
