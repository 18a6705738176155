#include "sectorflow/csv.hpp"

#include <cstdio>
#include <sstream>

#include "sectorflow/errors.hpp"

namespace sectorflow {

CsvWriter::CsvWriter(const std::string& path, const std::string& schema) : out_(path) {
    if (!out_) throw config_error("cannot open output file: " + path);
    out_ << "# schema=" << schema << "\n";
}

void CsvWriter::comment(const std::string& text) { out_ << "# " << text << "\n"; }

void CsvWriter::header(const std::vector<std::string>& names) {
    for (std::size_t i = 0; i < names.size(); ++i) out_ << (i ? "," : "") << names[i];
    out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format(values[i]);
    out_ << "\n";
}

void CsvWriter::raw_row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out_ << (i ? "," : "") << fields[i];
    out_ << "\n";
}

std::string CsvWriter::format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

int CsvTable::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
        if (header[i] == name) return static_cast<int>(i);
    return -1;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open CSV file: " + path);
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!line.empty() && line.back() == ',') fields.push_back("");
        if (!have_header) {
            t.header = std::move(fields);
            have_header = true;
        } else {
            t.rows.push_back(std::move(fields));
        }
    }
    if (!have_header) throw config_error("CSV file has no header row: " + path);
    return t;
}

} // namespace sectorflow
