#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace sectorflow {

// Minimal CSV I/O used by the CLI and the calibration module. Writers emit
// full double precision (17 significant digits); readers skip '#' comment
// lines. The first comment line of every artifact carries the schema tag.
class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::string& schema);

    void comment(const std::string& text);
    void header(const std::vector<std::string>& names);
    void row(const std::vector<double>& values);
    void raw_row(const std::vector<std::string>& fields);

    static std::string format(double v);

private:
    std::ofstream out_;
};

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column(const std::string& name) const; // -1 if absent
};

CsvTable read_csv(const std::string& path);

} // namespace sectorflow
