#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace mspde {

/// Fixed 17-significant-digit decimal rendering so artifacts diff cleanly
/// across runs.
inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.16e", x);
    return buf;
}

/// Minimal CSV writer: header row plus rows of pre-rendered cells.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path) {}

    bool good() const { return out_.good(); }

    /// Provenance line ("# key=value ..."), written before the header.
    void comment(const std::string& text) { out_ << "# " << text << '\n'; }

    void header(const std::vector<std::string>& names) { write_row(names); }

    void row(const std::vector<std::string>& cells) { write_row(cells); }

private:
    void write_row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            write_cell(cells[i]);
        }
        out_ << '\n';
    }

    void write_cell(const std::string& cell) {
        if (cell.find_first_of(",\"\n") == std::string::npos) {
            out_ << cell;
            return;
        }
        out_ << '"';
        for (char c : cell) {
            if (c == '"') out_ << '"';
            out_ << c;
        }
        out_ << '"';
    }

    std::ofstream out_;
};

} // namespace mspde
