#pragma once

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace multidraw {

// Deterministic number formatting: shortest round-trip representation via
// %.17g, trimmed. Identical inputs give byte-identical CSV output.
inline std::string format_double(double x) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, x);
        double back = 0.0;
        std::sscanf(buf, "%lf", &back);
        if (back == x) return buf;
    }
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// RFC-4180-style writer: comma separated, header row mandatory, '.' decimal
// separator, fields quoted only when they contain a comma, quote or newline.
class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open output file: " + path);
    }

    void header(const std::vector<std::string>& names) { row_strings(names); }

    void row_strings(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i > 0) out_ << ',';
            out_ << quoted_(fields[i]);
        }
        out_ << "\r\n";
        if (!out_) throw std::runtime_error("CSV write failed");
    }

  private:
    static std::string quoted_(const std::string& field) {
        if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
        std::string q = "\"";
        for (char c : field) {
            if (c == '"') q += '"';
            q += c;
        }
        q += '"';
        return q;
    }

    std::ofstream out_;
};

}  // namespace multidraw
