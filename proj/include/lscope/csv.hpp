#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "lscope/errors.hpp"

namespace lscope {

// Deterministic CSV emitter: fixed %.9g formatting, one unit-comment line,
// then the header. Bodies depend only on the written values, never on the
// worker schedule that produced them.
class CsvWriter {
  public:
    CsvWriter(const std::string& path, const std::string& units_comment,
              const std::vector<std::string>& columns)
        : out_(path) {
        if (!out_) throw ConfigError("cannot open CSV output file: " + path);
        out_ << "# " << units_comment << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i)
            out_ << columns[i] << (i + 1 == columns.size() ? "\n" : ",");
    }

    void row(const std::vector<double>& values) {
        char buf[64];
        for (std::size_t i = 0; i < values.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.9g", values[i]);
            out_ << buf << (i + 1 == values.size() ? "\n" : ",");
        }
    }

  private:
    std::ofstream out_;
};

}  // namespace lscope
