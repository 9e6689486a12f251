// csv.hpp — deterministic CSV serialization: 17 significant digits, LF line
// endings, trailing newline.

#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "ringdefect/errors.hpp"

namespace ringdefect {

inline std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return std::string(buf);
}

class CsvWriter {
  public:
    explicit CsvWriter(std::string header) { out_ = std::move(header) + "\n"; }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t m = 0; m < fields.size(); ++m) {
            if (m) out_ += ',';
            out_ += fields[m];
        }
        out_ += '\n';
    }

    const std::string& text() const { return out_; }

    void write(const std::string& path) const {
        std::ofstream f(path, std::ios::binary);
        if (!f) throw io_error("cannot open " + path + " for writing");
        f << out_;
        if (!f) throw io_error("write failed for " + path);
    }

  private:
    std::string out_;
};

}  // namespace ringdefect
