#include "fsiwave/io.hpp"

#include <cstdio>
#include <sstream>

#include "fsiwave/error.hpp"

namespace fsiwave {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path,
                     const std::vector<std::string>& header)
    : csv_(path), columns_(header.size()) {
    if (!csv_) throw Error("CsvWriter: cannot open " + path);
    std::string dat_path = path;
    if (dat_path.size() > 4 && dat_path.substr(dat_path.size() - 4) == ".csv")
        dat_path = dat_path.substr(0, dat_path.size() - 4);
    dat_path += ".dat";
    dat_.open(dat_path);
    for (std::size_t i = 0; i < header.size(); ++i)
        csv_ << (i ? "," : "") << header[i];
    csv_ << "\n";
    dat_ << "#";
    for (const auto& h : header) dat_ << " " << h;
    dat_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    if (values.size() != columns_)
        throw Error("CsvWriter: wrong number of columns");
    for (std::size_t i = 0; i < values.size(); ++i) {
        const std::string s = format_double(values[i]);
        csv_ << (i ? "," : "") << s;
        dat_ << (i ? " " : "") << s;
    }
    csv_ << "\n";
    dat_ << "\n";
}

std::vector<std::vector<double>> read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw MissingArtifacts("read_csv: cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> vals;
        while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
        rows.push_back(std::move(vals));
    }
    return rows;
}

}  // namespace fsiwave
