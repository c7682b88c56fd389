#include "kanbayes/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace kanbayes {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string format(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void write_csv(std::ostream& os, const Table& t) {
    for (std::size_t i = 0; i < t.header.size(); ++i) os << (i ? "," : "") << t.header[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format(row[i]);
        os << '\n';
    }
}

Table read_csv(std::istream& is) {
    Table t;
    std::string line;
    int lineno = 0;
    bool have_header = false;
    while (std::getline(is, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        auto cells = split(line);
        if (!have_header) {
            t.header = cells;
            have_header = true;
            continue;
        }
        if (cells.size() != t.header.size())
            throw DataError("line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                            " fields, found " + std::to_string(cells.size()));
        std::vector<double> row;
        for (const auto& c : cells) {
            double v = 0.0;
            const char* end = c.data() + c.size();
            const auto res = std::from_chars(c.data(), end, v);
            if (c.empty() || res.ec != std::errc() || res.ptr != end)
                throw DataError("line " + std::to_string(lineno) + ": '" + c + "' is not a decimal number");
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    if (!have_header) throw DataError("line 1: missing header");
    return t;
}

Table read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open '" + path + "'");
    return read_csv(in);
}

void write_csv_file(const std::string& path, const Table& t) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    write_csv(out, t);
}

RegressionDataset dataset_from_table(const Table& t) {
    const std::size_t cols = t.header.size();
    if (cols < 2 || t.header.back() != "y") throw DataError("line 1: header must be x1,...,xd,y");
    for (std::size_t i = 0; i + 1 < cols; ++i)
        if (t.header[i] != "x" + std::to_string(i + 1))
            throw DataError("line 1: column " + std::to_string(i + 1) + " must be named x" + std::to_string(i + 1));
    RegressionDataset data;
    data.d = static_cast<int>(cols - 1);
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        for (std::size_t i = 0; i + 1 < cols; ++i) {
            const double x = t.rows[r][i];
            if (!(x >= 0.0 && x <= 1.0))
                throw DataError("line " + std::to_string(r + 2) + ": x" + std::to_string(i + 1) +
                                " = " + format(x) + " lies outside [0,1]");
            data.X.push_back(x);
        }
        if (!std::isfinite(t.rows[r].back())) throw DataError("line " + std::to_string(r + 2) + ": y is not finite");
        data.y.push_back(t.rows[r].back());
    }
    return data;
}

RegressionDataset read_dataset(const std::string& path) { return dataset_from_table(read_csv_file(path)); }

Table dataset_to_table(const RegressionDataset& data) {
    Table t;
    for (int i = 0; i < data.d; ++i) t.header.push_back("x" + std::to_string(i + 1));
    t.header.push_back("y");
    for (std::size_t r = 0; r < data.n(); ++r) {
        std::vector<double> row(data.row(r), data.row(r) + data.d);
        row.push_back(data.y[r]);
        t.rows.push_back(std::move(row));
    }
    return t;
}

RegressionDataset simulate_dataset(const ScalarField& f0, int d, std::size_t n, double sigma0, Design design,
                                   std::mt19937_64& rng) {
    if (sigma0 < 0) throw std::invalid_argument("noise level must be >= 0");
    RegressionDataset data;
    data.d = d;
    data.X = sample_design(n, d, design, rng);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) data.y.push_back(f0(data.row(i)) + sigma0 * noise(rng));
    return data;
}

}  // namespace kanbayes
