#pragma once

#include "kanbayes/besov.hpp"
#include "kanbayes/inference.hpp"
#include "kanbayes/kan.hpp"

#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace kanbayes {

// Malformed input files; the message names the offending line.
class DataError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Numeric table with a header row; values are written with 17 significant digits so a
// write/read cycle reproduces them exactly.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

void write_csv(std::ostream& os, const Table& t);
Table read_csv(std::istream& is);
Table read_csv_file(const std::string& path);
void write_csv_file(const std::string& path, const Table& t);

// Header x1,...,xd,y; every x must lie in [0,1].
RegressionDataset read_dataset(const std::string& path);
RegressionDataset dataset_from_table(const Table& t);
Table dataset_to_table(const RegressionDataset& data);

RegressionDataset simulate_dataset(const ScalarField& f0, int d, std::size_t n, double sigma0, Design design,
                                   std::mt19937_64& rng);

}  // namespace kanbayes
