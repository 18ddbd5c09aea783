#pragma once

// Numeric CSV input: one observation per row, one feature per column. A first
// row that does not parse as numbers is treated as a header and skipped.

#include "mdqda/linalg.hpp"

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

namespace mdqda {

struct NumericTable {
    std::vector<std::string> header;  // empty when the file had none
    std::size_t cols = 0;
    std::vector<std::vector<double>> rows;
};

// Throws ValidationError("<source>:<line>: ...") on ragged or unparsable rows.
NumericTable read_numeric_csv(std::istream& in, const std::string& source);
NumericTable read_numeric_csv(const std::filesystem::path& path);

// Rows become the columns of the returned p x n data matrix.
DataMatrix to_data_matrix(const NumericTable& table);
// Table read as a plain matrix (row i -> row i).
Matrix to_matrix(const NumericTable& table);

}  // namespace mdqda
