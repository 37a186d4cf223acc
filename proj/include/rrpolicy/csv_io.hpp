#pragma once

#include <string>
#include <vector>

#include "rrpolicy/types.hpp"

namespace rrpolicy {

// Column-role sidecar; binding by name avoids silent misassignment of the
// treatment or outcome columns.
struct CsvSchema {
    std::vector<std::string> covariates;
    std::string treatment;
    std::vector<std::string> outcomes;
};

CsvSchema load_schema(const std::string& path);
void save_schema(const CsvSchema& schema, const std::string& path);

// Header row required; all numerics parsed as 64-bit floats; missing or
// non-numeric cells are rejected (no imputation).
Dataset load_dataset_csv(const std::string& data_path, const CsvSchema& schema);

void write_dataset_csv(const Dataset& data, const std::string& data_path,
                       const CsvSchema& schema);

// Default column names x0..x{p-1}, t, y0..y{k-1}.
CsvSchema default_schema(int p, int k);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace rrpolicy
