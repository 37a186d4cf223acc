#include "rrpolicy/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "rrpolicy/errors.hpp"
#include "rrpolicy/simulation.hpp"

namespace rrpolicy {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_cell(const std::string& cell, int line_no, const std::string& col) {
    if (cell.empty()) {
        throw ValidationError("missing value in column '" + col + "' at line " +
                              std::to_string(line_no));
    }
    double value = 0.0;
    const char* begin = cell.data();
    const char* end = begin + cell.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
        throw ValidationError("cannot parse '" + cell + "' in column '" + col + "' at line " +
                              std::to_string(line_no));
    }
    return value;
}

}  // namespace

CsvSchema load_schema(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("schema parse failure: " + std::string(e.what()));
    }
    CsvSchema schema;
    try {
        schema.covariates = j.at("covariates").get<std::vector<std::string>>();
        schema.treatment = j.at("treatment").get<std::string>();
        schema.outcomes = j.at("outcomes").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError("schema missing required keys: " + std::string(e.what()));
    }
    if (schema.covariates.empty() || schema.outcomes.empty()) {
        throw ValidationError("schema must name at least one covariate and one outcome column");
    }
    return schema;
}

void save_schema(const CsvSchema& schema, const std::string& path) {
    nlohmann::json j;
    j["covariates"] = schema.covariates;
    j["treatment"] = schema.treatment;
    j["outcomes"] = schema.outcomes;
    write_text_file(path, j.dump(2) + "\n");
}

Dataset load_dataset_csv(const std::string& data_path, const CsvSchema& schema) {
    std::ifstream in(data_path);
    if (!in) throw ValidationError("cannot open data file '" + data_path + "'");

    std::string line;
    if (!std::getline(in, line)) throw ValidationError("data file is empty");
    const std::vector<std::string> header = split_line(line);
    std::unordered_map<std::string, int> index;
    for (std::size_t i = 0; i < header.size(); ++i) index[header[i]] = static_cast<int>(i);

    auto column_of = [&](const std::string& name) {
        auto it = index.find(name);
        if (it == index.end()) {
            throw ValidationError("schema column '" + name + "' not present in the CSV header");
        }
        return it->second;
    };
    std::vector<int> x_cols, y_cols;
    for (const auto& name : schema.covariates) x_cols.push_back(column_of(name));
    for (const auto& name : schema.outcomes) y_cols.push_back(column_of(name));
    const int t_col = column_of(schema.treatment);

    std::vector<std::vector<double>> x_rows, y_rows;
    std::vector<int> t_rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_line(line);
        if (cells.size() != header.size()) {
            throw ValidationError("line " + std::to_string(line_no) + " has " +
                                  std::to_string(cells.size()) + " cells, header has " +
                                  std::to_string(header.size()));
        }
        std::vector<double> xr, yr;
        for (std::size_t j = 0; j < x_cols.size(); ++j) {
            xr.push_back(parse_cell(cells[x_cols[j]], line_no, schema.covariates[j]));
        }
        for (std::size_t j = 0; j < y_cols.size(); ++j) {
            yr.push_back(parse_cell(cells[y_cols[j]], line_no, schema.outcomes[j]));
        }
        const double t = parse_cell(cells[t_col], line_no, schema.treatment);
        if (t != 0.0 && t != 1.0) {
            throw ValidationError("treatment must be 0 or 1 at line " + std::to_string(line_no));
        }
        x_rows.push_back(std::move(xr));
        y_rows.push_back(std::move(yr));
        t_rows.push_back(static_cast<int>(t));
    }
    if (x_rows.empty()) throw ValidationError("data file has no rows");

    Dataset data;
    const int n = static_cast<int>(x_rows.size());
    data.covariates.resize(n, static_cast<int>(x_cols.size()));
    data.outcomes.resize(n, static_cast<int>(y_cols.size()));
    data.treatments.resize(n);
    for (int i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < x_cols.size(); ++j) data.covariates(i, j) = x_rows[i][j];
        for (std::size_t j = 0; j < y_cols.size(); ++j) data.outcomes(i, j) = y_rows[i][j];
        data.treatments(i) = t_rows[i];
    }
    data.validate();
    return data;
}

void write_dataset_csv(const Dataset& data, const std::string& data_path,
                       const CsvSchema& schema) {
    if (static_cast<int>(schema.covariates.size()) != data.p() ||
        static_cast<int>(schema.outcomes.size()) != data.k()) {
        throw DimensionMismatch("schema column counts do not match the dataset");
    }
    std::ostringstream out;
    for (const auto& name : schema.covariates) out << name << ',';
    out << schema.treatment;
    for (const auto& name : schema.outcomes) out << ',' << name;
    out << '\n';
    for (int i = 0; i < data.n(); ++i) {
        for (int j = 0; j < data.p(); ++j) out << format_double(data.covariates(i, j)) << ',';
        out << data.treatments(i);
        for (int j = 0; j < data.k(); ++j) out << ',' << format_double(data.outcomes(i, j));
        out << '\n';
    }
    write_text_file(data_path, out.str());
}

CsvSchema default_schema(int p, int k) {
    CsvSchema schema;
    for (int j = 0; j < p; ++j) schema.covariates.push_back("x" + std::to_string(j));
    schema.treatment = "t";
    for (int j = 0; j < k; ++j) schema.outcomes.push_back("y" + std::to_string(j));
    return schema;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw Error("failed writing '" + path + "'");
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace rrpolicy
