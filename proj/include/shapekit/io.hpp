#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace shapekit {

// Shortest decimal form that round-trips a double (up to 17 significant
// digits); used for every numeric value we serialize.
std::string fmt17(double v);

struct CsvTable {
  std::vector<std::string> header;
  Eigen::MatrixXd values;  // rows x header.size()

  long column(const std::string& name) const;  // -1 if absent
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const Eigen::MatrixXd& values);

// Flat "key = value" config text; '#' starts a comment, blank lines are
// skipped, keys must be unique.
std::map<std::string, std::string> parse_config_file(const std::string& path);
std::map<std::string, std::string> parse_config_text(const std::string& text);

std::vector<std::string> split_list(const std::string& text);  // comma-separated
double parse_double(const std::string& text, const std::string& what);
long parse_long(const std::string& text, const std::string& what);

}  // namespace shapekit
