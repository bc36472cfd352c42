#pragma once

// CSV and flat-config I/O.
//
// Every CSV written by this library starts with a schema line
//
//   # schema <name> v1
//
// followed by optional '# key=value' metadata lines, a header row, and
// numeric rows formatted with %.17g (lossless double round trip).
//
// Config files are flat key = value text: '#' starts a comment, blank lines
// are ignored, values may be bare tokens or double-quoted strings.

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace slepvolt {

struct CsvTable {
  std::string schema;
  std::map<std::string, std::string> metadata;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  void add_row(std::initializer_list<double> values);
};

std::string format_g17(double v);

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

double metadata_number(const CsvTable& table, const std::string& key);
std::string metadata_string(const CsvTable& table, const std::string& key);

// One column of a table by name; throws if absent.
std::vector<double> column(const CsvTable& table, const std::string& name);

using FlatConfig = std::map<std::string, std::string>;

FlatConfig parse_flat_config(const std::string& path);
FlatConfig parse_flat_config_text(const std::string& text);

double config_number(const FlatConfig& cfg, const std::string& key, double fallback);
long long config_integer(const FlatConfig& cfg, const std::string& key, long long fallback);
std::string config_string(const FlatConfig& cfg, const std::string& key,
                          const std::string& fallback);
bool config_flag(const FlatConfig& cfg, const std::string& key, bool fallback);
// Comma-separated list of numbers.
std::vector<double> config_number_list(const FlatConfig& cfg, const std::string& key,
                                       const std::vector<double>& fallback);

}  // namespace slepvolt
