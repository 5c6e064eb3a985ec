#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace bpdl::cli {

using Json = nlohmann::ordered_json;

/// 17 significant digits; "nan", "inf" and "-inf" for non-finite values.
std::string format_number(double x);

/// JSON text with every floating-point number written with 17 significant
/// digits and non-finite numbers written as the string "NA".
std::string dump_json(const Json& j, int indent = 2);

std::string sha256_hex(const std::string& bytes);

/// One column of a whitespace-separated data file.
struct Column {
  std::string name;
  std::vector<double> values;
};

/// An output directory that remembers every file written through it.
class OutputDir {
 public:
  explicit OutputDir(std::filesystem::path root);

  const std::filesystem::path& root() const { return root_; }
  const std::vector<std::string>& files() const { return files_; }

  void write_text(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const Json& j);
  /// '#'-prefixed header line, then one row per index; columns must have
  /// equal length.
  void write_table(const std::string& name, const std::vector<Column>& columns);

 private:
  std::filesystem::path root_;
  std::vector<std::string> files_;
};

/// A gnuplot script drawing one panel per plot spec.
struct PlotSpec {
  std::string title;
  std::string file;
  std::string xlabel;
  std::string ylabel;
  /// gnuplot `using` clauses with their legend titles, e.g. {"1:2", "mean"}.
  std::vector<std::pair<std::string, std::string>> series;
  /// Optional horizontal reference line.
  std::optional<double> reference;
  bool error_bars = false;  // first series drawn with yerrorbars (x:y:err)
};

std::string gnuplot_script(const std::string& output_png, const std::vector<PlotSpec>& plots);

}  // namespace bpdl::cli
