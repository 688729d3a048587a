#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lyricgenre/eval.hpp"

namespace lyricgenre {

struct MatrixCell {
  double mean = 0.0;
  /// sample standard deviation of the genre-level means
  double std = 0.0;
  std::size_t genres = 0;

  double two_sigma() const { return 2.0 * std; }
};

/// Train-language rows by test-language columns for one (representation,
/// centralized) combination. Cells for pairs that were not run are empty.
struct ResultMatrix {
  Representation representation = Representation::embedding;
  bool centralized = false;
  std::vector<std::string> train_languages;
  std::vector<std::string> test_languages;
  std::vector<std::vector<std::optional<MatrixCell>>> cells;

  const std::optional<MatrixCell>& at(const std::string& train, const std::string& test) const;
};

/// Every result must share representation and centralized flag. Each cell
/// averages genre-level means; a cell missing any genre seen in the input is
/// an error that names the missing genres.
ResultMatrix aggregate_matrix(std::span<const BootstrapResult> results);
/// Groups by (representation, centralized) first.
std::vector<ResultMatrix> aggregate_matrices(std::span<const BootstrapResult> results);

enum class ReportFormat { markdown, csv };
ReportFormat parse_report_format(std::string_view s);

/// "m.mm ± s.ss" with s = 2 sigma.
std::string format_cell(const MatrixCell& cell);
std::string render_report(const ResultMatrix& matrix, ReportFormat format);
std::string render_reports(std::span<const ResultMatrix> matrices, ReportFormat format);
/// Inverse of the csv rendering (values to two decimals).
std::vector<ResultMatrix> parse_report_csv(std::istream& in);

/// One row per repeat: genre,train_language,test_language,representation,centralized,repeat,f1
void write_results_csv(std::ostream& out, std::span<const BootstrapResult> results);
/// One row per spec with mean, std and two_sigma.
void write_aggregated_csv(std::ostream& out, std::span<const BootstrapResult> results);
std::vector<BootstrapResult> read_results_csv(std::istream& in);
std::vector<BootstrapResult> read_results_csv(const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace lyricgenre
