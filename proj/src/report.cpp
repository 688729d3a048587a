#include "lyricgenre/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "lyricgenre/csv.hpp"
#include "lyricgenre/error.hpp"

namespace lyricgenre {

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  // "-0.00" reads oddly in a table
  if (std::string_view(buf) == "-0.00") return "0.00";
  return buf;
}

double parse_double(const std::string& s, const char* what) {
  double v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) throw DataError(std::string("bad ") + what + " value '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw DataError("bad boolean '" + s + "'");
}

std::vector<std::string> sorted_tags(const std::set<std::string>& tags) {
  std::vector<std::string> v(tags.begin(), tags.end());
  std::sort(v.begin(), v.end(), variant_tag_less);
  return v;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

const std::optional<MatrixCell>& ResultMatrix::at(const std::string& train, const std::string& test) const {
  const auto r = std::find(train_languages.begin(), train_languages.end(), train);
  const auto c = std::find(test_languages.begin(), test_languages.end(), test);
  if (r == train_languages.end() || c == test_languages.end()) {
    throw UsageError("no cell for train=" + train + " test=" + test);
  }
  return cells[r - train_languages.begin()][c - test_languages.begin()];
}

ResultMatrix aggregate_matrix(std::span<const BootstrapResult> results) {
  if (results.empty()) throw DataError("no results to aggregate");
  ResultMatrix m;
  m.representation = results.front().spec.representation;
  m.centralized = results.front().spec.centralized;

  std::set<std::string> genres, trains, tests;
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> by_cell;
  for (const auto& r : results) {
    if (r.spec.representation != m.representation || r.spec.centralized != m.centralized) {
      throw DataError("aggregate_matrix expects a single representation/centralization combination");
    }
    genres.insert(r.spec.genre);
    trains.insert(r.spec.train_language);
    tests.insert(r.spec.test_language);
    auto& cell = by_cell[{r.spec.train_language, r.spec.test_language}];
    if (!cell.emplace(r.spec.genre, r.mean).second) {
      throw DataError("duplicate result for genre '" + r.spec.genre + "' train=" + r.spec.train_language +
                      " test=" + r.spec.test_language);
    }
  }
  m.train_languages = sorted_tags(trains);
  m.test_languages = sorted_tags(tests);
  m.cells.assign(m.train_languages.size(), std::vector<std::optional<MatrixCell>>(m.test_languages.size()));
  for (std::size_t i = 0; i < m.train_languages.size(); ++i) {
    for (std::size_t j = 0; j < m.test_languages.size(); ++j) {
      const auto it = by_cell.find({m.train_languages[i], m.test_languages[j]});
      if (it == by_cell.end()) continue;
      std::vector<std::string> missing;
      std::vector<double> means;
      for (const auto& g : genres) {
        const auto gi = it->second.find(g);
        if (gi == it->second.end()) {
          missing.push_back(g);
        } else {
          means.push_back(gi->second);
        }
      }
      if (!missing.empty()) {
        std::string list;
        for (const auto& g : missing) list += (list.empty() ? "" : ", ") + g;
        throw DataError("incomplete cell train=" + m.train_languages[i] + " test=" + m.test_languages[j] +
                        ": missing genres " + list);
      }
      const auto s = summarize(means);
      m.cells[i][j] = MatrixCell{s.mean, s.std, means.size()};
    }
  }
  return m;
}

std::vector<ResultMatrix> aggregate_matrices(std::span<const BootstrapResult> results) {
  std::map<std::pair<int, bool>, std::vector<BootstrapResult>> groups;
  for (const auto& r : results) {
    groups[{static_cast<int>(r.spec.representation), r.spec.centralized}].push_back(r);
  }
  std::vector<ResultMatrix> out;
  for (const auto& [key, group] : groups) out.push_back(aggregate_matrix(group));
  return out;
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "markdown" || s == "md") return ReportFormat::markdown;
  if (s == "csv") return ReportFormat::csv;
  throw UsageError("report format must be 'markdown' or 'csv', got '" + std::string(s) + "'");
}

std::string format_cell(const MatrixCell& cell) {
  return fixed2(cell.mean) + " \xC2\xB1 " + fixed2(cell.two_sigma());
}

namespace {

std::string matrix_title(const ResultMatrix& m) {
  if (m.representation == Representation::bow) return "Bag-of-words (TF-IDF)";
  return m.centralized ? "Sentence embeddings, centralized" : "Sentence embeddings, uncentralized";
}

void render_csv_rows(std::ostream& out, const ResultMatrix& m) {
  for (std::size_t i = 0; i < m.train_languages.size(); ++i) {
    for (std::size_t j = 0; j < m.test_languages.size(); ++j) {
      const auto& cell = m.cells[i][j];
      if (!cell) continue;
      out << csv::join({to_string(m.representation), m.centralized ? "true" : "false", m.train_languages[i],
                        m.test_languages[j], fixed2(cell->mean), fixed2(cell->two_sigma()),
                        std::to_string(cell->genres)})
          << '\n';
    }
  }
}

constexpr const char* kReportCsvHeader = "representation,centralized,train_language,test_language,mean,two_sigma,genres";

}  // namespace

std::string render_report(const ResultMatrix& m, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << kReportCsvHeader << '\n';
    render_csv_rows(out, m);
    return out.str();
  }
  out << "### " << matrix_title(m) << "\n\nF1-score (mean \xC2\xB1 2\xCF\x83), rows: train, columns: test\n\n";
  out << "| Train |";
  for (const auto& t : m.test_languages) out << ' ' << display_variant_tag(t) << " |";
  out << "\n|---|";
  for (std::size_t j = 0; j < m.test_languages.size(); ++j) out << ":---:|";
  out << '\n';
  for (std::size_t i = 0; i < m.train_languages.size(); ++i) {
    out << "| " << display_variant_tag(m.train_languages[i]) << " |";
    for (std::size_t j = 0; j < m.test_languages.size(); ++j) {
      out << ' ' << (m.cells[i][j] ? format_cell(*m.cells[i][j]) : std::string("\xE2\x80\x94")) << " |";
    }
    out << '\n';
  }
  return out.str();
}

std::string render_reports(std::span<const ResultMatrix> matrices, ReportFormat format) {
  std::ostringstream out;
  if (format == ReportFormat::csv) {
    out << kReportCsvHeader << '\n';
    for (const auto& m : matrices) render_csv_rows(out, m);
    return out.str();
  }
  for (std::size_t k = 0; k < matrices.size(); ++k) {
    if (k) out << '\n';
    out << render_report(matrices[k], format);
  }
  return out.str();
}

std::vector<ResultMatrix> parse_report_csv(std::istream& in) {
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header || csv::join(header->fields) != kReportCsvHeader) throw DataError("not a report CSV (bad header)");
  std::map<std::pair<int, bool>, std::vector<std::tuple<std::string, std::string, MatrixCell>>> groups;
  while (auto row = reader.next()) {
    if (row->fields.size() == 1 && row->fields[0].empty()) continue;
    if (row->fields.size() != 7) throw DataError("line " + std::to_string(row->line) + ": expected 7 fields");
    const auto& f = row->fields;
    MatrixCell cell{parse_double(f[4], "mean"), parse_double(f[5], "two_sigma") / 2.0,
                    static_cast<std::size_t>(parse_double(f[6], "genres"))};
    groups[{static_cast<int>(parse_representation(f[0])), parse_bool(f[1])}].emplace_back(f[2], f[3], cell);
  }
  std::vector<ResultMatrix> out;
  for (auto& [key, rows] : groups) {
    ResultMatrix m;
    m.representation = static_cast<Representation>(key.first);
    m.centralized = key.second;
    std::set<std::string> trains, tests;
    for (const auto& [tr, te, c] : rows) {
      trains.insert(tr);
      tests.insert(te);
    }
    m.train_languages = sorted_tags(trains);
    m.test_languages = sorted_tags(tests);
    m.cells.assign(m.train_languages.size(), std::vector<std::optional<MatrixCell>>(m.test_languages.size()));
    for (const auto& [tr, te, c] : rows) {
      const auto i = std::find(m.train_languages.begin(), m.train_languages.end(), tr) - m.train_languages.begin();
      const auto j = std::find(m.test_languages.begin(), m.test_languages.end(), te) - m.test_languages.begin();
      m.cells[i][j] = c;
    }
    out.push_back(std::move(m));
  }
  return out;
}

void write_results_csv(std::ostream& out, std::span<const BootstrapResult> results) {
  out << "genre,train_language,test_language,representation,centralized,repeat,f1\n";
  for (const auto& r : results) {
    for (std::size_t k = 0; k < r.f1_values.size(); ++k) {
      out << csv::join({r.spec.genre, r.spec.train_language, r.spec.test_language, to_string(r.spec.representation),
                        r.spec.centralized ? "true" : "false", std::to_string(k), format_double(r.f1_values[k])})
          << '\n';
    }
  }
}

void write_aggregated_csv(std::ostream& out, std::span<const BootstrapResult> results) {
  out << "genre,train_language,test_language,representation,centralized,repeats,mean,std,two_sigma\n";
  for (const auto& r : results) {
    out << csv::join({r.spec.genre, r.spec.train_language, r.spec.test_language, to_string(r.spec.representation),
                      r.spec.centralized ? "true" : "false", std::to_string(r.f1_values.size()),
                      format_double(r.mean), format_double(r.std), format_double(2.0 * r.std)})
        << '\n';
  }
}

std::vector<BootstrapResult> read_results_csv(std::istream& in) {
  csv::Reader reader(in);
  const auto header = reader.next();
  if (!header || csv::join(header->fields) != "genre,train_language,test_language,representation,centralized,repeat,f1") {
    throw DataError("not a results CSV (bad header)");
  }
  std::vector<BootstrapResult> results;
  std::map<std::tuple<std::string, std::string, std::string, int, bool>, std::size_t> index;
  while (auto row = reader.next()) {
    if (row->fields.size() == 1 && row->fields[0].empty()) continue;
    if (row->fields.size() != 7) throw DataError("line " + std::to_string(row->line) + ": expected 7 fields");
    const auto& f = row->fields;
    RunSpec spec;
    spec.genre = f[0];
    spec.train_language = canonical_variant_tag(f[1]);
    spec.test_language = canonical_variant_tag(f[2]);
    spec.representation = parse_representation(f[3]);
    spec.centralized = parse_bool(f[4]);
    const auto repeat = static_cast<std::size_t>(parse_double(f[5], "repeat"));
    const double value = parse_double(f[6], "f1");
    const auto key = std::make_tuple(spec.genre, spec.train_language, spec.test_language,
                                     static_cast<int>(spec.representation), spec.centralized);
    auto [it, inserted] = index.emplace(key, results.size());
    if (inserted) results.push_back({spec, {}, 0, 0});
    auto& res = results[it->second];
    if (repeat != res.f1_values.size()) {
      throw DataError("line " + std::to_string(row->line) + ": repeats out of order");
    }
    res.f1_values.push_back(value);
  }
  for (auto& r : results) {
    r.spec.repeats = static_cast<int>(r.f1_values.size());
    const auto s = summarize(r.f1_values);
    r.mean = s.mean;
    r.std = s.std;
  }
  return results;
}

std::vector<BootstrapResult> read_results_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return read_results_csv(in);
}

}  // namespace lyricgenre
