#pragma once

#include "unpast/bicluster.hpp"
#include "unpast/evaluation.hpp"
#include "unpast/matrix.hpp"
#include "unpast/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace unpast {

/// Tab-separated matrix: the header holds an (ignored) corner field followed
/// by sample ids; each further line is a feature id and one number per sample.
/// LF and CRLF line endings are accepted.
ExpressionMatrix read_matrix(const std::filesystem::path& path);
ExpressionMatrix read_matrix(std::istream& in);

/// Values are written in the shortest form that reads back to the same double.
void write_matrix(const std::filesystem::path& path, const ExpressionMatrix& m);
void write_matrix(std::ostream& out, const ExpressionMatrix& m);

/// Ids only; the numeric cells are not parsed.
struct MatrixHeader {
  std::vector<std::string> feature_ids;
  std::vector<std::string> sample_ids;
};
MatrixHeader read_matrix_header(const std::filesystem::path& path);

/// Bicluster table columns: id, snr, direction, n_features, n_samples,
/// features, samples. Under-expressed features of mixed biclusters carry a
/// leading '-'.
void write_biclusters(std::ostream& out, const std::vector<Bicluster>& biclusters,
                      const std::vector<std::string>& feature_ids,
                      const std::vector<std::string>& sample_ids);
void write_biclusters(const std::filesystem::path& path, const std::vector<Bicluster>& biclusters,
                      const std::vector<std::string>& feature_ids,
                      const std::vector<std::string>& sample_ids);

/// One parsed row of a bicluster table, still in terms of ids.
struct BiclusterRecord {
  long id = 0;
  double snr = 0.0;
  Direction direction = Direction::up;
  std::vector<std::string> features;
  std::vector<bool> negative;
  std::vector<std::string> samples;
};

std::vector<BiclusterRecord> read_bicluster_records(const std::filesystem::path& path);
std::vector<BiclusterRecord> read_bicluster_records(std::istream& in);

/// Maps record ids onto matrix positions; throws DataError for unknown ids.
std::vector<Bicluster> resolve_biclusters(const std::vector<BiclusterRecord>& records,
                                          const std::vector<std::string>& feature_ids,
                                          const std::vector<std::string>& sample_ids);

/// Ground truth table: set name, tab, space-separated sample ids.
void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth,
                        const std::vector<std::string>& sample_ids);
GroundTruth read_ground_truth(const std::filesystem::path& path,
                              const std::vector<std::string>& sample_ids);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

} // namespace unpast
