#include "unpast/io.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace unpast {

namespace {

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(fmt::format("cannot open {}", path.string()));
  return in;
}

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  return out;
}

bool next_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> tokens(std::string_view s) {
  std::vector<std::string_view> out;
  for (auto t : split(s, ' ')) {
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

bool parse_double(std::string_view s, double& value) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  return ec == std::errc() && ptr == s.data() + s.size();
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, ptr);
}

std::unordered_map<std::string_view, std::size_t> index_of(const std::vector<std::string>& ids) {
  std::unordered_map<std::string_view, std::size_t> map;
  map.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) map.emplace(ids[i], i);
  return map;
}

} // namespace

ExpressionMatrix read_matrix(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw ParseError("matrix file is empty");
  auto header = split(line, '\t');
  if (header.size() < 2) throw ParseError("line 1: header has no sample ids");
  std::vector<std::string> samples;
  for (std::size_t i = 1; i < header.size(); ++i) samples.emplace_back(trim(header[i]));
  const std::size_t ns = samples.size();

  std::vector<std::string> features;
  std::vector<double> values;
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, '\t');
    if (fields.size() != ns + 1) {
      throw ParseError(fmt::format("line {}: expected {} fields, found {}", line_no, ns + 1, fields.size()));
    }
    const std::size_t row = features.size() + 1;
    features.emplace_back(trim(fields[0]));
    for (std::size_t c = 1; c <= ns; ++c) {
      double v = 0.0;
      if (!parse_double(fields[c], v)) {
        throw ParseError(fmt::format("row {}, column {} (line {}): cannot parse \"{}\" as a number", row, c,
                                     line_no, fields[c]));
      }
      if (!std::isfinite(v)) {
        throw ValidationError(fmt::format("row {}, column {} (line {}): non-finite value \"{}\"", row, c,
                                          line_no, fields[c]));
      }
      values.push_back(v);
    }
  }
  return {std::move(features), std::move(samples), std::move(values)};
}

ExpressionMatrix read_matrix(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix(in);
}

MatrixHeader read_matrix_header(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::string line;
  if (!next_line(in, line)) throw ParseError("matrix file is empty");
  MatrixHeader h;
  auto header = split(line, '\t');
  for (std::size_t i = 1; i < header.size(); ++i) h.sample_ids.emplace_back(trim(header[i]));
  while (next_line(in, line)) {
    if (trim(line).empty()) continue;
    h.feature_ids.emplace_back(trim(line.substr(0, line.find('\t'))));
  }
  return h;
}

void write_matrix(std::ostream& out, const ExpressionMatrix& m) {
  for (const auto& s : m.sample_ids()) out << '\t' << s;
  out << '\n';
  std::string buf;
  for (std::size_t f = 0; f < m.n_features(); ++f) {
    buf = m.feature_ids()[f];
    for (double v : m.row(f)) {
      buf += '\t';
      buf += format_double(v);
    }
    buf += '\n';
    out << buf;
  }
}

void write_matrix(const std::filesystem::path& path, const ExpressionMatrix& m) {
  auto out = open_out(path);
  write_matrix(out, m);
  if (!out) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

void write_biclusters(std::ostream& out, const std::vector<Bicluster>& biclusters,
                      const std::vector<std::string>& feature_ids,
                      const std::vector<std::string>& sample_ids) {
  out << "id\tsnr\tdirection\tn_features\tn_samples\tfeatures\tsamples\n";
  for (std::size_t i = 0; i < biclusters.size(); ++i) {
    const auto& b = biclusters[i];
    out << i << '\t' << fmt::format("{:.6g}", b.snr) << '\t' << to_string(b.direction) << '\t'
        << b.features.size() << '\t' << b.samples.size() << '\t';
    for (std::size_t k = 0; k < b.features.size(); ++k) {
      if (k) out << ' ';
      if (b.direction == Direction::mixed && b.signs[k] < 0) out << '-';
      out << feature_ids[b.features[k]];
    }
    out << '\t';
    for (std::size_t k = 0; k < b.samples.size(); ++k) {
      if (k) out << ' ';
      out << sample_ids[b.samples[k]];
    }
    out << '\n';
  }
}

void write_biclusters(const std::filesystem::path& path, const std::vector<Bicluster>& biclusters,
                      const std::vector<std::string>& feature_ids,
                      const std::vector<std::string>& sample_ids) {
  auto out = open_out(path);
  write_biclusters(out, biclusters, feature_ids, sample_ids);
  if (!out) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

std::vector<BiclusterRecord> read_bicluster_records(std::istream& in) {
  std::string line;
  if (!next_line(in, line)) throw ParseError("bicluster file is empty");
  const auto header = split(line, '\t');
  if (header.size() != 7 || header[0] != "id" || header[5] != "features" || header[6] != "samples") {
    throw ParseError("line 1: not a bicluster table header");
  }
  std::vector<BiclusterRecord> out;
  std::size_t line_no = 1;
  while (next_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 7) throw ParseError(fmt::format("line {}: expected 7 fields, found {}", line_no, f.size()));
    BiclusterRecord r;
    double id = 0.0, nf = 0.0, ns = 0.0;
    if (!parse_double(f[0], id) || !parse_double(f[1], r.snr) || !parse_double(f[3], nf) ||
        !parse_double(f[4], ns)) {
      throw ParseError(fmt::format("line {}: malformed numeric field", line_no));
    }
    r.id = static_cast<long>(id);
    try {
      r.direction = parse_direction(trim(f[2]));
    } catch (const ParseError& e) {
      throw ParseError(fmt::format("line {}: {}", line_no, e.what()));
    }
    for (auto t : tokens(f[5])) {
      const bool neg = t.size() > 1 && t.front() == '-';
      if (neg) t.remove_prefix(1);
      r.features.emplace_back(t);
      r.negative.push_back(neg);
    }
    for (auto t : tokens(f[6])) r.samples.emplace_back(t);
    if (r.features.size() != static_cast<std::size_t>(nf) || r.samples.size() != static_cast<std::size_t>(ns)) {
      throw ParseError(fmt::format("line {}: feature/sample counts disagree with the listed ids", line_no));
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<BiclusterRecord> read_bicluster_records(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_bicluster_records(in);
}

std::vector<Bicluster> resolve_biclusters(const std::vector<BiclusterRecord>& records,
                                          const std::vector<std::string>& feature_ids,
                                          const std::vector<std::string>& sample_ids) {
  const auto fidx = index_of(feature_ids);
  const auto sidx = index_of(sample_ids);
  std::vector<Bicluster> out;
  for (const auto& r : records) {
    std::vector<std::pair<std::size_t, int>> feats;
    for (std::size_t k = 0; k < r.features.size(); ++k) {
      auto it = fidx.find(r.features[k]);
      if (it == fidx.end()) throw DataError(fmt::format("bicluster {}: unknown feature \"{}\"", r.id, r.features[k]));
      feats.emplace_back(it->second, r.negative[k] ? -1 : 1);
    }
    std::sort(feats.begin(), feats.end());
    Bicluster b;
    for (const auto& [f, s] : feats) {
      b.features.push_back(f);
      b.signs.push_back(s);
    }
    for (const auto& s : r.samples) {
      auto it = sidx.find(s);
      if (it == sidx.end()) throw DataError(fmt::format("bicluster {}: unknown sample \"{}\"", r.id, s));
      b.samples.push_back(it->second);
    }
    std::sort(b.samples.begin(), b.samples.end());
    b.samples.erase(std::unique(b.samples.begin(), b.samples.end()), b.samples.end());
    b.direction = r.direction;
    b.snr = r.snr;
    out.push_back(std::move(b));
  }
  return out;
}

void write_ground_truth(const std::filesystem::path& path, const GroundTruth& truth,
                        const std::vector<std::string>& sample_ids) {
  auto out = open_out(path);
  for (std::size_t i = 0; i < truth.members.size(); ++i) {
    out << truth.names[i] << '\t';
    for (std::size_t k = 0; k < truth.members[i].size(); ++k) {
      if (k) out << ' ';
      out << sample_ids[truth.members[i][k]];
    }
    out << '\n';
  }
}

GroundTruth read_ground_truth(const std::filesystem::path& path,
                              const std::vector<std::string>& sample_ids) {
  auto in = open_in(path);
  const auto sidx = index_of(sample_ids);
  GroundTruth truth;
  truth.n_samples = sample_ids.size();
  std::string line;
  std::size_t line_no = 0;
  while (next_line(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 2) throw ParseError(fmt::format("line {}: expected name<TAB>samples", line_no));
    IndexSet members;
    for (auto t : tokens(f[1])) {
      auto it = sidx.find(t);
      if (it == sidx.end()) throw DataError(fmt::format("line {}: unknown sample \"{}\"", line_no, t));
      members.push_back(it->second);
    }
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.empty()) throw DataError(fmt::format("line {}: empty sample set", line_no));
    truth.names.emplace_back(trim(f[0]));
    truth.members.push_back(std::move(members));
  }
  if (truth.members.empty()) throw DataError("ground truth file lists no sets");
  return truth;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  auto out = open_out(path);
  out << text;
  if (!out) throw std::runtime_error(fmt::format("failed writing {}", path.string()));
}

} // namespace unpast
