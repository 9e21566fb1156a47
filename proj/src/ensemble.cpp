#include "tweetpolarity/ensemble.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace tp {

namespace {

void require_same_width(std::span<const Vector<double>> v, const char* what) {
  if (v.empty()) throw DataError(std::string(what) + ": no inputs");
  for (const auto& x : v)
    if (x.size() != v.front().size())
      throw ShapeError(std::string(what) + ": mixed class counts " + std::to_string(v.front().size()) + " and " +
                       std::to_string(x.size()));
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_double(std::string_view s, int lineno) {
  double v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw DataError("line " + std::to_string(lineno) + ": not a number '" + std::string(s) + "'");
  return v;
}

}  // namespace

Vector<double> soft_vote(std::span<const Vector<double>> members) {
  require_same_width(members, "soft_vote");
  Vector<double> sum = Vector<double>::Zero(members.front().size());
  for (const auto& m : members) sum += m;
  return sum / static_cast<double>(members.size());
}

Vector<double> quantify(std::span<const Vector<double>> probs) {
  require_same_width(probs, "quantify");
  return soft_vote(probs);
}

Vector<double> quantify(const Matrix<double>& probs) {
  if (probs.rows() == 0) throw DataError("quantify: no inputs");
  return probs.colwise().mean().transpose();
}

Matrix<double> pearson_matrix(std::span<const Matrix<double>> outputs, std::span<const std::string> names) {
  if (outputs.empty()) throw DataError("pearson_matrix: no models");
  const auto M = static_cast<Eigen::Index>(outputs.size());
  std::vector<Vector<double>> centered;
  for (Eigen::Index i = 0; i < M; ++i) {
    const auto& o = outputs[static_cast<std::size_t>(i)];
    if (o.rows() != outputs.front().rows() || o.cols() != outputs.front().cols())
      throw ShapeError("pearson_matrix: output " + std::to_string(i) + " is " + shape_str(o.rows(), o.cols()) +
                       ", expected " + shape_str(outputs.front().rows(), outputs.front().cols()));
    Vector<double> flat = Eigen::Map<const Vector<double>>(o.data(), o.size());
    const double scale = flat.norm();
    flat.array() -= flat.mean();
    const double norm = flat.norm();
    // centering a constant array leaves only rounding residue
    if (!(norm > 1e-12 * scale)) {
      const std::string name = static_cast<std::size_t>(i) < names.size() ? names[static_cast<std::size_t>(i)]
                                                                           : "model " + std::to_string(i);
      throw NumericError("pearson_matrix: " + name + " has zero-variance output");
    }
    centered.push_back(flat / norm);
  }
  Matrix<double> r(M, M);
  for (Eigen::Index i = 0; i < M; ++i) {
    r(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < M; ++j)
      r(i, j) = r(j, i) = centered[static_cast<std::size_t>(i)].dot(centered[static_cast<std::size_t>(j)]);
  }
  return r;
}

PredictionSet read_predictions(std::istream& in) {
  PredictionSet set;
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() < 2) throw DataError("line " + std::to_string(lineno) + ": expected id and probabilities");
    std::vector<double> p;
    for (std::size_t i = 1; i < f.size(); ++i) p.push_back(parse_double(f[i], lineno));
    if (!rows.empty() && p.size() != rows.front().size())
      throw DataError("line " + std::to_string(lineno) + ": " + std::to_string(p.size()) + " probabilities, expected " +
                      std::to_string(rows.front().size()));
    set.ids.emplace_back(f[0]);
    rows.push_back(std::move(p));
  }
  if (rows.empty()) throw DataError("empty prediction file");
  set.probs.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < rows[i].size(); ++k)
      set.probs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  return set;
}

PredictionSet read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  try {
    return read_predictions(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_predictions(std::ostream& out, const PredictionSet& set) {
  // max_digits10 makes the text round-trip exactly
  const auto old = out.precision(17);
  for (int i = 0; i < set.size(); ++i) {
    out << set.ids[static_cast<std::size_t>(i)];
    for (int k = 0; k < set.num_classes(); ++k) out << '\t' << set.probs(i, k);
    out << '\n';
  }
  out.precision(old);
}

PredictionSet soft_vote(std::span<const PredictionSet> members) {
  if (members.empty()) throw DataError("soft_vote: no members");
  const auto& first = members.front();
  PredictionSet out{first.ids, Matrix<double>::Zero(first.probs.rows(), first.probs.cols())};
  for (std::size_t m = 0; m < members.size(); ++m) {
    const auto& s = members[m];
    if (s.ids != first.ids)
      throw DataError("soft_vote: member " + std::to_string(m) + " covers different ids than member 0");
    if (s.num_classes() != first.num_classes())
      throw ShapeError("soft_vote: member " + std::to_string(m) + " has " + std::to_string(s.num_classes()) +
                       " classes, expected " + std::to_string(first.num_classes()));
    out.probs += s.probs;
  }
  out.probs /= static_cast<double>(members.size());
  return out;
}

std::vector<MemberSpec> parse_member_specs(std::istream& in, const std::filesystem::path& base) {
  std::vector<MemberSpec> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line, '\t');
    if (f.size() != 2 || f[1].empty())
      throw DataError("line " + std::to_string(lineno) + ": expected kind<TAB>checkpoint_path");
    MemberSpec m;
    try {
      m.kind = parse_model_kind(f[0]);
    } catch (const std::invalid_argument& e) {
      throw DataError("line " + std::to_string(lineno) + ": " + e.what());
    }
    const std::filesystem::path p(f[1]);
    m.checkpoint = p.is_relative() && !base.empty() ? base / p : p;
    out.push_back(std::move(m));
  }
  if (out.empty()) throw DataError("member spec lists no members");
  return out;
}

std::vector<MemberSpec> read_member_specs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  return parse_member_specs(in, path.parent_path());
}

}  // namespace tp
