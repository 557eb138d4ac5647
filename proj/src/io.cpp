#include "coreball/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace coreball {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

[[noreturn]] void fail(long line_no, const std::string& what) {
  std::ostringstream oss;
  oss << what << " at line " << line_no;
  throw ParseError(oss.str());
}

long parse_label(const std::string& tok, long line_no) {
  const char* begin = tok.data();
  const char* end = begin + tok.size();
  if (begin != end && *begin == '+') ++begin;
  long value = 0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) fail(line_no, "malformed label '" + tok + "'");
  return value;
}

double parse_value(const std::string& tok, long line_no) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(value))
    fail(line_no, "non-numeric value '" + tok + "'");
  return value;
}

}  // namespace

Dataset parse_libsvm(std::istream& in) {
  Dataset d;
  std::set<int> classes;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;

    std::istringstream tokens(t);
    std::string tok;
    tokens >> tok;
    Sample s;
    s.label = static_cast<int>(parse_label(tok, line_no));

    int prev_idx = 0;  // on-disk indices start at 1
    while (tokens >> tok) {
      const auto colon = tok.find(':');
      if (colon == std::string::npos || colon == 0 || colon + 1 == tok.size())
        fail(line_no, "malformed token '" + tok + "'");
      int idx = 0;
      auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + colon, idx);
      if (ec != std::errc{} || ptr != tok.data() + colon || idx < 1)
        fail(line_no, "malformed token '" + tok + "'");
      if (idx <= prev_idx) fail(line_no, "non-increasing index");
      prev_idx = idx;
      const double v = parse_value(tok.substr(colon + 1), line_no);
      if (v != 0.0) s.features.push_back(idx - 1, v);
      d.num_features = std::max(d.num_features, idx);
    }
    classes.insert(s.label);
    d.samples.push_back(std::move(s));
  }
  if (d.samples.empty()) throw ParseError("no samples found");
  d.classes.assign(classes.begin(), classes.end());
  return d;
}

Dataset parse_libsvm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return parse_libsvm(in);
}

void write_libsvm(const Dataset& d, std::ostream& out) {
  for (const Sample& s : d.samples) {
    out << s.label;
    for (std::size_t k = 0; k < s.features.nnz(); ++k)
      out << ' ' << (s.features.idx[k] + 1) << ':' << format_double(s.features.val[k]);
    out << '\n';
  }
}

std::vector<BinarySubproblem> split_ovo(const Dataset& d) {
  const auto& classes = d.classes;
  if (classes.size() < 2)
    throw std::invalid_argument("one-versus-one split needs at least 2 classes");

  std::vector<BinarySubproblem> subs;
  for (std::size_t a = 0; a < classes.size(); ++a) {
    for (std::size_t b = a + 1; b < classes.size(); ++b) {
      BinarySubproblem sp;
      sp.positive_class = classes[a];
      sp.negative_class = classes[b];
      subs.push_back(std::move(sp));
    }
  }
  // One pass over the data, dispatching each row to its K-1 pairs.
  for (std::size_t row = 0; row < d.samples.size(); ++row) {
    const int label = d.samples[row].label;
    for (auto& sp : subs) {
      if (label == sp.positive_class)
        sp.rows.emplace_back(static_cast<int>(row), +1);
      else if (label == sp.negative_class)
        sp.rows.emplace_back(static_cast<int>(row), -1);
    }
  }
  return subs;
}

double avg_sq_distance(const Dataset& d, long sample_pairs, std::uint64_t seed) {
  const std::size_t m = d.samples.size();
  if (m < 2) throw std::invalid_argument("avg_sq_distance needs at least 2 rows");
  if (sample_pairs < 1) throw std::invalid_argument("sample_pairs must be >= 1");

  std::vector<double> norms(m);
  for (std::size_t i = 0; i < m; ++i) norms[i] = norm2(d.samples[i].features);

  if (m <= 2000) {
    double sum = 0.0;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        sum += norms[i] + norms[j] - 2.0 * dot(d.samples[i].features, d.samples[j].features);
    return sum / (0.5 * static_cast<double>(m) * static_cast<double>(m - 1));
  }

  Rng rng(seed);
  double sum = 0.0;
  for (long k = 0; k < sample_pairs; ++k) {
    std::size_t i = rng.uniform_index(m);
    std::size_t j = rng.uniform_index(m);
    while (j == i) j = rng.uniform_index(m);
    sum += norms[i] + norms[j] - 2.0 * dot(d.samples[i].features, d.samples[j].features);
  }
  return sum / static_cast<double>(sample_pairs);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace coreball
