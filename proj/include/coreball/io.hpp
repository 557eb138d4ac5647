#pragma once

#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "coreball/rng.hpp"
#include "coreball/sparse.hpp"

namespace coreball {

// Raised for malformed input files; the message carries the line number.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses LIBSVM text: one `label idx:val idx:val ...` row per line, indices
// 1-based and strictly increasing. Blank lines and lines starting with '#'
// are skipped. Explicit zero values are dropped.
Dataset parse_libsvm(std::istream& in);
Dataset parse_libsvm_file(const std::string& path);

// Writes the dataset back in the same format (1-based indices, shortest
// round-trip decimals). parse(write(d)) == d.
void write_libsvm(const Dataset& d, std::ostream& out);

// Splits a K-class dataset into the K(K-1)/2 one-versus-one binary tasks.
std::vector<BinarySubproblem> split_ovo(const Dataset& d);

// Mean squared Euclidean distance between training rows: exact over all
// pairs when m <= 2000, otherwise a seeded Monte-Carlo estimate over
// `sample_pairs` random distinct pairs.
double avg_sq_distance(const Dataset& d, long sample_pairs, std::uint64_t seed);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

}  // namespace coreball
