#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace unpast {

/// Sorted, duplicate-free list of row or column positions.
using IndexSet = std::vector<std::size_t>;

enum class Direction { up, down, mixed };

std::string_view to_string(Direction d);
Direction parse_direction(std::string_view s);

/// Base for every error caused by input data (bad files, invalid matrices).
class DataError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class ParseError : public DataError {
public:
  using DataError::DataError;
};

class ValidationError : public DataError {
public:
  using DataError::DataError;
};

// Set helpers over IndexSet.
std::size_t intersection_size(const IndexSet& a, const IndexSet& b);
IndexSet complement(const IndexSet& a, std::size_t n);
double jaccard(const IndexSet& a, const IndexSet& b);

} // namespace unpast
