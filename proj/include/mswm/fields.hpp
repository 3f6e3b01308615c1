#pragma once

#include <vector>
#include <cstddef>

namespace mswm {

// Thin typed wrappers so cell-, edge- and vertex-indexed arrays cannot be
// mixed up by accident. Data layout is a plain contiguous vector.
template <class Tag>
struct Field {
  std::vector<double> data;

  Field() = default;
  explicit Field(std::size_t n, double fill = 0.0) : data(n, fill) {}

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }
  std::size_t size() const { return data.size(); }
  double* ptr() { return data.data(); }
  const double* ptr() const { return data.data(); }
};

struct CellTag {};
struct EdgeTag {};
struct VertexTag {};

using CellField = Field<CellTag>;
using EdgeField = Field<EdgeTag>;
using VertexField = Field<VertexTag>;

}  // namespace mswm
