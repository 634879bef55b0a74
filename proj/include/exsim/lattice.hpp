#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

// Regular 1D chains and 2D rectangular lattices of two-level monomers.
// Cells are addressed either by integer coordinates (x[, y]), 0-indexed
// from one corner, or by a flat row-major index (x fastest). Vacancies are
// represented as an occupancy mask over the full grid; Hamiltonians and
// states are later built on the occupied subset only.

namespace exsim {

class LatticeError : public std::runtime_error {
 public:
  explicit LatticeError(const std::string& what) : std::runtime_error(what) {}
};

struct LatticeSpec {
  int dims = 1;                       // 1 or 2
  std::array<int, 2> extent = {0, 1};  // cells per axis; extent[1]==1 in 1D
  double spacing = 0.0;               // lattice constant a in meters

  int cell_count() const { return extent[0] * extent[1]; }

  int flat_index(std::array<int, 2> c) const {
    return c[1] * extent[0] + c[0];
  }
  std::array<int, 2> coords(int flat) const {
    return {flat % extent[0], flat / extent[0]};
  }
  bool contains(std::array<int, 2> c) const {
    return c[0] >= 0 && c[0] < extent[0] && c[1] >= 0 && c[1] < extent[1];
  }
};

// Validates and normalizes a lattice description.
LatticeSpec build_lattice(int dims, std::array<int, 2> extent, double spacing);

struct DisorderRealization {
  LatticeSpec spec;
  std::vector<std::uint8_t> occupied;  // one flag per cell, row-major
  double vacancy_fraction = 0.0;       // requested fraction
  std::uint64_t seed = 0;

  int occupied_count() const;
  bool is_occupied(int flat) const { return occupied[flat] != 0; }
  std::vector<int> occupied_cells() const;  // flat indices, ascending
};

// Marks round(fraction * cell_count) cells vacant, chosen uniformly without
// replacement. Same (spec, fraction, seed) always yields the same mask.
DisorderRealization sample_disorder(const LatticeSpec& spec, double fraction,
                                    std::uint64_t seed);

// Fully occupied lattice (fraction 0).
DisorderRealization full_lattice(const LatticeSpec& spec);

struct BlockPartition {
  LatticeSpec spec;
  std::array<int, 2> block_shape = {1, 1};
  // blocks[b] lists the flat cell indices of block b; blocks tile the grid
  // row-major with ragged blocks at the far edges when shapes do not divide
  // the extent.
  std::vector<std::vector<int>> blocks;
  std::vector<int> cell_block;  // per cell, index of the owning block

  int block_count() const { return static_cast<int>(blocks.size()); }
};

// Tiles the lattice into rectangular blocks of the given shape.
BlockPartition partition_blocks(const LatticeSpec& spec,
                                std::array<int, 2> block_shape);

// Plain-text occupancy grid: one row per y line of '1'/'0' characters,
// and the inverse parser (used by output files and tests).
std::string occupancy_to_text(const DisorderRealization& real);
DisorderRealization occupancy_from_text(const LatticeSpec& spec,
                                        const std::string& text);

}  // namespace exsim
