#include "exsim/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace exsim {

LatticeSpec build_lattice(int dims, std::array<int, 2> extent, double spacing) {
  if (dims != 1 && dims != 2) {
    throw LatticeError("lattice dims must be 1 or 2, got " + std::to_string(dims));
  }
  if (dims == 1) extent[1] = 1;
  if (extent[0] < 2 || (dims == 2 && extent[1] < 2)) {
    throw LatticeError("lattice needs at least 2 cells per active axis");
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw LatticeError("lattice spacing must be positive and finite");
  }
  return LatticeSpec{dims, extent, spacing};
}

int DisorderRealization::occupied_count() const {
  return static_cast<int>(std::count(occupied.begin(), occupied.end(), std::uint8_t{1}));
}

std::vector<int> DisorderRealization::occupied_cells() const {
  std::vector<int> out;
  out.reserve(occupied.size());
  for (int i = 0; i < static_cast<int>(occupied.size()); ++i) {
    if (occupied[i]) out.push_back(i);
  }
  return out;
}

namespace {

// Unbiased draw in [0, bound) from a raw 64-bit generator. Rejection keeps
// the mask reproducible across platforms (mt19937_64 output is specified
// bit-for-bit by the standard; this avoids distribution-object variance).
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  for (;;) {
    std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

}  // namespace

DisorderRealization sample_disorder(const LatticeSpec& spec, double fraction,
                                    std::uint64_t seed) {
  if (!(fraction >= 0.0) || fraction >= 1.0) {
    throw LatticeError("vacancy fraction must lie in [0, 1)");
  }
  const int cells = spec.cell_count();
  const int n_vacant = static_cast<int>(std::llround(fraction * cells));
  if (n_vacant >= cells) {
    throw LatticeError("vacancy fraction leaves no occupied cells");
  }

  DisorderRealization real;
  real.spec = spec;
  real.vacancy_fraction = fraction;
  real.seed = seed;
  real.occupied.assign(cells, 1);

  if (n_vacant > 0) {
    // Partial Fisher-Yates: after k swaps the first k slots hold a uniform
    // k-subset of all cells.
    std::vector<int> pool(cells);
    std::iota(pool.begin(), pool.end(), 0);
    std::mt19937_64 rng(seed);
    for (int i = 0; i < n_vacant; ++i) {
      int j = i + static_cast<int>(draw_below(rng, static_cast<std::uint64_t>(cells - i)));
      std::swap(pool[i], pool[j]);
      real.occupied[pool[i]] = 0;
    }
  }
  return real;
}

DisorderRealization full_lattice(const LatticeSpec& spec) {
  DisorderRealization real;
  real.spec = spec;
  real.vacancy_fraction = 0.0;
  real.seed = 0;
  real.occupied.assign(spec.cell_count(), 1);
  return real;
}

BlockPartition partition_blocks(const LatticeSpec& spec,
                                std::array<int, 2> block_shape) {
  if (spec.dims == 1) block_shape[1] = 1;
  if (block_shape[0] < 1 || block_shape[1] < 1) {
    throw LatticeError("block shape must be at least 1 cell per axis");
  }
  if (block_shape[0] > spec.extent[0] || block_shape[1] > spec.extent[1]) {
    throw LatticeError("block shape exceeds lattice extent");
  }

  const int nbx = (spec.extent[0] + block_shape[0] - 1) / block_shape[0];
  const int nby = (spec.extent[1] + block_shape[1] - 1) / block_shape[1];

  BlockPartition part;
  part.spec = spec;
  part.block_shape = block_shape;
  part.blocks.resize(static_cast<size_t>(nbx) * nby);
  part.cell_block.assign(spec.cell_count(), -1);

  for (int by = 0; by < nby; ++by) {
    for (int bx = 0; bx < nbx; ++bx) {
      const int b = by * nbx + bx;
      auto& cells = part.blocks[b];
      const int x1 = std::min((bx + 1) * block_shape[0], spec.extent[0]);
      const int y1 = std::min((by + 1) * block_shape[1], spec.extent[1]);
      for (int y = by * block_shape[1]; y < y1; ++y) {
        for (int x = bx * block_shape[0]; x < x1; ++x) {
          const int flat = spec.flat_index({x, y});
          cells.push_back(flat);
          part.cell_block[flat] = b;
        }
      }
    }
  }
  return part;
}

std::string occupancy_to_text(const DisorderRealization& real) {
  std::string out;
  const auto& spec = real.spec;
  out.reserve(static_cast<size_t>(spec.cell_count()) + spec.extent[1]);
  for (int y = 0; y < spec.extent[1]; ++y) {
    for (int x = 0; x < spec.extent[0]; ++x) {
      out.push_back(real.occupied[spec.flat_index({x, y})] ? '1' : '0');
    }
    out.push_back('\n');
  }
  return out;
}

DisorderRealization occupancy_from_text(const LatticeSpec& spec,
                                        const std::string& text) {
  DisorderRealization real;
  real.spec = spec;
  real.occupied.assign(spec.cell_count(), 0);
  std::istringstream in(text);
  std::string line;
  int y = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (y >= spec.extent[1] || static_cast<int>(line.size()) != spec.extent[0]) {
      throw LatticeError("occupancy text does not match lattice extent");
    }
    for (int x = 0; x < spec.extent[0]; ++x) {
      if (line[x] != '0' && line[x] != '1') {
        throw LatticeError("occupancy text contains characters other than 0/1");
      }
      real.occupied[spec.flat_index({x, y})] = line[x] == '1';
    }
    ++y;
  }
  if (y != spec.extent[1]) {
    throw LatticeError("occupancy text does not match lattice extent");
  }
  int vac = spec.cell_count() - real.occupied_count();
  real.vacancy_fraction = static_cast<double>(vac) / spec.cell_count();
  return real;
}

}  // namespace exsim
