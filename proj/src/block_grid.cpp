#include <string>

#include "vlz/types.hpp"

namespace vlz {

BlockGrid::BlockGrid(const ArrayDescriptor& desc, int block_edge) : desc_(desc), edge_(block_edge) {
  if (!is_valid_block_edge(block_edge)) {
    throw Error(ErrorCode::config, "block edge must be one of 8, 16, 32, 64 (got " + std::to_string(block_edge) + ")");
  }
  if (desc.ndims() == 0) throw Error(ErrorCode::config, "empty array descriptor");
  const auto b = static_cast<std::size_t>(block_edge);
  block_count_ = 1;
  for (int d = 0; d < desc.ndims(); ++d) {
    blocks_per_dim_[static_cast<std::size_t>(d)] = (desc.extent(d) + b - 1) / b;
    block_count_ *= blocks_per_dim_[static_cast<std::size_t>(d)];
  }
  offsets_.resize(block_count_ + 1);
  offsets_[0] = 0;
  for (std::size_t i = 0; i < block_count_; ++i) offsets_[i + 1] = offsets_[i] + block_elements(i);
}

std::array<std::size_t, 3> BlockGrid::block_coords(std::size_t block) const {
  std::array<std::size_t, 3> c{0, 0, 0};
  for (int d = desc_.ndims() - 1; d >= 0; --d) {
    const auto n = blocks_per_dim_[static_cast<std::size_t>(d)];
    c[static_cast<std::size_t>(d)] = block % n;
    block /= n;
  }
  return c;
}

std::array<std::size_t, 3> BlockGrid::block_origin(std::size_t block) const {
  auto c = block_coords(block);
  for (auto& v : c) v *= static_cast<std::size_t>(edge_);
  return c;
}

std::array<int, 3> BlockGrid::block_extents(std::size_t block) const {
  const auto origin = block_origin(block);
  std::array<int, 3> e{1, 1, 1};
  for (int d = 0; d < desc_.ndims(); ++d) {
    const auto rest = desc_.extent(d) - origin[static_cast<std::size_t>(d)];
    e[static_cast<std::size_t>(d)] = static_cast<int>(rest < static_cast<std::size_t>(edge_) ? rest : edge_);
  }
  return e;
}

std::size_t BlockGrid::block_elements(std::size_t block) const {
  const auto e = block_extents(block);
  return static_cast<std::size_t>(e[0]) * static_cast<std::size_t>(e[1]) * static_cast<std::size_t>(e[2]);
}

BlockGrid build_block_grid(const ArrayDescriptor& desc, int block_edge) { return BlockGrid(desc, block_edge); }

}  // namespace vlz
