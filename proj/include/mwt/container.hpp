#pragma once

// Shared on-disk container for grid-sampled weights and grid functions.
//
// Binary layout (little-endian):
//   char[4]  magic "MWTG"
//   u32      version (1)
//   u32      payload: 1 = Hermitian matrix per node, 2 = complex vector per node
//   u32      n, m, bits, periodic
//   f64[3]   domain lower corner (unused axes 0)
//   f64      domain edge
//   f64[]    node-major entries, each complex value stored as (re, im);
//            matrices row-major m x m, vectors m entries
//
// The JSON form carries the same header fields plus "data" as a flat array
// of [re, im] pairs in the same order.

#include <filesystem>

#include <json.hpp>

#include "mwt/dyadic.hpp"
#include "mwt/weights.hpp"

namespace mwt {

enum class ContainerFormat { binary, json };

/// Picks json for a ".json" extension and binary otherwise.
ContainerFormat format_for(const std::filesystem::path& path);

nlohmann::json to_json(const WeightSamples& s);
WeightSamples weight_samples_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GridFunction& f);
GridFunction grid_function_from_json(const nlohmann::json& j);

void save(const WeightSamples& s, const std::filesystem::path& path);
void save(const GridFunction& f, const std::filesystem::path& path);
/// Both loaders accept either format; throw FormatError on malformed input.
WeightSamples load_weight_samples(const std::filesystem::path& path);
GridFunction load_grid_function(const std::filesystem::path& path);

/// Samples an existing weight at the cell midpoints of a grid.
WeightSamples sample_weight(const MatrixWeight& w, const Grid& grid);

}  // namespace mwt
