#pragma once

#include <string>

#include "stgf/core/errors.hpp"
#include "stgf/sim/scenario.hpp"

namespace stgf::sim {

using stgf::FormatVersionMismatchError;
using stgf::IoError;
using stgf::SchemaError;

/// JSON Lines: a header line {"config": ..., "format_version": 1, "kind": ...}
/// followed by one instance per line. Keys are sorted and floats use the
/// shortest round-trip decimal form, so writes are byte-reproducible.
void write_dataset(const Dataset& dataset, const std::string& path);

Dataset read_dataset(const std::string& path);

}  // namespace stgf::sim
