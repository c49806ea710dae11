#pragma once

#include <iosfwd>
#include <string>

#include "ptmatch/graph.h"
#include "ptmatch/model.h"

namespace ptmatch {

// Edge-list text: "n m" then m lines "u v". The reader accepts any order and
// duplicates; the writer emits the canonical u < v order. Throws InputError
// on malformed content.
Graph read_edge_list(std::istream& is);
void write_edge_list(std::ostream& os, const Graph& g);

// File variants; IoError when the file cannot be opened.
Graph load_edge_list(const std::string& path);
void save_edge_list(const std::string& path, const Graph& g);

// instance.json: {"params": {...}, "seed": ..., "pi": [...], "streams": [...]}
void write_instance_json(std::ostream& os, const CorrelatedInstance& inst);

struct InstanceMetadata {
  ModelParams params;
  std::uint64_t seed = 0;
  Permutation pi;
};
InstanceMetadata read_instance_json(std::istream& is);
InstanceMetadata load_instance_json(const std::string& path);

}  // namespace ptmatch
