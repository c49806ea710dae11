#include "ptmatch/io.h"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "ptmatch/errors.h"

namespace ptmatch {

Graph read_edge_list(std::istream& is) {
  long long n = -1, m = -1;
  if (!(is >> n >> m) || n < 0 || m < 0) throw InputError("edge list: bad header");
  std::vector<Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long k = 0; k < m; ++k) {
    long long u, v;
    if (!(is >> u >> v)) throw InputError("edge list: expected " + std::to_string(m) + " edges");
    if (u < 0 || v < 0 || u >= n || v >= n) throw InputError("edge list: vertex out of range");
    edges.emplace_back(static_cast<Vertex>(u), static_cast<Vertex>(v));
  }
  return Graph::from_edge_list(static_cast<std::size_t>(n), edges);
}

void write_edge_list(std::ostream& os, const Graph& g) {
  os << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const auto& [u, v] : g.to_edge_list()) os << u << ' ' << v << '\n';
}

Graph load_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_edge_list(in);
}

void save_edge_list(const std::string& path, const Graph& g) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  write_edge_list(out, g);
  if (!out) throw IoError("write failed: " + path);
}

void write_instance_json(std::ostream& os, const CorrelatedInstance& inst) {
  nlohmann::ordered_json j;
  j["params"] = {{"n", inst.params.n},
                 {"p", inst.params.p},
                 {"alpha", inst.params.alpha},
                 {"q", inst.params.q()}};
  j["seed"] = inst.seed;
  j["pi"] = inst.pi.forward();
  j["streams"] = inst.streams;
  j["skip_sampled"] = inst.skip_sampled;
  j["edges"] = {{"g0", inst.g0.num_edges()},
                {"g_pi", inst.g_pi.num_edges()},
                {"g_prime", inst.g_prime.num_edges()}};
  os << j.dump(2) << '\n';
}

InstanceMetadata read_instance_json(std::istream& is) {
  nlohmann::json j;
  try {
    is >> j;
    InstanceMetadata meta;
    meta.params.n = j.at("params").at("n").get<std::size_t>();
    meta.params.p = j.at("params").at("p").get<double>();
    meta.params.alpha = j.at("params").at("alpha").get<double>();
    meta.seed = j.at("seed").get<std::uint64_t>();
    meta.pi = Permutation(j.at("pi").get<std::vector<Vertex>>());
    if (meta.pi.size() != meta.params.n) throw InputError("instance.json: pi has wrong size");
    return meta;
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("instance.json: ") + e.what());
  }
}

InstanceMetadata load_instance_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return read_instance_json(in);
}

}  // namespace ptmatch
