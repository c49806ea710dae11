#include "ptmatch/comparison.h"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>
#include <string>

#include "ptmatch/errors.h"
#include "ptmatch/parallel.h"

namespace ptmatch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

inline double distance_term(double fa, double va, double fb, double vb) {
  const double var = va + vb;
  const double diff = fa - fb;
  if (var == 0.0) return diff == 0.0 ? 0.0 : kInf;
  return diff * diff / var;
}

}  // namespace

IndexSet sample_index_set(int depth, std::uint64_t w, RandomStream& rng) {
  if (depth < 1 || depth > kMaxDepth) throw ParamError("index set depth must lie in [1, 64]");
  if (w == 0) throw ParamError("w must be at least 1");
  IndexSet j;
  j.depth = depth;
  j.w = w;
  const bool overflow = w > (std::numeric_limits<std::uint64_t>::max() >> 1);
  const std::uint64_t want = overflow ? std::numeric_limits<std::uint64_t>::max() : 2 * w;
  if (depth < 64 && want >= (std::uint64_t{1} << depth)) {
    const std::uint64_t total = std::uint64_t{1} << depth;
    j.clamped = want > total;
    j.keys.resize(total);
    for (std::uint64_t k = 0; k < total; ++k) j.keys[k] = k;
    return j;
  }
  std::set<std::uint64_t> chosen;
  if (depth == 64) {
    while (chosen.size() < want) chosen.insert(rng.next());
  } else {
    const std::uint64_t total = std::uint64_t{1} << depth;
    for (std::uint64_t t = total - want; t < total; ++t) {
      const std::uint64_t r = rng.below(t + 1);
      if (!chosen.insert(r).second) chosen.insert(t);
    }
  }
  j.keys.assign(chosen.begin(), chosen.end());
  return j;
}

double signature_distance(const VertexSignature& a, const VertexSignature& b, const IndexSet& j,
                          int depth_a, int depth_b) {
  if (depth_a != depth_b || depth_a != j.depth) {
    throw InputError("signature depths differ: " + std::to_string(depth_a) + " vs " +
                     std::to_string(depth_b) + " (J depth " + std::to_string(j.depth) + ")");
  }
  double sum = 0.0;
  for (std::uint64_t key : j.keys) {
    const SignatureEntry* ea = a.find(key);
    const SignatureEntry* eb = b.find(key);
    sum += distance_term(ea ? ea->f : 0.0, ea ? ea->v : 0.0, eb ? eb->f : 0.0, eb ? eb->v : 0.0);
  }
  return sum;
}

std::size_t CandidateMatrix::nnz() const {
  std::size_t total = 0;
  for (const auto& r : rows) total += r.size();
  return total;
}

bool CandidateMatrix::get(Vertex i, Vertex j) const {
  return std::binary_search(rows[i].begin(), rows[i].end(), j);
}

CandidateMatrix CandidateMatrix::transposed() const {
  CandidateMatrix t;
  t.n = n;
  t.rows.assign(n, {});
  for (Vertex i = 0; i < rows.size(); ++i) {
    for (Vertex j : rows[i]) t.rows[j].push_back(i);
  }
  return t;
}

namespace {

// Signatures restricted to J in CSR form: vertex i owns entries
// [offset[i], offset[i+1]), each tagged with its position in J. Positions
// absent from both vertices contribute exactly 0 and are skipped.
struct RestrictedSignatures {
  std::vector<std::size_t> offset;
  std::vector<std::uint32_t> pos;
  std::vector<double> f;
  std::vector<double> v;
  std::vector<Vertex> empty_support;
};

RestrictedSignatures restrict_to(const SignatureSet& set, const IndexSet& j) {
  RestrictedSignatures r;
  const std::size_t n = set.vertices.size();
  r.offset.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& entries = set.vertices[i].entries;
    auto key = j.keys.begin();
    for (const SignatureEntry& e : entries) {
      key = std::lower_bound(key, j.keys.end(), e.bits);
      if (key == j.keys.end()) break;
      if (*key != e.bits) continue;
      r.pos.push_back(static_cast<std::uint32_t>(key - j.keys.begin()));
      r.f.push_back(e.f);
      r.v.push_back(e.v);
    }
    r.offset[i + 1] = r.pos.size();
    if (r.offset[i + 1] == r.offset[i]) r.empty_support.push_back(static_cast<Vertex>(i));
  }
  return r;
}

// Sum of the terms in J order, stopping once it reaches `threshold`.
double merged_distance(const RestrictedSignatures& a, std::size_t i, const RestrictedSignatures& b,
                       std::size_t ip, double threshold) {
  std::size_t x = a.offset[i], xe = a.offset[i + 1];
  std::size_t y = b.offset[ip], ye = b.offset[ip + 1];
  double sum = 0.0;
  while ((x < xe || y < ye) && sum < threshold) {
    if (y == ye || (x < xe && a.pos[x] < b.pos[y])) {
      sum += distance_term(a.f[x], a.v[x], 0.0, 0.0);
      ++x;
    } else if (x == xe || b.pos[y] < a.pos[x]) {
      sum += distance_term(0.0, 0.0, b.f[y], b.v[y]);
      ++y;
    } else {
      sum += distance_term(a.f[x], a.v[x], b.f[y], b.v[y]);
      ++x;
      ++y;
    }
  }
  return sum;
}

}  // namespace

ComparisonResult compare_signatures(const SignatureSet& sig_pi, const SignatureSet& sig_prime,
                                    const IndexSet& j, double slack, int threads) {
  if (sig_pi.params.depth != sig_prime.params.depth || sig_pi.params.depth != j.depth) {
    throw InputError("signature sets and index set disagree on depth");
  }
  if (sig_pi.vertices.size() != sig_prime.vertices.size()) {
    throw InputError("signature sets differ in vertex count");
  }
  const std::size_t n = sig_pi.vertices.size();
  ComparisonResult out;
  out.j = j;
  out.threshold = static_cast<double>(j.keys.size()) * (1.0 - slack);
  const RestrictedSignatures a = restrict_to(sig_pi, j);
  const RestrictedSignatures b = restrict_to(sig_prime, j);
  out.empty_support_pi = a.empty_support;
  out.empty_support_prime = b.empty_support;

  out.b.n = n;
  out.b.rows.assign(n, {});
  const double threshold = out.threshold;
  // Terms are nonnegative, so a partial sum at or above the threshold
  // already decides B = 0.
  parallel_for(
      n, threads, [] { return 0; },
      [&](int&, std::size_t i) {
        auto& row = out.b.rows[i];
        for (std::size_t ip = 0; ip < n; ++ip) {
          if (merged_distance(a, i, b, ip, threshold) < threshold) {
            row.push_back(static_cast<Vertex>(ip));
          }
        }
      });
  return out;
}

ComparisonResult comparison_matrix(const Graph& g_pi, const Graph& g_prime,
                                   const ComparisonParams& params, RandomStream& rng) {
  if (g_pi.num_vertices() != g_prime.num_vertices()) {
    throw InputError("graphs differ in vertex count");
  }
  const std::size_t n = g_pi.num_vertices();
  const SignatureParams sp{params.depth, static_cast<double>(n) * params.p, params.p};
  sp.validate();
  const IndexSet j = sample_index_set(params.depth, params.w, rng);
  const SignatureSet a = compute_signatures(g_pi, sp, params.threads);
  const SignatureSet b = compute_signatures(g_prime, sp, params.threads);
  return compare_signatures(a, b, j, params.slack, params.threads);
}

void write_candidate_matrix(std::ostream& os, const CandidateMatrix& b) {
  os << "n " << b.n << '\n';
  for (std::size_t i = 0; i < b.rows.size(); ++i) {
    os << i << ':';
    for (Vertex j : b.rows[i]) os << ' ' << j;
    os << '\n';
  }
}

CandidateMatrix read_candidate_matrix(std::istream& is) {
  CandidateMatrix b;
  std::string line, tag;
  if (!std::getline(is, line)) throw InputError("candidate matrix: missing header");
  {
    std::istringstream hs(line);
    if (!(hs >> tag >> b.n) || tag != "n") throw InputError("candidate matrix: bad header");
  }
  b.rows.assign(b.n, {});
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) throw InputError("candidate matrix: missing ':'");
    std::istringstream rs(line.substr(0, colon));
    long long row = -1;
    if (!(rs >> row) || !(rs >> std::ws).eof()) throw InputError("candidate matrix: bad row index");
    if (row < 0 || static_cast<std::size_t>(row) >= b.n) {
      throw InputError("candidate matrix: row out of range");
    }
    std::istringstream cs(line.substr(colon + 1));
    long long col;
    while (cs >> col) {
      if (col < 0 || static_cast<std::size_t>(col) >= b.n) {
        throw InputError("candidate matrix: column out of range");
      }
      b.rows[row].push_back(static_cast<Vertex>(col));
    }
    if (!cs.eof()) throw InputError("candidate matrix: bad column entry");
    std::sort(b.rows[row].begin(), b.rows[row].end());
    b.rows[row].erase(std::unique(b.rows[row].begin(), b.rows[row].end()), b.rows[row].end());
  }
  return b;
}

}  // namespace ptmatch
