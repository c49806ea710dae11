#include "ptmatch/matcher.h"

#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "ptmatch/errors.h"

namespace ptmatch {

Matching extend_to_bijection(std::vector<Vertex> partial, std::vector<Origin> origin) {
  const std::size_t n = partial.size();
  std::vector<char> row_used(n, 0);
  for (Vertex i : partial) {
    if (i == kUnassigned) continue;
    if (i >= n || row_used[i]) throw InputError("partial matching is not injective");
    row_used[i] = 1;
  }
  Vertex next_row = 0;
  for (std::size_t ip = 0; ip < n; ++ip) {
    if (partial[ip] != kUnassigned) continue;
    while (row_used[next_row]) ++next_row;
    partial[ip] = next_row;
    row_used[next_row] = 1;
    origin[ip] = Origin::kExtended;
  }
  return Matching{n, std::move(partial), std::move(origin)};
}

Matching approximate_matching(const CandidateMatrix& b) {
  const std::size_t n = b.n;
  std::vector<Vertex> partial(n, kUnassigned);
  std::vector<Origin> origin(n, Origin::kExtended);
  std::vector<char> col_used(n, 0);
  // Rows are only ever removed together with their chosen column, and a row
  // with no free column stays empty forever, so one ascending sweep visits
  // the lexicographically smallest remaining edge at every step.
  for (Vertex i = 0; i < n; ++i) {
    for (Vertex ip : b.rows[i]) {
      if (col_used[ip]) continue;
      col_used[ip] = 1;
      partial[ip] = i;
      origin[ip] = Origin::kPeeled;
      break;
    }
  }
  return extend_to_bijection(std::move(partial), std::move(origin));
}

Matching approximate_matching_in_order(const CandidateMatrix& b, std::span<const Edge> order) {
  const std::size_t n = b.n;
  std::vector<Vertex> partial(n, kUnassigned);
  std::vector<Origin> origin(n, Origin::kExtended);
  std::vector<char> row_used(n, 0);
  for (const auto& [i, ip] : order) {
    if (i >= n || ip >= n || !b.get(i, ip)) throw InputError("selection order edge not in B");
    if (row_used[i] || partial[ip] != kUnassigned) continue;
    row_used[i] = 1;
    partial[ip] = i;
    origin[ip] = Origin::kPeeled;
  }
  return extend_to_bijection(std::move(partial), std::move(origin));
}

std::size_t matching_mismatches(const Matching& est, const Permutation& truth) {
  if (est.assign.size() != truth.size()) throw InputError("matching and truth differ in size");
  std::size_t wrong = 0;
  for (Vertex ip = 0; ip < truth.size(); ++ip) wrong += est.assign[ip] != truth(ip);
  return wrong;
}

void write_matching(std::ostream& os, const Matching& m) {
  os << "# i_prime i origin\n";
  for (std::size_t ip = 0; ip < m.assign.size(); ++ip) {
    os << ip << ' ' << m.assign[ip] << ' '
       << (m.origin[ip] == Origin::kPeeled ? "peeled" : "extended") << '\n';
  }
}

Matching read_matching(std::istream& is) {
  std::vector<std::pair<std::size_t, Vertex>> rows;
  std::vector<Origin> origins;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    long long ip, i;
    if (!(ls >> ip >> i) || ip < 0 || i < 0) throw InputError("matching: malformed line: " + line);
    std::string tag;
    Origin o = Origin::kPeeled;
    if (ls >> tag) {
      if (tag == "extended") {
        o = Origin::kExtended;
      } else if (tag != "peeled") {
        throw InputError("matching: unknown origin '" + tag + "'");
      }
    }
    rows.emplace_back(static_cast<std::size_t>(ip), static_cast<Vertex>(i));
    origins.push_back(o);
  }
  const std::size_t n = rows.size();
  Matching m;
  m.n = n;
  m.assign.assign(n, kUnassigned);
  m.origin.assign(n, Origin::kPeeled);
  for (std::size_t k = 0; k < n; ++k) {
    const auto [ip, i] = rows[k];
    if (ip >= n || m.assign[ip] != kUnassigned) throw InputError("matching: bad or repeated i_prime");
    m.assign[ip] = i;
    m.origin[ip] = origins[k];
  }
  Permutation check(m.assign);  // throws unless bijective
  return m;
}

}  // namespace ptmatch
