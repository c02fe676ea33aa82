#include "monokan/certifier.hpp"

#include <cmath>
#include <mutex>
#include <random>
#include <sstream>
#include <stdexcept>

#include "monokan/parallel.hpp"

namespace monokan {

namespace {

std::string coord_str(std::size_t l, std::size_t j, std::size_t i) {
  std::ostringstream os;
  os << "(l=" << l << ", j=" << j << ", i=" << i << ")";
  return os.str();
}

void check_edge(std::size_t l, std::size_t j, std::size_t i, const Edge& e, Direction dir,
                std::vector<Violation>& out) {
  const bool first_layer = l == 0;
  const int weight_cond = first_layer ? 1 : 6;
  if (e.omega_phi < 0.0) {
    out.push_back({l, j, i, std::nullopt, weight_cond, e.omega_phi, 0.0,
                   "omega_phi negative at " + coord_str(l, j, i)});
  }
  const bool omega_b_ok =
      dir == Direction::Decreasing ? e.omega_b <= 0.0 : e.omega_b >= 0.0;
  if (!omega_b_ok) {
    out.push_back({l, j, i, std::nullopt, weight_cond, e.omega_b, 0.0,
                   "omega_b has the wrong sign at " + coord_str(l, j, i)});
  }
  for (const IntervalIssue& issue : interval_issues(e.spline, dir)) {
    int cond = 0;
    std::string what;
    switch (issue.kind) {
      case IntervalIssue::Kind::SecantWrongSign:
        cond = 2;
        what = "secant slope points against the direction";
        break;
      case IntervalIssue::Kind::FlatSlopesNotZero:
        cond = 3;
        what = "flat interval with nonzero slopes";
        break;
      case IntervalIssue::Kind::SlopeWrongSign:
        cond = 4;
        what = "knot slope has the wrong sign";
        break;
      case IntervalIssue::Kind::OutsideFritschDisk:
        cond = 5;
        what = "alpha^2 + beta^2 exceeds 9";
        break;
    }
    if (!first_layer) cond += 5;
    std::ostringstream os;
    os << what << " at " << coord_str(l, j, i) << " interval " << issue.interval;
    out.push_back({l, j, i, issue.interval, cond, issue.a, issue.b, os.str()});
  }
}

// splitmix64, used to derive independent per-chunk streams.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

Certificate certify(const MonoKanModel& m) {
  m.validate();
  Certificate cert;
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    if (!basis_is_increasing(m.layers[l].basis)) {
      cert.violations.push_back({l, 0, 0, std::nullopt, 0, 0.0, 0.0,
                                 "basis not monotone: " + basis_name(m.layers[l].basis)});
    }
  }
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    const Layer& layer = m.layers[l];
    for (std::size_t i = 0; i < layer.n_in; ++i) {
      const Direction dir = l == 0 ? m.spec.directions[i] : Direction::Increasing;
      if (dir == Direction::Free) continue;
      for (std::size_t j = 0; j < layer.n_out; ++j)
        check_edge(l, j, i, layer.edge(j, i), dir, cert.violations);
    }
  }
  cert.pass = cert.violations.empty();
  return cert;
}

FalsifyResult falsify(const MonoKanModel& m, std::size_t n_pairs, std::uint64_t seed,
                      double range_expansion) {
  if (n_pairs < 1) throw std::invalid_argument("falsify needs n_pairs >= 1");
  if (range_expansion < 0.0) throw std::invalid_argument("range_expansion must be >= 0");
  m.validate();

  const std::size_t n = m.widths.front();
  const double lo = -1.0 - range_expansion;
  const double hi = 1.0 + range_expansion;
  constexpr double kSlack = 1e-12;
  constexpr std::size_t kChunk = 4096;

  FalsifyResult res;
  res.worst_gap = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < n; ++r) {
    const Direction dir = m.spec.directions[r];
    if (dir == Direction::Free) continue;
    res.checked_pairs += n_pairs;

    struct ChunkStat {
      std::size_t violations = 0;
      double worst_gap = std::numeric_limits<double>::infinity();
      std::vector<double> worst_x, worst_x_prime;
    };
    std::vector<ChunkStat> stats(chunk_count(n_pairs, kChunk));

    for_each_chunk(n_pairs, kChunk, [&](std::size_t begin, std::size_t end, std::size_t c) {
      std::mt19937_64 rng(mix64(mix64(seed + 0x517CC1B727220A95ULL * (r + 1)) + c));
      std::uniform_real_distribution<double> unif(lo, hi);
      ChunkStat& stat = stats[c];
      std::vector<double> x(n);
      for (std::size_t p = begin; p < end; ++p) {
        for (std::size_t q = 0; q < n; ++q) x[q] = unif(rng);
        double a = x[r];
        double b = unif(rng);
        if (b < a) std::swap(a, b);
        x[r] = a;
        const double f_low = forward(m, x);
        x[r] = b;
        const double f_high = forward(m, x);
        const double margin =
            dir == Direction::Increasing ? f_high - f_low : f_low - f_high;
        if (margin < -kSlack) {
          ++stat.violations;
          if (margin < stat.worst_gap) {
            stat.worst_gap = margin;
            stat.worst_x = x;
            stat.worst_x[r] = a;
            stat.worst_x_prime = x;
          }
        }
      }
    });

    for (const ChunkStat& stat : stats) {
      res.violations += stat.violations;
      if (stat.violations > 0 && stat.worst_gap < res.worst_gap) {
        res.worst_gap = stat.worst_gap;
        res.worst_feature = r;
        res.worst_x = stat.worst_x;
        res.worst_x_prime = stat.worst_x_prime;
      }
    }
  }
  if (res.violations == 0) res.worst_gap = 0.0;
  return res;
}

}  // namespace monokan
