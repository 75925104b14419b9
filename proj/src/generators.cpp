#include "doobkit/generators.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <numeric>

#include "doobkit/conditional.hpp"
#include "doobkit/error.hpp"

namespace doobkit::gen {

namespace {

std::size_t uniform_index(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

// Splits `cell` into `parts` nonempty contiguous chunks at random cut points.
std::vector<Cell> split(const Cell& cell, std::size_t parts, std::mt19937_64& rng) {
  std::vector<std::size_t> cuts(cell.size() - 1);
  std::iota(cuts.begin(), cuts.end(), std::size_t{1});
  std::shuffle(cuts.begin(), cuts.end(), rng);
  cuts.resize(parts - 1);
  std::sort(cuts.begin(), cuts.end());
  std::vector<Cell> out;
  std::size_t from = 0;
  for (std::size_t i = 0; i <= cuts.size(); ++i) {
    const std::size_t to = i < cuts.size() ? cuts[i] : cell.size();
    out.emplace_back(cell.begin() + static_cast<std::ptrdiff_t>(from), cell.begin() + static_cast<std::ptrdiff_t>(to));
    from = to;
  }
  return out;
}

std::vector<double> positive_simplex(std::mt19937_64& rng, std::size_t n, double floor) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> w(n);
  for (double& x : w) x = expo(rng) + floor;
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

Measure normalized(std::vector<double> probs) {
  const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
  for (double& p : probs) p /= total;
  return Measure(std::move(probs));
}

}  // namespace

FilteredSpace random_space(std::mt19937_64& rng, const SpaceLimits& limits) {
  const std::size_t n = uniform_index(rng, std::max<std::size_t>(1, limits.min_atoms), limits.max_atoms);
  const int horizon = static_cast<int>(uniform_index(rng, 1, static_cast<std::size_t>(std::max(1, limits.max_periods))));

  Cell root(n);
  std::iota(root.begin(), root.end(), std::size_t{0});
  std::shuffle(root.begin(), root.end(), rng);

  std::vector<Partition> parts{{root}};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int m = 1; m <= horizon; ++m) {
    Partition next;
    for (const Cell& cell : parts.back()) {
      std::size_t pieces = 1;
      if (cell.size() > 1) {
        if (m == horizon && limits.fine_terminal)
          pieces = cell.size();
        else if (m == 1 || unit(rng) > 0.25)
          pieces = uniform_index(rng, 2, std::min<std::size_t>(cell.size(), 3));
      }
      if (pieces == 1) {
        next.push_back(cell);
      } else {
        for (Cell& c : split(cell, pieces, rng)) next.push_back(std::move(c));
      }
    }
    parts.push_back(std::move(next));
  }
  return FilteredSpace::build(n, std::move(parts));
}

MeasureFamily random_family(std::mt19937_64& rng, std::size_t n_atoms, std::size_t k, double floor) {
  std::vector<Measure> extremes;
  for (std::size_t i = 0; i < k; ++i)
    extremes.emplace_back(positive_simplex(rng, n_atoms, floor));
  return MeasureFamily(std::move(extremes));
}

MeasureFamily product_family(const FilteredSpace& space, std::mt19937_64& rng, std::size_t max_extremes) {
  struct Node {
    int m;  // successors live in F_m
    std::size_t s;
    std::vector<std::vector<double>> laws;
  };
  std::vector<Node> nodes;
  std::vector<std::vector<std::size_t>> node_index(static_cast<std::size_t>(space.horizon()) + 1);
  for (int m = 1; m <= space.horizon(); ++m) {
    node_index[static_cast<std::size_t>(m)].resize(space.cell_count(m - 1));
    for (std::size_t s = 0; s < space.cell_count(m - 1); ++s) {
      node_index[static_cast<std::size_t>(m)][s] = nodes.size();
      nodes.push_back({m, s, {}});
    }
  }

  std::vector<std::size_t> order(nodes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::size_t count = 1;
  for (std::size_t idx : order) {
    Node& node = nodes[idx];
    const std::size_t kids = space.successors(node.m, node.s).size();
    node.laws.push_back(positive_simplex(rng, kids, 0.2));
    if (kids > 1 && count * 2 <= max_extremes) {
      node.laws.push_back(positive_simplex(rng, kids, 0.2));
      count *= 2;
    }
  }

  // Mixed-radix enumeration of per-node choices.
  std::vector<std::size_t> choice(nodes.size(), 0);
  std::vector<Measure> extremes;
  for (std::size_t e = 0; e < count; ++e) {
    std::vector<double> probs(space.n_atoms(), 1.0);
    for (std::size_t a = 0; a < probs.size(); ++a)
      for (int m = 1; m <= space.horizon(); ++m) {
        const std::size_t s = space.cell_of(m - 1, a);
        const std::size_t child = space.cell_of(m, a);
        const Node& node = nodes[node_index[static_cast<std::size_t>(m)][s]];
        const auto& kids = space.successors(m, s);
        const auto pos = static_cast<std::size_t>(std::find(kids.begin(), kids.end(), child) - kids.begin());
        probs[a] *= node.laws[choice[node_index[static_cast<std::size_t>(m)][s]]][pos];
      }
    extremes.push_back(normalized(std::move(probs)));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (nodes[i].laws.size() == 1) continue;
      if (++choice[i] < nodes[i].laws.size()) break;
      choice[i] = 0;
    }
  }
  return MeasureFamily(std::move(extremes));
}

AdaptedProcess random_family_martingale(const FilteredSpace& space, const MeasureFamily& family, std::mt19937_64& rng,
                                        double scale, double start) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::vector<double>> values{{start}};
  for (int m = 1; m <= space.horizon(); ++m) {
    std::vector<double> now(space.cell_count(m), 0.0);
    for (std::size_t s = 0; s < space.cell_count(m - 1); ++s) {
      const auto& kids = space.successors(m, s);
      Eigen::MatrixXd a(static_cast<Eigen::Index>(family.size()), static_cast<Eigen::Index>(kids.size()));
      for (std::size_t i = 0; i < family.size(); ++i) {
        const double total = family[i].mass(space.cell(m - 1, s));
        for (std::size_t k = 0; k < kids.size(); ++k)
          a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = family[i].mass(space.cell(m, kids[k])) / total;
      }
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
      const auto& sigma = svd.singularValues();
      const double cutoff = 1e-10 * (sigma.size() > 0 ? sigma(0) : 1.0);
      Eigen::Index rank = 0;
      while (rank < sigma.size() && sigma(rank) > cutoff) ++rank;
      Eigen::VectorXd step = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(kids.size()));
      for (Eigen::Index j = rank; j < svd.matrixV().cols(); ++j) step += gauss(rng) * scale * svd.matrixV().col(j);
      for (std::size_t k = 0; k < kids.size(); ++k)
        now[kids[k]] = values.back()[s] + step(static_cast<Eigen::Index>(k));
    }
    values.push_back(std::move(now));
  }
  return AdaptedProcess(space, std::move(values));
}

SupermartingaleSample random_supermartingale(const FilteredSpace& space, const MeasureFamily& family,
                                             std::mt19937_64& rng, double margin) {
  const AdaptedProcess n = random_family_martingale(space, family, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<double>> g{{0.0}};
  for (int m = 1; m <= space.horizon(); ++m) {
    std::vector<double> now(space.cell_count(m));
    for (std::size_t c = 0; c < now.size(); ++c) {
      const double bump = unit(rng) < 0.7 ? 0.5 * unit(rng) : 0.0;
      now[c] = g.back()[space.predecessor(m, c)] + bump;
    }
    g.push_back(std::move(now));
  }

  double low = std::numeric_limits<double>::infinity();
  for (int m = 0; m <= space.horizon(); ++m)
    for (std::size_t c = 0; c < space.cell_count(m); ++c) low = std::min(low, n.value(m, c) - g[static_cast<std::size_t>(m)][c]);
  const double shift = margin - low;

  auto mart = n.per_time();
  auto f = n.per_time();
  for (std::size_t m = 0; m < mart.size(); ++m)
    for (std::size_t c = 0; c < mart[m].size(); ++c) {
      mart[m][c] += shift;
      f[m][c] = mart[m][c] - g[m][c];
    }
  return {AdaptedProcess(space, std::move(f)), AdaptedProcess(space, std::move(mart)),
          AdaptedProcess(space, std::move(g))};
}

A0Element random_a0_element(const MeasureFamily& family, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> objective(family.n_atoms());
  for (double& v : objective) v = gauss(rng);
  const A0Element vertex = find_a0_element(family, RandomVariable(std::move(objective)));
  const double t = std::uniform_real_distribution<double>(0.1, 1.0)(rng);
  std::vector<double> xi(family.n_atoms());
  for (std::size_t a = 0; a < xi.size(); ++a) xi[a] = (1.0 - t) + t * vertex.xi()[a];
  return A0Element(RandomVariable(std::move(xi)), family, 1e-10);
}

RandomVariable random_variable(std::mt19937_64& rng, std::size_t n_atoms, double low, double high) {
  std::uniform_real_distribution<double> dist(low, high);
  std::vector<double> v(n_atoms);
  for (double& x : v) x = dist(rng);
  return RandomVariable(std::move(v));
}

}  // namespace doobkit::gen
