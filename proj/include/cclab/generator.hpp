#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cclab/errors.hpp"
#include "cclab/operator.hpp"
#include "cclab/torus.hpp"

namespace cclab {

struct HolderData {
  double beta = 1.0;     // exponent in (0, 1]
  double constant = 0.0; // Hölder constant
};

// Generator A : T^2 -> GL(d, R) of a linear cocycle. Evaluation closures are
// pure, so generators are safe to copy and to evaluate concurrently.
class CocycleGenerator {
public:
  enum class Kind { constant, closed_form, grid_sampled };

  CocycleGenerator() = default;

  static CocycleGenerator constant(const Eigen::MatrixXd& m) {
    Operator::from_matrix(m);  // invertibility check up-front
    auto fn = [m](const TorusPoint&) { return m; };
    return CocycleGenerator(static_cast<int>(m.rows()), Kind::constant, std::move(fn),
                            HolderData{1.0, 0.0});
  }

  static CocycleGenerator closed_form(int dim, std::function<Eigen::MatrixXd(TorusPoint)> fn,
                                      std::optional<HolderData> holder = std::nullopt) {
    return CocycleGenerator(dim, Kind::closed_form, std::move(fn), holder);
  }

  // Bilinear interpolation on the torus grid; node (i, j) sits at
  // (i/n1, j/n2). Invertibility is validated on a 512^2 grid at load time.
  static CocycleGenerator grid_sampled(int dim, int n1, int n2,
                                       std::vector<Eigen::MatrixXd> nodes) {
    if (static_cast<int>(nodes.size()) != n1 * n2)
      throw DimensionMismatch("grid generator: expected n1*n2 node matrices");
    auto data = std::make_shared<GridData>(GridData{dim, n1, n2, std::move(nodes)});
    auto fn = [data](const TorusPoint& x) { return data->eval(x); };
    CocycleGenerator g(dim, Kind::grid_sampled, std::move(fn), std::nullopt);
    g.validate_grid();
    return g;
  }

  // Plain-text grid file: first line "d n1 n2", then n1*n2 rows of d*d
  // entries in row-major order (row index i*n2 + j for node (i, j)).
  static CocycleGenerator from_grid_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open grid file: " + path);
    int d = 0, n1 = 0, n2 = 0;
    if (!(in >> d >> n1 >> n2) || d < 1 || n1 < 1 || n2 < 1)
      throw ConfigError("grid file header must be 'd n1 n2': " + path);
    std::vector<Eigen::MatrixXd> nodes;
    nodes.reserve(static_cast<std::size_t>(n1) * n2);
    for (int r = 0; r < n1 * n2; ++r) {
      Eigen::MatrixXd m(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
          if (!(in >> m(i, j)))
            throw ConfigError("grid file truncated at node row " + std::to_string(r));
      nodes.push_back(std::move(m));
    }
    return grid_sampled(d, n1, n2, std::move(nodes));
  }

  int dim() const { return dim_; }
  Kind kind() const { return kind_; }
  const std::optional<HolderData>& holder() const { return holder_; }

  Eigen::MatrixXd eval_mat(const TorusPoint& x) const { return fn_(reduce(x)); }
  Operator eval(const TorusPoint& x) const { return Operator::from_matrix(eval_mat(x)); }

private:
  struct GridData {
    int d, n1, n2;
    std::vector<Eigen::MatrixXd> nodes;

    const Eigen::MatrixXd& node(int i, int j) const {
      i %= n1;
      if (i < 0) i += n1;
      j %= n2;
      if (j < 0) j += n2;
      return nodes[static_cast<std::size_t>(i) * n2 + j];
    }
    Eigen::MatrixXd eval(const TorusPoint& p) const {
      double u = p.x1 * n1, v = p.x2 * n2;
      int i0 = static_cast<int>(std::floor(u)), j0 = static_cast<int>(std::floor(v));
      double fu = u - std::floor(u), fv = v - std::floor(v);
      return (1 - fu) * (1 - fv) * node(i0, j0) + fu * (1 - fv) * node(i0 + 1, j0) +
             (1 - fu) * fv * node(i0, j0 + 1) + fu * fv * node(i0 + 1, j0 + 1);
    }
  };

  CocycleGenerator(int dim, Kind kind, std::function<Eigen::MatrixXd(TorusPoint)> fn,
                   std::optional<HolderData> holder)
      : dim_(dim), kind_(kind), fn_(std::move(fn)), holder_(holder) {}

  void validate_grid() const {
    const int n = 512;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        TorusPoint p{static_cast<double>(i) / n, static_cast<double>(j) / n};
        eval(p);  // throws SingularProduct on failure
      }
  }

  int dim_ = 0;
  Kind kind_ = Kind::constant;
  std::function<Eigen::MatrixXd(TorusPoint)> fn_;
  std::optional<HolderData> holder_;
};

}  // namespace cclab
