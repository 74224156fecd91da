#pragma once

#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace cvfix {

/// A vector-valued function on a uniform grid over [lower, upper]: one row per
/// node, one column per component. Immutable by convention -- operations on
/// grid functions return new values.
struct GridFunction {
  double lower = 0.0;
  double upper = 1.0;
  Eigen::MatrixXd values;  // node_count x component_count

  Eigen::Index node_count() const { return values.rows(); }
  Eigen::Index component_count() const { return values.cols(); }

  double step() const {
    return (upper - lower) / static_cast<double>(node_count() - 1);
  }

  double node(Eigen::Index j) const { return lower + static_cast<double>(j) * step(); }

  void validate() const {
    if (!(lower <= upper)) {
      throw std::invalid_argument("GridFunction: interval endpoints out of order");
    }
    if (node_count() < 2) {
      throw std::invalid_argument("GridFunction: need at least 2 grid nodes");
    }
    if (component_count() < 1) {
      throw std::invalid_argument("GridFunction: need at least 1 component");
    }
    if (!values.allFinite()) {
      throw std::invalid_argument("GridFunction: values must be finite");
    }
  }

  static GridFunction zeros(double lower, double upper, Eigen::Index nodes,
                            Eigen::Index components) {
    GridFunction g{lower, upper, Eigen::MatrixXd::Zero(nodes, components)};
    g.validate();
    return g;
  }

  /// Samples a callable t -> row vector of component values on the grid.
  static GridFunction sample(double lower, double upper, Eigen::Index nodes,
                             Eigen::Index components,
                             const std::function<Eigen::VectorXd(double)>& fn) {
    GridFunction g = zeros(lower, upper, nodes, components);
    for (Eigen::Index j = 0; j < nodes; ++j) {
      g.values.row(j) = fn(g.node(j)).transpose();
    }
    g.validate();
    return g;
  }

  /// slope * t in every component.
  static GridFunction linear_ramp(double lower, double upper, Eigen::Index nodes,
                                  Eigen::Index components, double slope) {
    GridFunction g = zeros(lower, upper, nodes, components);
    for (Eigen::Index j = 0; j < nodes; ++j) {
      g.values.row(j).setConstant(slope * g.node(j));
    }
    return g;
  }
};

inline bool conformant(const GridFunction& x, const GridFunction& y) {
  return x.lower == y.lower && x.upper == y.upper && x.node_count() == y.node_count() &&
         x.component_count() == y.component_count();
}

inline void require_conformant(const GridFunction& x, const GridFunction& y,
                               const char* where) {
  if (!conformant(x, y)) {
    throw std::invalid_argument(std::string(where) + ": grid functions live on different grids");
  }
}

/// max over nodes of the max-norm of the row.
inline double sup_norm(const GridFunction& x) {
  return x.values.cwiseAbs().maxCoeff();
}

inline double sup_distance(const GridFunction& x, const GridFunction& y) {
  require_conformant(x, y, "sup_distance");
  return (x.values - y.values).cwiseAbs().maxCoeff();
}

/// CSV layout: header line, then one row per node with the node coordinate in
/// the first column and the components after it. Full round-trip precision.
inline void write_grid_csv(const GridFunction& x, std::ostream& out) {
  out << "t";
  for (Eigen::Index c = 0; c < x.component_count(); ++c) {
    out << ",x" << (c + 1);
  }
  out << '\n';
  char buf[64];
  for (Eigen::Index j = 0; j < x.node_count(); ++j) {
    std::snprintf(buf, sizeof(buf), "%.17g", x.node(j));
    out << buf;
    for (Eigen::Index c = 0; c < x.component_count(); ++c) {
      std::snprintf(buf, sizeof(buf), ",%.17g", x.values(j, c));
      out << buf;
    }
    out << '\n';
  }
}

/// Reads the layout produced by write_grid_csv (a leading header line is
/// detected and skipped). The grid is taken from the first column; it must be
/// uniform to within a relative 1e-9.
inline GridFunction read_grid_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<double> row;
    std::string cell;
    bool numeric = true;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header
      throw std::invalid_argument("read_grid_csv: non-numeric cell in data row");
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::invalid_argument("read_grid_csv: ragged rows");
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2 || rows.front().size() < 2) {
    throw std::invalid_argument("read_grid_csv: need at least 2 rows and 2 columns");
  }

  const Eigen::Index nodes = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index comps = static_cast<Eigen::Index>(rows.front().size()) - 1;
  GridFunction g = GridFunction::zeros(rows.front()[0], rows.back()[0], nodes, comps);
  for (Eigen::Index j = 0; j < nodes; ++j) {
    const double t = rows[static_cast<std::size_t>(j)][0];
    if (std::abs(t - g.node(j)) > 1e-9 * std::max(1.0, std::abs(g.upper - g.lower))) {
      throw std::invalid_argument("read_grid_csv: grid is not uniform at row " +
                                  std::to_string(j));
    }
    for (Eigen::Index c = 0; c < comps; ++c) {
      g.values(j, c) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(c) + 1];
    }
  }
  g.validate();
  return g;
}

}  // namespace cvfix
