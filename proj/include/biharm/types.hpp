#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>

namespace biharm {

using Vec3 = Eigen::Vector3d;
using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using SparseRowMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

} // namespace biharm
