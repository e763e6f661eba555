#pragma once

// Independent reference implementations used as test oracles. Everything here
// recomputes results by a deliberately different route than the library
// (dense matrices, Gauss elimination, explicit double loops, exhaustive
// enumeration) and must stay decoupled from the code under test.

#include <functional>
#include <vector>

#include "diffnet/estimate.hpp"
#include "diffnet/graph.hpp"
#include "diffnet/numkit.hpp"

namespace oracle {

using diffnet::DirectedGraph;
using diffnet::Matrix;
using diffnet::Vector;

// Dense linear solve by Gauss elimination with partial pivoting.
Vector gauss_solve(std::vector<Vector> a, Vector b);

// Central finite difference of a scalar function.
double central_difference(const std::function<double(double)>& f, double x, double h);

// All nodes j != i with a directed walk j -> ... -> i of length <= t,
// enumerated walk by walk.
std::vector<int> walk_reachable_into(const DirectedGraph& g, int i, int t);

// Sparsity pattern of B + B^2 + ... + B^t via dense boolean matrix powers,
// diagonal removed.
DirectedGraph bool_power_pattern(const DirectedGraph& g, int t);

// O(n^2) overlapping-pair enumeration via explicit set intersections.
std::vector<std::pair<int, int>> brute_overlapping_pairs(const DirectedGraph& g);

// Brute-force pair sum (1/n) sum over overlapping ordered pairs of
// r1[i1] * r2[i2], accumulated i1-major then i2-ascending.
double brute_pair_sum(const DirectedGraph& g, const Vector& r1, const Vector& r2);

// Coordinate-wise golden-section ascent on the population likelihood with
// omitted columns; independent of the library's Newton path.
Vector grid_polish_pseudo_gamma(const Matrix& X, const Vector& gamma0,
                                const std::vector<int>& omit);

// Exact ADM for tiny fixtures by enumerating initial actions and every
// threshold configuration of the shocks.
double exhaustive_adm(const DirectedGraph& contact, const Matrix& X, const Vector& gamma0,
                      const Vector& beta0, double delta0, int t1);

struct NaiveInfluence {
  Vector q, h, kappa1, kappa2;
  Matrix U, U_S;
};

// Straightforward re-implementation of the influence pieces from the fitted
// coefficients, using dense inverses.
NaiveInfluence naive_influence(const DirectedGraph& observed, const Matrix& X,
                               const std::vector<int>& y0, const std::vector<int>& y1,
                               const std::vector<int>& omit, const Vector& gamma_full,
                               const Vector& gamma_omit);

}  // namespace oracle
