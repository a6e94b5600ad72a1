#pragma once

// Independent reference implementations used only by the tests.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dtcausal/graph.hpp"

namespace dtc::testing {

std::string corpus(const std::string& name);

/// Random DAG on nodes V0..V{n-1}; each pair is joined with probability
/// p, oriented along a random permutation.
Dag random_dag(std::mt19937_64& rng, std::size_t n, double p);

/// x _||_ y | z by enumerating simple paths in the skeleton.
bool path_separated(const Dag& dag, const NodeSet& x, const NodeSet& y, const NodeSet& z);

/// Joint law of binary variables; state s has bit i set when variable i
/// takes value 1.
struct BinaryJoint {
  std::vector<std::string> names;
  std::vector<double> p;

  std::uint32_t mask(const NodeSet& vars) const;
};

/// Random binary CPTs on every node of `dag` (regimes included, as
/// ordinary founders), multiplied out state by state.
BinaryJoint random_binary_joint(const Dag& dag, std::mt19937_64& rng);

/// a _||_ b | c via p(a,b,c) p(c) = p(a,c) p(b,c) on every cell.
bool ci_holds(const BinaryJoint& joint, const NodeSet& a, const NodeSet& b, const NodeSet& c,
              double tol = 1e-12);

struct MeanSe {
  double mean = 0;
  double se = 0;
};

MeanSe mean_se(const std::vector<double>& xs);

}  // namespace dtc::testing
