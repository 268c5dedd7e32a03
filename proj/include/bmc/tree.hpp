#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace bmc {

//! Largest supported generation index; keeps 2^(k+1) representable in u64.
inline constexpr int max_generation = 62;

//! Index set A_n over which estimators sum: the last generation G_n or the
//! whole tree T_n.
enum class Population
{
  generation,
  tree
};

const char* to_string(Population p);
Population parse_population(const std::string& text);

//! Number of nodes in generation k, 2^k.
std::uint64_t generation_size(int k);

//! Number of nodes in generations 0..n, 2^(n+1) - 1.
std::uint64_t tree_size(int n);

//! A node u of the binary tree. Bit j of `rank` (counting from the most
//! significant of `generation` bits) is the j-th letter of u.
struct NodeId
{
  int generation = 0;
  std::uint64_t rank = 0;

  NodeId child(int i) const { return {generation + 1, 2 * rank + static_cast<std::uint64_t>(i)}; }
  NodeId parent() const { return {generation - 1, rank / 2}; }
  bool is_root() const { return generation == 0; }
  bool valid() const;

  friend bool operator==(const NodeId&, const NodeId&) = default;
};

//! Mother-daughters triple (X_u, X_u0, X_u1).
struct Triangle
{
  double parent = 0.0;
  double child0 = 0.0;
  double child1 = 0.0;

  friend bool operator==(const Triangle&, const Triangle&) = default;
};

//! Column-major view of a set of triangles, the layout the estimators scan.
struct TriangleColumns
{
  std::vector<double> parent;
  std::vector<double> child0;
  std::vector<double> child1;

  std::size_t size() const { return parent.size(); }
  bool empty() const { return parent.empty(); }
  Triangle at(std::size_t i) const { return {parent[i], child0[i], child1[i]}; }
  void push_back(const Triangle& t);
};

/// Values X_u for every node of generations 0..depth+1, stored in heap
/// order: generation k occupies [2^k - 1, 2^(k+1) - 1) ranked by `rank`.
///
/// A sample of depth n holds every triangle X_u^ with |u| <= n. The object
/// is immutable after construction.
class TreeSample
{
public:
  TreeSample(int depth, std::vector<double> values);

  int depth() const noexcept { return depth_; }
  std::size_t node_count() const noexcept { return values_.size(); }

  std::span<const double> level(int k) const;
  std::span<const double> values() const noexcept { return values_; }
  double value(const NodeId& u) const;

  Triangle triangle(const NodeId& u) const;

private:
  int depth_;
  std::vector<double> values_;
};

//! Triangles of the chosen population in level order.
std::vector<Triangle> triangles(const TreeSample& sample, Population population);
TriangleColumns triangle_columns(const TreeSample& sample, Population population);

//! Number of triangles in A_n for a sample of depth n.
std::uint64_t population_size(int depth, Population population);

//! The 2^m nodes uw with |w| = m, in rank order.
std::vector<NodeId> descendants_at_distance(const TreeSample& sample, const NodeId& u, int m);

//! CSV with header `generation,rank,value`, one node per row in level order.
void write_tree_csv(const TreeSample& sample, std::ostream& out);
void write_tree_csv(const TreeSample& sample, const std::string& path);
TreeSample read_tree_csv(std::istream& in);
TreeSample read_tree_csv(const std::string& path);

//! Raw dump: u32 depth followed by the heap-ordered values as little-endian f64.
void write_tree_binary(const TreeSample& sample, const std::string& path);
TreeSample read_tree_binary(const std::string& path);

} // namespace bmc
