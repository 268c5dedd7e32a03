#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bmc/error.hpp"
#include "bmc/tree.hpp"

#include <cstdio>
#include <filesystem>
#include <numeric>
#include <set>
#include <sstream>

using namespace bmc;

namespace {

TreeSample
iota_tree(int depth)
{
  std::vector<double> v(tree_size(depth + 1));
  std::iota(v.begin(), v.end(), 0.0);
  return TreeSample(depth, std::move(v));
}

std::string
temp_path(const char* name)
{
  return (std::filesystem::temp_directory_path() / name).string();
}

} // namespace

TEST_CASE("generation and tree sizes")
{
  CHECK(generation_size(0) == 1);
  CHECK(generation_size(3) == 8);
  CHECK(generation_size(10) == 1024);
  CHECK(tree_size(0) == 1);
  CHECK(tree_size(3) == 15);
  CHECK(tree_size(11) == 4095);
  CHECK_THROWS_AS(generation_size(-1), InvalidArgument);
  CHECK_THROWS_AS(generation_size(63), OutOfRange);
  CHECK(tree_size(62) == (std::uint64_t{ 1 } << 63) - 1);
  CHECK_THROWS_AS(tree_size(63), OutOfRange);
  CHECK(generation_size(62) == (std::uint64_t{ 1 } << 62));
}

TEST_CASE("node arithmetic")
{
  const NodeId root{ 0, 0 };
  CHECK(root.is_root());
  CHECK(root.child(0) == NodeId{ 1, 0 });
  CHECK(root.child(1) == NodeId{ 1, 1 });
  for (int k = 0; k < 6; ++k)
    for (std::uint64_t r = 0; r < generation_size(k); ++r) {
      const NodeId u{ k, r };
      CHECK(u.valid());
      CHECK(u.child(0).parent() == u);
      CHECK(u.child(1).parent() == u);
    }
  CHECK_FALSE(NodeId{ 2, 4 }.valid());
  CHECK_FALSE(NodeId{ -1, 0 }.valid());
}

TEST_CASE("children of a generation enumerate the next one exactly once")
{
  for (int k = 0; k < 8; ++k) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t r = 0; r < generation_size(k); ++r)
      for (int i = 0; i < 2; ++i) {
        const NodeId c = NodeId{ k, r }.child(i);
        CHECK(c.generation == k + 1);
        seen.insert(c.rank);
      }
    CHECK(seen.size() == generation_size(k + 1));
    CHECK(*seen.rbegin() == generation_size(k + 1) - 1);
  }
}

TEST_CASE("sample storage")
{
  const TreeSample s = iota_tree(2);
  CHECK(s.depth() == 2);
  CHECK(s.node_count() == 15);
  CHECK(s.level(0).size() == 1);
  CHECK(s.level(3).size() == 8);
  CHECK(s.level(2)[0] == 3.0);
  CHECK(s.value({ 1, 1 }) == 2.0);
  CHECK(s.triangle({ 1, 1 }) == Triangle{ 2.0, 5.0, 6.0 });
  CHECK_THROWS_AS(s.level(4), OutOfRange);
  CHECK_THROWS_AS(s.triangle({ 3, 0 }), OutOfRange);
  CHECK_THROWS_AS(TreeSample(2, std::vector<double>(14)), InvalidArgument);
  CHECK_THROWS_AS(TreeSample(-1, {}), InvalidArgument);
}

TEST_CASE("triangles of each population")
{
  const TreeSample s0 = iota_tree(0);
  const auto g0 = triangles(s0, Population::generation);
  REQUIRE(g0.size() == 1);
  CHECK(g0[0] == Triangle{ 0.0, 1.0, 2.0 });

  const TreeSample s = iota_tree(2);
  const auto gen = triangles(s, Population::generation);
  REQUIRE(gen.size() == 4);
  for (std::size_t r = 0; r < 4; ++r) {
    CHECK(gen[r].parent == s.level(2)[r]);
    CHECK(gen[r].child0 == s.level(3)[2 * r]);
    CHECK(gen[r].child1 == s.level(3)[2 * r + 1]);
  }

  const auto tree = triangles(s, Population::tree);
  CHECK(tree.size() == 7);
  CHECK(population_size(2, Population::tree) == 7);
  CHECK(population_size(2, Population::generation) == 4);
  // The tree population is the disjoint union of the generation ones, in level order.
  std::size_t i = 0;
  for (int k = 0; k <= 2; ++k)
    for (std::uint64_t r = 0; r < generation_size(k); ++r, ++i)
      CHECK(tree[i] == s.triangle({ k, r }));

  const auto cols = triangle_columns(s, Population::tree);
  REQUIRE(cols.size() == tree.size());
  for (std::size_t j = 0; j < cols.size(); ++j)
    CHECK(cols.at(j) == tree[j]);
}

TEST_CASE("descendants at distance")
{
  const TreeSample s = iota_tree(3);
  const auto g2 = descendants_at_distance(s, { 0, 0 }, 2);
  REQUIRE(g2.size() == 4);
  for (std::uint64_t r = 0; r < 4; ++r)
    CHECK(g2[r] == NodeId{ 2, r });

  const auto kids = descendants_at_distance(s, { 1, 1 }, 1);
  REQUIRE(kids.size() == 2);
  CHECK(kids[0] == NodeId{ 2, 2 });
  CHECK(kids[1] == NodeId{ 2, 3 });

  const auto self = descendants_at_distance(s, { 2, 3 }, 0);
  REQUIRE(self.size() == 1);
  CHECK(self[0] == NodeId{ 2, 3 });

  CHECK(descendants_at_distance(s, { 1, 0 }, 3).size() == 8);
  CHECK_THROWS_AS(descendants_at_distance(s, { 1, 0 }, 4), OutOfRange);
  CHECK_THROWS_AS(descendants_at_distance(s, { 1, 0 }, -1), InvalidArgument);
}

TEST_CASE("csv round trip is exact")
{
  std::vector<double> v(tree_size(4));
  for (std::size_t i = 0; i < v.size(); ++i)
    v[i] = std::sin(0.37 * static_cast<double>(i)) * 1e3 / 7.0 + 1e-17 * static_cast<double>(i);
  const TreeSample s(3, v);
  std::stringstream buf;
  write_tree_csv(s, buf);
  CHECK(buf.str().rfind("generation,rank,value\n", 0) == 0);
  const TreeSample back = read_tree_csv(buf);
  CHECK(back.depth() == 3);
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(back.values()[i] == v[i]);

  const std::string path = temp_path("bmc_test_tree.csv");
  write_tree_csv(s, path);
  const TreeSample from_file = read_tree_csv(path);
  CHECK(std::equal(v.begin(), v.end(), from_file.values().begin()));
  std::remove(path.c_str());
}

TEST_CASE("csv reader rejects malformed input")
{
  std::stringstream bad_header("gen,rank,value\n0,0,1\n");
  CHECK_THROWS_AS(read_tree_csv(bad_header), InvalidArgument);
  std::stringstream missing("generation,rank,value\n0,0,1\n1,0,2\n");
  CHECK_THROWS_AS(read_tree_csv(missing), InvalidArgument);
  std::stringstream dup("generation,rank,value\n0,0,1\n1,0,2\n1,0,3\n");
  CHECK_THROWS_AS(read_tree_csv(dup), InvalidArgument);
  std::stringstream junk("generation,rank,value\n0,0,abc\n1,0,2\n1,1,3\n");
  CHECK_THROWS_AS(read_tree_csv(junk), InvalidArgument);
  // Rows may come in any order.
  std::stringstream shuffled("generation,rank,value\n1,1,3\n0,0,1\n1,0,2\n");
  const TreeSample s = read_tree_csv(shuffled);
  CHECK(s.triangle({ 0, 0 }) == Triangle{ 1.0, 2.0, 3.0 });
  CHECK_THROWS_AS(read_tree_csv(std::string("/nonexistent/dir/tree.csv")), IoError);
}

TEST_CASE("binary round trip is exact")
{
  const TreeSample s = iota_tree(5);
  const std::string path = temp_path("bmc_test_tree.bin");
  write_tree_binary(s, path);
  const TreeSample back = read_tree_binary(path);
  CHECK(back.depth() == 5);
  CHECK(std::equal(s.values().begin(), s.values().end(), back.values().begin()));
  std::filesystem::resize_file(path, 20);
  CHECK_THROWS_AS(read_tree_binary(path), InvalidArgument);
  std::remove(path.c_str());
}
