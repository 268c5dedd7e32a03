#include "bmc/tree.hpp"

#include "bmc/error.hpp"
#include "bmc/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace bmc {

const char*
to_string(Population p)
{
  return p == Population::generation ? "gen" : "tree";
}

Population
parse_population(const std::string& text)
{
  if (text == "gen" || text == "generation" || text == "GEN_N")
    return Population::generation;
  if (text == "tree" || text == "TREE_N")
    return Population::tree;
  throw InvalidArgument("unknown population '" + text + "' (expected gen|tree)");
}

std::uint64_t
generation_size(int k)
{
  if (k < 0)
    throw InvalidArgument("generation index must be >= 0");
  if (k > max_generation)
    throw OutOfRange("generation " + std::to_string(k) + " exceeds the supported depth " +
                     std::to_string(max_generation));
  return std::uint64_t{1} << k;
}

std::uint64_t
tree_size(int n)
{
  if (n < 0)
    throw InvalidArgument("tree depth must be >= 0");
  if (n > max_generation)
    throw OutOfRange("tree depth " + std::to_string(n) + " exceeds the supported depth " +
                     std::to_string(max_generation));
  return (std::uint64_t{1} << (n + 1)) - 1;
}

bool
NodeId::valid() const
{
  return generation >= 0 && generation <= max_generation &&
         rank < (std::uint64_t{1} << generation);
}

void
TriangleColumns::push_back(const Triangle& t)
{
  parent.push_back(t.parent);
  child0.push_back(t.child0);
  child1.push_back(t.child1);
}

namespace {

std::size_t
heap_index(const NodeId& u)
{
  return static_cast<std::size_t>((std::uint64_t{1} << u.generation) - 1 + u.rank);
}

} // namespace

TreeSample::TreeSample(int depth, std::vector<double> values)
  : depth_(depth)
  , values_(std::move(values))
{
  if (depth < 0)
    throw InvalidArgument("tree depth must be >= 0");
  if (depth + 1 > max_generation)
    throw OutOfRange("tree depth " + std::to_string(depth) + " is too large");
  const auto expected = tree_size(depth + 1);
  if (values_.size() != expected)
    throw InvalidArgument("a depth-" + std::to_string(depth) + " sample needs " +
                          std::to_string(expected) + " values, got " +
                          std::to_string(values_.size()));
}

std::span<const double>
TreeSample::level(int k) const
{
  if (k < 0 || k > depth_ + 1)
    throw OutOfRange("level " + std::to_string(k) + " is not stored");
  const auto offset = (std::size_t{1} << k) - 1;
  return std::span<const double>(values_).subspan(offset, std::size_t{1} << k);
}

double
TreeSample::value(const NodeId& u) const
{
  if (!u.valid() || u.generation > depth_ + 1)
    throw OutOfRange("node (" + std::to_string(u.generation) + "," + std::to_string(u.rank) +
                     ") is not stored");
  return values_[heap_index(u)];
}

Triangle
TreeSample::triangle(const NodeId& u) const
{
  if (!u.valid() || u.generation > depth_)
    throw OutOfRange("triangle rooted at generation " + std::to_string(u.generation) +
                     " is not stored");
  const auto i = heap_index(u);
  return {values_[i], values_[2 * i + 1], values_[2 * i + 2]};
}

std::uint64_t
population_size(int depth, Population population)
{
  return population == Population::generation ? generation_size(depth) : tree_size(depth);
}

namespace {

template<class Sink>
void
for_each_triangle(const TreeSample& sample, Population population, Sink&& sink)
{
  const int n = sample.depth();
  const int first = population == Population::generation ? n : 0;
  const auto values = sample.values();
  for (int k = first; k <= n; ++k) {
    const std::size_t begin = (std::size_t{1} << k) - 1;
    const std::size_t end = (std::size_t{1} << (k + 1)) - 1;
    for (std::size_t i = begin; i < end; ++i)
      sink(Triangle{values[i], values[2 * i + 1], values[2 * i + 2]});
  }
}

} // namespace

std::vector<Triangle>
triangles(const TreeSample& sample, Population population)
{
  std::vector<Triangle> out;
  out.reserve(population_size(sample.depth(), population));
  for_each_triangle(sample, population, [&](const Triangle& t) { out.push_back(t); });
  return out;
}

TriangleColumns
triangle_columns(const TreeSample& sample, Population population)
{
  TriangleColumns cols;
  const auto count = population_size(sample.depth(), population);
  cols.parent.reserve(count);
  cols.child0.reserve(count);
  cols.child1.reserve(count);
  for_each_triangle(sample, population, [&](const Triangle& t) { cols.push_back(t); });
  return cols;
}

std::vector<NodeId>
descendants_at_distance(const TreeSample& sample, const NodeId& u, int m)
{
  if (m < 0)
    throw InvalidArgument("distance must be >= 0");
  if (!u.valid())
    throw InvalidArgument("invalid node");
  if (u.generation + m > sample.depth() + 1)
    throw OutOfRange("descendants at distance " + std::to_string(m) + " of generation " +
                     std::to_string(u.generation) + " exceed the stored depth");
  const auto count = std::uint64_t{1} << m;
  std::vector<NodeId> out;
  out.reserve(count);
  for (std::uint64_t w = 0; w < count; ++w)
    out.push_back({u.generation + m, (u.rank << m) | w});
  return out;
}

void
write_tree_csv(const TreeSample& sample, std::ostream& out)
{
  out << "generation,rank,value\n";
  for (int k = 0; k <= sample.depth() + 1; ++k) {
    const auto lvl = sample.level(k);
    for (std::size_t r = 0; r < lvl.size(); ++r)
      out << k << ',' << r << ',' << io::format_double(lvl[r]) << '\n';
  }
}

void
write_tree_csv(const TreeSample& sample, const std::string& path)
{
  std::ostringstream ss;
  write_tree_csv(sample, ss);
  io::atomic_write_file(path, ss.str());
}

TreeSample
read_tree_csv(std::istream& in)
{
  std::string line;
  if (!std::getline(in, line))
    throw InvalidArgument("tree CSV is empty");
  if (!line.empty() && line.back() == '\r')
    line.pop_back();
  if (line != "generation,rank,value")
    throw InvalidArgument("tree CSV header must be 'generation,rank,value'");

  std::vector<double> values;
  std::vector<bool> seen;
  int max_gen = -1;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r")
      continue;
    const auto fields = io::split_csv_line(line);
    if (fields.size() != 3)
      throw InvalidArgument("line " + std::to_string(line_no) + ": expected 3 fields");
    NodeId u;
    try {
      u.generation = static_cast<int>(io::parse_integer(fields[0]));
      const auto rank = io::parse_integer(fields[1]);
      if (rank < 0)
        throw InvalidArgument("negative rank");
      u.rank = static_cast<std::uint64_t>(rank);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!u.valid() || u.generation >= max_generation)
      throw InvalidArgument("line " + std::to_string(line_no) + ": invalid node");
    const auto idx = heap_index(u);
    if (idx >= values.size()) {
      values.resize((std::size_t{1} << (u.generation + 1)) - 1, 0.0);
      seen.resize(values.size(), false);
    }
    if (seen[idx])
      throw InvalidArgument("line " + std::to_string(line_no) + ": duplicate node");
    try {
      values[idx] = io::parse_double(fields[2]);
    } catch (const InvalidArgument& e) {
      throw InvalidArgument("line " + std::to_string(line_no) + ": " + e.what());
    }
    seen[idx] = true;
    max_gen = std::max(max_gen, u.generation);
  }
  if (max_gen < 1)
    throw InvalidArgument("tree CSV must contain at least generations 0 and 1");
  values.resize((std::size_t{1} << (max_gen + 1)) - 1, 0.0);
  seen.resize(values.size(), false);
  for (std::size_t i = 0; i < seen.size(); ++i)
    if (!seen[i])
      throw InvalidArgument("tree CSV is missing node with heap index " + std::to_string(i));
  return TreeSample(max_gen - 1, std::move(values));
}

TreeSample
read_tree_csv(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open '" + path + "'");
  return read_tree_csv(in);
}

namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

std::uint64_t
to_little(std::uint64_t v)
{
  if constexpr (std::endian::native == std::endian::little)
    return v;
  else
    return __builtin_bswap64(v);
}

} // namespace

void
write_tree_binary(const TreeSample& sample, const std::string& path)
{
  std::string buffer;
  buffer.resize(4 + 8 * sample.node_count());
  const auto depth = static_cast<std::uint32_t>(sample.depth());
  for (int b = 0; b < 4; ++b)
    buffer[b] = static_cast<char>((depth >> (8 * b)) & 0xff);
  std::size_t offset = 4;
  for (double v : sample.values()) {
    const auto bits = to_little(std::bit_cast<std::uint64_t>(v));
    std::memcpy(buffer.data() + offset, &bits, 8);
    offset += 8;
  }
  io::atomic_write_file(path, buffer);
}

TreeSample
read_tree_binary(const std::string& path)
{
  const auto buffer = io::read_file(path);
  if (buffer.size() < 4)
    throw InvalidArgument("binary tree file is truncated");
  std::uint32_t depth = 0;
  for (int b = 0; b < 4; ++b)
    depth |= static_cast<std::uint32_t>(static_cast<unsigned char>(buffer[b])) << (8 * b);
  if (depth + 1 >= static_cast<std::uint32_t>(max_generation))
    throw InvalidArgument("binary tree depth out of range");
  const auto count = tree_size(static_cast<int>(depth) + 1);
  if (buffer.size() != 4 + 8 * count)
    throw InvalidArgument("binary tree file size does not match its depth");
  std::vector<double> values(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, buffer.data() + 4 + 8 * i, 8);
    values[i] = std::bit_cast<double>(to_little(bits));
  }
  return TreeSample(static_cast<int>(depth), std::move(values));
}

} // namespace bmc
