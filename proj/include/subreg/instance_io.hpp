#ifndef SUBREG_INSTANCE_IO_HPP
#define SUBREG_INSTANCE_IO_HPP

#include <iosfwd>
#include <memory>
#include <vector>

#include "subreg/objectives.hpp"
#include "subreg/polytope.hpp"

namespace subreg {

// One experiment episode: the (fixed) feasible set plus the per-round reward
// functions, in play order.
struct InstanceBundle {
  Family family;
  Polytope polytope;
  std::vector<std::unique_ptr<const Objective>> objectives;

  int horizon() const { return static_cast<int>(objectives.size()); }
};

// Plain-text format: a version line, the family, the polytope block, then one
// block per round (row-major matrices, %.17g so doubles round-trip exactly).
// Custom objectives have no schema and are rejected.
void write_bundle(std::ostream& os, const InstanceBundle& bundle);
InstanceBundle read_bundle(std::istream& is);

void write_bundle_file(const std::string& path, const InstanceBundle& bundle);
InstanceBundle read_bundle_file(const std::string& path);

}  // namespace subreg

#endif
