#include "subreg/instance_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace subreg {

namespace {

constexpr const char* kMagic = "subreg-instance";
constexpr const char* kVersion = "v1";

void put_vec(std::ostream& os, const char* key, const Vec& v) {
  os << key;
  for (int i = 0; i < v.size(); ++i) os << ' ' << format_double(v[i]);
  os << '\n';
}

void put_mat_rows(std::ostream& os, const char* key, const Mat& m) {
  for (int r = 0; r < m.rows(); ++r) {
    os << key;
    for (int c = 0; c < m.cols(); ++c) os << ' ' << format_double(m(r, c));
    os << '\n';
  }
}

[[noreturn]] void fail(const std::string& what) {
  throw std::runtime_error("instance file: " + what);
}

std::string expect_token(std::istream& is, const char* context) {
  std::string tok;
  if (!(is >> tok)) fail(std::string("unexpected end of input, wanted ") + context);
  return tok;
}

void expect_keyword(std::istream& is, const char* kw) {
  const std::string tok = expect_token(is, kw);
  if (tok != kw) fail("expected '" + std::string(kw) + "', got '" + tok + "'");
}

double expect_double(std::istream& is, const char* context) {
  double v;
  if (!(is >> v)) fail(std::string("bad number for ") + context);
  return v;
}

int expect_int(std::istream& is, const char* context) {
  int v;
  if (!(is >> v)) fail(std::string("bad integer for ") + context);
  return v;
}

Vec read_vec(std::istream& is, const char* kw, int len) {
  expect_keyword(is, kw);
  Vec v(len);
  for (int i = 0; i < len; ++i) v[i] = expect_double(is, kw);
  return v;
}

Mat read_mat_rows(std::istream& is, const char* kw, int rows, int cols) {
  Mat m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    expect_keyword(is, kw);
    for (int c = 0; c < cols; ++c) m(r, c) = expect_double(is, kw);
  }
  return m;
}

void write_objective(std::ostream& os, const Objective& f) {
  switch (f.family()) {
    case Family::coverage: {
      const auto& cov = static_cast<const CoverageObjective&>(f);
      os << "universe " << cov.universe_size() << '\n';
      os << "sets " << cov.num_sets() << '\n';
      put_vec(os, "weights", cov.instance().universe_weights);
      for (int i = 0; i < cov.num_sets(); ++i) {
        const auto& s = cov.instance().sets[i];
        os << "set " << i << ' ' << s.size();
        for (int u : s) os << ' ' << u;
        os << '\n';
      }
      return;
    }
    case Family::nqp: {
      const auto& nqp = static_cast<const NqpObjective&>(f);
      os << "n " << nqp.u().size() << '\n';
      put_mat_rows(os, "h", nqp.h());
      put_vec(os, "u", nqp.u());
      return;
    }
    case Family::dopt: {
      const auto& dopt = static_cast<const DoptObjective&>(f);
      os << "n " << dopt.designs().rows() << '\n';
      os << "designs " << dopt.designs().cols() << '\n';
      os << "ridge " << format_double(dopt.ridge()) << '\n';
      // One line per design vector (a column of the matrix).
      put_mat_rows(os, "x", dopt.designs().transpose());
      return;
    }
    case Family::custom:
      throw std::invalid_argument("write_bundle: custom objectives have no schema");
  }
  throw std::logic_error("write_objective: bad family");
}

std::unique_ptr<const Objective> read_objective(std::istream& is, Family family) {
  switch (family) {
    case Family::coverage: {
      expect_keyword(is, "universe");
      const int universe = expect_int(is, "universe");
      expect_keyword(is, "sets");
      const int num_sets = expect_int(is, "sets");
      CoverageInstance inst;
      inst.universe_weights = read_vec(is, "weights", universe);
      inst.sets.assign(num_sets, {});
      for (int i = 0; i < num_sets; ++i) {
        expect_keyword(is, "set");
        const int idx = expect_int(is, "set index");
        if (idx != i) fail("set blocks out of order");
        const int count = expect_int(is, "set size");
        inst.sets[i].resize(count);
        for (int k = 0; k < count; ++k) inst.sets[i][k] = expect_int(is, "set element");
      }
      return std::make_unique<CoverageObjective>(std::move(inst));
    }
    case Family::nqp: {
      expect_keyword(is, "n");
      const int n = expect_int(is, "n");
      NqpInstance inst;
      inst.h = read_mat_rows(is, "h", n, n);
      inst.u = read_vec(is, "u", n);
      return std::make_unique<NqpObjective>(std::move(inst));
    }
    case Family::dopt: {
      expect_keyword(is, "n");
      const int n = expect_int(is, "n");
      expect_keyword(is, "designs");
      const int count = expect_int(is, "designs");
      expect_keyword(is, "ridge");
      DOptInstance inst;
      inst.ridge_eps = expect_double(is, "ridge");
      inst.designs = read_mat_rows(is, "x", count, n).transpose();
      return std::make_unique<DoptObjective>(std::move(inst));
    }
    case Family::custom:
      fail("custom objectives have no schema");
  }
  throw std::logic_error("read_objective: bad family");
}

}  // namespace

void write_bundle(std::ostream& os, const InstanceBundle& bundle) {
  os << kMagic << ' ' << kVersion << '\n';
  os << "family " << family_name(bundle.family) << '\n';
  os << "rounds " << bundle.horizon() << '\n';
  os << "polytope\n";
  os << "rows " << bundle.polytope.num_rows() << '\n';
  os << "dim " << bundle.polytope.dim() << '\n';
  put_mat_rows(os, "a", bundle.polytope.a_matrix());
  put_vec(os, "b", bundle.polytope.b_vector());
  put_vec(os, "box_lower", bundle.polytope.box().lower());
  put_vec(os, "box_upper", bundle.polytope.box().upper());
  for (int t = 0; t < bundle.horizon(); ++t) {
    os << "instance " << t << '\n';
    write_objective(os, *bundle.objectives[t]);
  }
  os << "end\n";
  if (!os) fail("write failed");
}

InstanceBundle read_bundle(std::istream& is) {
  expect_keyword(is, kMagic);
  const std::string version = expect_token(is, "version");
  if (version != kVersion) fail("unsupported version '" + version + "'");
  expect_keyword(is, "family");
  const Family family = parse_family(expect_token(is, "family name"));
  expect_keyword(is, "rounds");
  const int rounds = expect_int(is, "rounds");
  if (rounds < 0) fail("negative round count");
  expect_keyword(is, "polytope");
  expect_keyword(is, "rows");
  const int rows = expect_int(is, "rows");
  expect_keyword(is, "dim");
  const int dim = expect_int(is, "dim");
  if (dim <= 0 || rows < 0) fail("bad polytope shape");
  const Mat a = read_mat_rows(is, "a", rows, dim);
  const Vec b = read_vec(is, "b", rows);
  const Vec lower = read_vec(is, "box_lower", dim);
  const Vec upper = read_vec(is, "box_upper", dim);

  InstanceBundle bundle{family, Polytope(a, b, Box(lower, upper)), {}};
  bundle.objectives.reserve(rounds);
  for (int t = 0; t < rounds; ++t) {
    expect_keyword(is, "instance");
    if (expect_int(is, "instance index") != t) fail("instance blocks out of order");
    bundle.objectives.push_back(read_objective(is, family));
  }
  expect_keyword(is, "end");
  return bundle;
}

void write_bundle_file(const std::string& path, const InstanceBundle& bundle) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_bundle(os, bundle);
  os.flush();
  if (!os) throw std::runtime_error("write failed: " + path);
}

InstanceBundle read_bundle_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open: " + path);
  return read_bundle(is);
}

}  // namespace subreg
