#include "qmcst/pointset.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace qmcst {

namespace {

void check_unit(double x) {
  if (!(x >= 0.0 && x < 1.0)) {
    throw PreconditionError("point coordinate outside [0,1): " + format_double(x));
  }
}

}  // namespace

PointSet::PointSet(int d, PointSetMeta meta) : d_(d), meta_(std::move(meta)) {
  if (d < 1) throw PreconditionError("point set dimension must be >= 1");
}

PointSet::PointSet(int d, std::vector<double> coords, PointSetMeta meta)
    : d_(d), coords_(std::move(coords)), meta_(std::move(meta)) {
  if (d < 1) throw PreconditionError("point set dimension must be >= 1");
  if (coords_.size() % static_cast<std::size_t>(d) != 0) {
    throw PreconditionError("coordinate count is not a multiple of the dimension");
  }
  for (double x : coords_) check_unit(x);
}

void PointSet::push_back(std::span<const double> p) {
  if (static_cast<int>(p.size()) != d_) throw PreconditionError("point dimension mismatch");
  for (double x : p) check_unit(x);
  coords_.insert(coords_.end(), p.begin(), p.end());
}

PointSet PointSet::subset(std::span<const std::uint32_t> rows) const {
  PointSet out(d_, meta_);
  out.coords_.reserve(rows.size() * static_cast<std::size_t>(d_));
  for (auto r : rows) {
    auto p = point(r);
    out.coords_.insert(out.coords_.end(), p.begin(), p.end());
  }
  return out;
}

Region Region::unit_cube(int d) { return Region{std::vector<Interval>(d, Interval{})}; }

Region Region::anchored(std::span<const double> corner) {
  Region r;
  for (double a : corner) r.sides.push_back({0.0, a, true, false});
  return r;
}

Region Region::left_open(std::span<const double> lo, std::span<const double> hi) {
  if (lo.size() != hi.size()) throw PreconditionError("region bounds dimension mismatch");
  Region r;
  for (std::size_t j = 0; j < lo.size(); ++j) r.sides.push_back({lo[j], hi[j], false, true});
  return r;
}

bool Region::contains(std::span<const double> p) const {
  for (std::size_t j = 0; j < sides.size(); ++j) {
    if (!sides[j].contains(p[j])) return false;
  }
  return true;
}

double Region::volume() const {
  double v = 1.0;
  for (const auto& s : sides) v *= s.length();
  return v;
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_qmcpts(std::ostream& os, const PointSet& ps) {
  os << "# qmcpts v1 d=" << ps.dimension() << " n=" << ps.size() << " seed=" << ps.meta().seed
     << " label=" << ps.meta().label << '\n';
  for (std::size_t i = 0; i < ps.size(); ++i) {
    auto p = ps.point(i);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) os << ' ';
      os << format_double(p[j]);
    }
    os << '\n';
  }
}

PointSet read_qmcpts(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw PreconditionError("qmcpts: empty input");
  std::istringstream hs(header);
  std::string hash, magic, version;
  hs >> hash >> magic >> version;
  if (hash != "#" || magic != "qmcpts" || version != "v1") {
    throw PreconditionError("qmcpts: bad header line");
  }
  long d = -1;
  long long n = -1;
  PointSetMeta meta;
  std::string tok;
  while (hs >> tok) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw PreconditionError("qmcpts: bad header field " + tok);
    auto key = tok.substr(0, eq);
    auto value = tok.substr(eq + 1);
    try {
      if (key == "d") d = std::stol(value);
      else if (key == "n") n = std::stoll(value);
      else if (key == "seed") meta.seed = std::stoull(value);
      else if (key == "label") {
        // label runs to the end of the line
        meta.label = value;
        std::string rest;
        std::getline(hs, rest);
        meta.label += rest;
        break;
      } else {
        throw PreconditionError("qmcpts: unknown header field " + key);
      }
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const PreconditionError*>(&e)) throw;
      throw PreconditionError("qmcpts: bad value for " + key);
    }
  }
  if (d < 1 || n < 0) throw PreconditionError("qmcpts: header must declare d and n");

  PointSet ps(static_cast<int>(d), meta);
  std::vector<double> row(static_cast<std::size_t>(d));
  std::string line;
  long long count = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    for (auto& x : row) {
      if (!(ls >> x)) throw PreconditionError("qmcpts: short row " + std::to_string(count + 1));
    }
    std::string extra;
    if (ls >> extra) throw PreconditionError("qmcpts: long row " + std::to_string(count + 1));
    ps.push_back(row);
    ++count;
  }
  if (count != n) throw PreconditionError("qmcpts: header n does not match row count");
  return ps;
}

PointSet load_qmcpts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return read_qmcpts(in);
}

void save_qmcpts(const std::string& path, const PointSet& ps) {
  auto tmp = path + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    write_qmcpts(out, ps);
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace qmcst
