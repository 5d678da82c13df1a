#pragma once

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "field.hpp"

namespace fns2d {

// Shortest decimal that round-trips a double.
inline std::string fmt_double(double x) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, x);
    if (std::strtod(buf, nullptr) == x) break;
  }
  return buf;
}

// Field CSV: tag line, optional further '#' comment lines, column header,
// then one row per upper half-lattice mode.
inline void write_field(std::ostream& os, const FourierField& v, const std::string& extra_comment = {}) {
  os << "# fns2d-field v1 cutoff=" << v.cutoff() << "\n";
  if (!extra_comment.empty()) os << "# " << extra_comment << "\n";
  os << "k1,k2,re,im\n";
  v.for_each_upper([&](Wave k, cplx c) {
    os << k.k1 << ',' << k.k2 << ',' << fmt_double(c.real()) << ',' << fmt_double(c.imag()) << '\n';
  });
}

inline FourierField read_field(std::istream& is) {
  std::string line;
  // Artifacts written by the CLI carry a manifest line ahead of the tag.
  do {
    if (!std::getline(is, line)) throw PreconditionError("field csv: empty input");
  } while (line.rfind("# manifest", 0) == 0);
  const std::string tag = "# fns2d-field v1 cutoff=";
  if (line.rfind(tag, 0) != 0) throw PreconditionError("field csv: bad header '" + line + "'");
  int n = std::stoi(line.substr(tag.size()));
  FourierField v(n);
  bool saw_columns = false;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!saw_columns) {
      if (line != "k1,k2,re,im") throw PreconditionError("field csv: expected column header, got '" + line + "'");
      saw_columns = true;
      continue;
    }
    std::istringstream ss(line);
    int k1, k2;
    double re, im;
    char c1, c2, c3;
    if (!(ss >> k1 >> c1 >> k2 >> c2 >> re >> c3 >> im) || c1 != ',' || c2 != ',' || c3 != ',')
      throw PreconditionError("field csv: bad row '" + line + "'");
    Wave k{k1, k2};
    if (!k.is_upper()) throw PreconditionError("field csv: row outside upper half-lattice '" + line + "'");
    v.set(k, {re, im});
  }
  return v;
}

}  // namespace fns2d
