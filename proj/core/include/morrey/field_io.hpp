// Text dumps of solved fields.
//
// Checkpoint layout, one item per line:
//
//   morrey-field 1
//   p <p>
//   grid <r_min> <r_max> <n_s> <n_phi>
//   pin <i> <j> <value>        or   pin none
//   <n_phi values of row 0>
//   ...
//
// All reals are written with 17 significant digits, so a dump read back
// reproduces the field bit for bit.

#ifndef MORREY_FIELD_IO_HPP_
#define MORREY_FIELD_IO_HPP_

#include <iosfwd>
#include <string>

#include "morrey/grid.hpp"

namespace morrey {

struct StoredField {
  ScalarField field;
  double p = 0.0;
};

/// printf-style "%.17g".
std::string format_real(double v);

void write_field(std::ostream& os, const ScalarField& field, double p);

/// Throws FormatError on any malformed or truncated input.
StoredField read_field(std::istream& is);

void save_field(const std::string& path, const ScalarField& field, double p);
StoredField load_field(const std::string& path);

/// CSV with header "r,phi,value", rows in node order.
void write_field_csv(std::ostream& os, const ScalarField& field);

}  // namespace morrey

#endif  // MORREY_FIELD_IO_HPP_
