#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "trunctail/model.hpp"

// Sample file format: CSV with the exact header "x,y", one observed pair
// per line.  The y column accepts the literal token "inf" (case-insensitive)
// as the no-truncation sentinel.  All parse errors are reported as
// std::invalid_argument with a line number.

namespace trunctail::io {

model::ObservedSample read_sample_csv(std::istream& in,
                                      const std::string& name);
model::ObservedSample read_sample_csv_file(const std::string& path);

void write_sample_csv(std::ostream& out, const model::ObservedSample& sample);

// Two-column dump "x,dn" used by the tail-process diagnostic.
void write_dn_csv(std::ostream& out, const std::vector<double>& xs,
                  const std::vector<double>& dn);

}  // namespace trunctail::io
