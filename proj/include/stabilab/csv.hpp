#pragma once

#include <iosfwd>
#include <string>

#include "stabilab/montecarlo.hpp"

namespace stabilab {

/// Moment CSV schema: header `t,m1,...,md,V,se_V,n_alive`, one row per grid
/// index k = -m_bar .. n_steps, LF line endings, 17 significant digits.
void write_moments_csv(std::ostream& os, const MomentSeries& series);
void write_moments_csv_file(const std::string& path, const MomentSeries& series);

MomentSeries read_moments_csv(std::istream& is);
MomentSeries read_moments_csv_file(const std::string& path);

}  // namespace stabilab
