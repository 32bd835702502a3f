#pragma once

#include <string>

#include "gevmle/study_io.hpp"

namespace gevmle {

/// Three side-by-side panels of per-n box summaries (quartile box, median bar,
/// 5%-95% whiskers) for gamma_hat - gamma0, (mu_hat - b_m)/a_m and
/// sigma_hat/a_m - 1. Output depends only on `csv`.
///
/// Throws ParseError when there are no rows or the gamma0 metadata is missing.
[[nodiscard]] std::string render_study_svg(const StudyCsv& csv);

}  // namespace gevmle
