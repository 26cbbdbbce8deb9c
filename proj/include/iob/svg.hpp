#pragma once

#include <iosfwd>

#include "iob/feasibility.hpp"

namespace iob {

/// Static log-log power-vs-rate chart: fixed 800x600 viewBox, decade ticks,
/// one polyline per config. For human inspection only; the CSV is the contract.
void write_power_chart_svg(const SweepResult& sweep, std::ostream& out);

}  // namespace iob
