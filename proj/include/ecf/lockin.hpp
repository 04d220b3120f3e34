#pragma once

#include <cstddef>
#include <vector>

#include "ecf/heterodyne.hpp"

namespace ecf {

/// Dual-phase lock-in output, decimated.
struct LockInOutput {
  std::vector<double> x;          // V, in-phase
  std::vector<double> y;          // V, quadrature
  std::vector<double> amplitude;  // V, hypot(x, y)
  double output_rate = 0.0;       // Hz
  double reference_frequency = 0.0;
  double start_time = 0.0;
  /// Leading samples within five filter time constants; excluded from
  /// statistics by callers.
  std::size_t settle_samples = 0;

  double time_at(std::size_t i) const { return start_time + i / output_rate; }
};

/// Mix the trace with cos/sin references at f_ref, low-pass with a 4th-order
/// zero-phase Butterworth at `cutoff`, and decimate. The factor 2 in the
/// mixing makes the amplitude of a tone at f_ref equal its peak voltage.
/// Requires f_ref below Nyquist, cutoff below f_ref, and a decimated rate
/// still above 2x cutoff.
LockInOutput lockin_demodulate(const TimeTrace& trace, double f_ref,
                               double cutoff, int decimation);

} // namespace ecf
