#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "qcarpet/bohmian.hpp"
#include "qcarpet/cavity.hpp"
#include "qcarpet/energy.hpp"
#include "qcarpet/kernels.hpp"

namespace qcarpet::io {

/// 17 significant digits, '.' decimal point, "inf" / "-inf" / "nan" spelled out.
std::string format_number(double v);

/// Writes each line of `text` prefixed with "# ".
void write_comment_block(std::ostream& os, std::string_view text);

void write_spectral_state(std::ostream& os, const SpectralState& state,
                          const InputSignalSpec& signal);

/// First row: "t\x" then the x axis; each further row: t then values.
void write_carpet(std::ostream& os, const CarpetGrid& carpet);

enum class ComplexPart { Real, Imag };

void write_density_matrix(std::ostream& os, const DensityMatrixGrid& grid, ComplexPart part);

/// Columns t, x_1..x_n on the common sample grid; partial trajectories
/// leave trailing cells empty.
void write_trajectories(std::ostream& os, std::span<const Trajectory> trajectories);
void write_trajectory_status(std::ostream& os, std::span<const Trajectory> trajectories);

void write_purity_curve(std::ostream& os, const PurityCurve& curve,
                        const PurityFit* fit = nullptr);
void write_purity_fit(std::ostream& os, const PurityFit& fit);
void write_sweep(std::ostream& os, std::span<const SweepRow> rows);
void write_correlation_matrix(std::ostream& os, const CorrelationMatrix& m);
void write_decay_map(std::ostream& os, const DecayTimeMap& m);

/// Reads a two-column (t, chi) CSV; '#' lines and a non-numeric header row
/// are skipped.
PurityCurve read_purity_curve(std::istream& is);

} // namespace qcarpet::io
