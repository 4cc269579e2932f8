#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "spixct/grid.hpp"
#include "spixct/metrics.hpp"
#include "spixct/projector.hpp"
#include "spixct/solver.hpp"

namespace spixct {

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& path, int line, const std::string& message)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + message), line_(line) {}
    int line() const { return line_; }

  private:
    int line_;
};

/// Image CSV: optional leading '#' comment lines, a header line
/// `n <int> half_width <float>`, then n rows of n comma-separated values
/// (row 0 = top = y max). Values are printed with 17 significant digits, so
/// write/read round-trips are bit-exact.
void write_image_csv(const ImageGrid& image, const std::string& path,
                     const std::vector<std::string>& comments = {});
ImageGrid read_image_csv(const std::string& path);

/// Same layout as the image CSV, marked by a leading `# kind=field` comment.
void write_field_csv(const ScalarField& field, const std::string& path,
                     const std::vector<std::string>& comments = {});
ScalarField read_field_csv(const std::string& path);

/// 16-bit min-max normalized PGM previews (lossy; for viewing only).
void write_image_pgm(const ImageGrid& image, const std::string& path);
void write_field_pgm(const ScalarField& field, const std::string& path);

/// Sinogram CSV: header `n_angles <int> n_offsets <int> offset_extent <float>`,
/// one row per angle. The ray step is not serialized; readers fill it with
/// the given value (0 picks the default at use).
void write_sinogram_csv(const Sinogram& sinogram, const std::string& path,
                        const std::vector<std::string>& comments = {});
Sinogram read_sinogram_csv(const std::string& path, double step_along_ray = 0.0);

/// Per-iteration solve log; termination reason in a trailing comment line.
/// Wall times stay in memory only, keeping the file byte-reproducible.
void write_report_csv(const SolveReport& report, const std::string& path,
                      const std::vector<std::string>& comments = {});

void write_stability_csv(const StabilityAudit& audit, const std::string& path,
                         const std::vector<std::string>& comments = {});

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

}  // namespace spixct
