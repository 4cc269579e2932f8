#include "spixct/io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace spixct {

namespace {

std::string join_path_error(const std::string& path, const std::string& what) {
    return path + ": " + what;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(join_path_error(path, "cannot open for writing"));
    return out;
}

void write_comments(std::ofstream& out, const std::vector<std::string>& comments) {
    for (const std::string& c : comments) out << "# " << c << "\n";
}

struct LineReader {
    std::ifstream in;
    std::string path;
    int line_no = 0;

    explicit LineReader(const std::string& p) : in(p), path(p) {
        if (!in) throw ParseError(p, 0, "cannot open file");
    }

    // next non-comment, non-blank line; false at EOF
    bool next(std::string& line) {
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            return true;
        }
        return false;
    }
};

double parse_number(const std::string& token, const std::string& path, int line) {
    try {
        size_t pos = 0;
        const double v = std::stod(token, &pos);
        while (pos < token.size() && std::isspace(static_cast<unsigned char>(token[pos]))) ++pos;
        if (pos != token.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(path, line, "expected a number, got '" + token + "'");
    }
}

std::vector<double> parse_row(const std::string& line, int expected, const std::string& path,
                              int line_no) {
    std::vector<double> row;
    row.reserve(expected);
    std::stringstream ss(line);
    std::string token;
    while (std::getline(ss, token, ',')) row.push_back(parse_number(token, path, line_no));
    if (static_cast<int>(row.size()) != expected)
        throw ParseError(path, line_no,
                         "expected " + std::to_string(expected) + " values, got " +
                             std::to_string(row.size()));
    return row;
}

void write_grid_csv(const GridSpec& g, const std::vector<double>& values, const std::string& path,
                    const std::vector<std::string>& comments, bool is_field) {
    std::ofstream out = open_out(path);
    write_comments(out, comments);
    if (is_field) out << "# kind=field\n";
    out << "n " << g.n << " half_width " << format_double(g.half_width) << "\n";
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            if (j) out << ",";
            out << format_double(values[static_cast<size_t>(i) * g.n + j]);
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error(join_path_error(path, "write failed"));
}

std::pair<GridSpec, std::vector<double>> read_grid_csv(const std::string& path) {
    LineReader reader(path);
    std::string line;
    if (!reader.next(line)) throw ParseError(path, reader.line_no + 1, "empty file");

    std::stringstream header(line);
    std::string key_n, key_hw;
    long long n = 0;
    double half_width = 0.0;
    if (!(header >> key_n >> n >> key_hw >> half_width) || key_n != "n" ||
        key_hw != "half_width")
        throw ParseError(path, reader.line_no, "malformed header, expected 'n <int> half_width <float>'");
    if (n < 2 || n > 100000) throw ParseError(path, reader.line_no, "unreasonable grid size");
    if (!(half_width > 0.0)) throw ParseError(path, reader.line_no, "half_width must be positive");

    std::vector<double> values;
    values.reserve(static_cast<size_t>(n) * n);
    for (int i = 0; i < n; ++i) {
        if (!reader.next(line))
            throw ParseError(path, reader.line_no + 1,
                             "header declares n=" + std::to_string(n) + " but only " +
                                 std::to_string(i) + " rows present");
        const std::vector<double> row = parse_row(line, static_cast<int>(n), path, reader.line_no);
        values.insert(values.end(), row.begin(), row.end());
    }
    if (reader.next(line))
        throw ParseError(path, reader.line_no, "trailing data beyond the declared n rows");
    return {make_grid_spec(static_cast<int>(n), half_width), std::move(values)};
}

void write_pgm(const GridSpec& g, const std::vector<double>& values, const std::string& path) {
    double lo = values[0], hi = values[0];
    for (double v : values) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    const double scale = hi > lo ? 65535.0 / (hi - lo) : 0.0;
    std::ofstream out = open_out(path);
    out << "P2\n" << g.n << " " << g.n << "\n65535\n";
    for (int i = 0; i < g.n; ++i) {
        for (int j = 0; j < g.n; ++j) {
            const double v = values[static_cast<size_t>(i) * g.n + j];
            const long q = std::lround((v - lo) * scale);
            out << q << (j + 1 < g.n ? ' ' : '\n');
        }
    }
    if (!out) throw std::runtime_error(join_path_error(path, "write failed"));
}

}  // namespace

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_image_csv(const ImageGrid& image, const std::string& path,
                     const std::vector<std::string>& comments) {
    write_grid_csv(image.grid, image.values, path, comments, false);
}

ImageGrid read_image_csv(const std::string& path) {
    auto [spec, values] = read_grid_csv(path);
    return ImageGrid{spec, std::move(values)};
}

void write_field_csv(const ScalarField& field, const std::string& path,
                     const std::vector<std::string>& comments) {
    write_grid_csv(field.grid, field.values, path, comments, true);
}

ScalarField read_field_csv(const std::string& path) {
    auto [spec, values] = read_grid_csv(path);
    return ScalarField{spec, std::move(values)};
}

void write_image_pgm(const ImageGrid& image, const std::string& path) {
    write_pgm(image.grid, image.values, path);
}

void write_field_pgm(const ScalarField& field, const std::string& path) {
    write_pgm(field.grid, field.values, path);
}

void write_sinogram_csv(const Sinogram& sinogram, const std::string& path,
                        const std::vector<std::string>& comments) {
    const RayGeometry& geom = sinogram.geometry;
    std::ofstream out = open_out(path);
    write_comments(out, comments);
    out << "n_angles " << geom.n_angles << " n_offsets " << geom.n_offsets << " offset_extent "
        << format_double(geom.offset_extent) << "\n";
    for (int k = 0; k < geom.n_angles; ++k) {
        for (int j = 0; j < geom.n_offsets; ++j) {
            if (j) out << ",";
            out << format_double(sinogram.at(k, j));
        }
        out << "\n";
    }
    if (!out) throw std::runtime_error(join_path_error(path, "write failed"));
}

Sinogram read_sinogram_csv(const std::string& path, double step_along_ray) {
    LineReader reader(path);
    std::string line;
    if (!reader.next(line)) throw ParseError(path, reader.line_no + 1, "empty file");

    std::stringstream header(line);
    std::string key_a, key_o, key_e;
    int n_angles = 0, n_offsets = 0;
    double extent = 0.0;
    if (!(header >> key_a >> n_angles >> key_o >> n_offsets >> key_e >> extent) ||
        key_a != "n_angles" || key_o != "n_offsets" || key_e != "offset_extent")
        throw ParseError(path, reader.line_no, "malformed sinogram header");
    if (n_angles < 1 || n_offsets < 2 || !(extent > 0.0))
        throw ParseError(path, reader.line_no, "invalid sinogram geometry");

    Sinogram sino{RayGeometry{n_angles, n_offsets, extent, step_along_ray}, {}};
    sino.values.reserve(static_cast<size_t>(n_angles) * n_offsets);
    for (int k = 0; k < n_angles; ++k) {
        if (!reader.next(line))
            throw ParseError(path, reader.line_no + 1, "fewer rows than n_angles");
        const std::vector<double> row = parse_row(line, n_offsets, path, reader.line_no);
        sino.values.insert(sino.values.end(), row.begin(), row.end());
    }
    return sino;
}

void write_report_csv(const SolveReport& report, const std::string& path,
                      const std::vector<std::string>& comments) {
    std::ofstream out = open_out(path);
    write_comments(out, comments);
    out << "iteration,residual_norm,error_l2,error_rel,step_norm,cg_iterations\n";
    for (const SolveRecord& r : report.records) {
        out << r.iteration << "," << format_double(r.residual_norm) << ","
            << format_double(r.error_l2) << "," << format_double(r.error_rel) << ","
            << format_double(r.step_norm) << "," << r.cg_iterations << "\n";
    }
    out << "# termination=" << to_string(report.termination) << "\n";
    if (!out) throw std::runtime_error(join_path_error(path, "write failed"));
}

void write_stability_csv(const StabilityAudit& audit, const std::string& path,
                         const std::vector<std::string>& comments) {
    std::ofstream out = open_out(path);
    write_comments(out, comments);
    out << "max_norm_bound,l2_diff,h1_grad_diff,data_h1_diff,lower_ratio\n";
    for (const StabilityRecord& r : audit.records) {
        out << format_double(r.max_norm_bound) << "," << format_double(r.l2_diff) << ","
            << format_double(r.h1_grad_diff) << "," << format_double(r.data_h1_diff) << ","
            << format_double(r.lower_ratio) << "\n";
    }
    out << "# min_lower_ratio=" << format_double(audit.min_lower_ratio) << "\n";
    out << "# fitted_exponent=" << format_double(audit.fitted_exponent) << "\n";
    if (!out) throw std::runtime_error(join_path_error(path, "write failed"));
}

}  // namespace spixct
