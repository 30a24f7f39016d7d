#include "spherelab/csv.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace spherelab {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& text, const std::string& what) {
    if (text.empty()) {
        throw Error(ErrorCode::ConfigInvalid, what + ": empty numeric field");
    }
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    // ERANGE with a finite result is gradual underflow; only overflow is fatal
    if (end != text.c_str() + text.size() ||
        (errno == ERANGE && (v == HUGE_VAL || v == -HUGE_VAL))) {
        throw Error(ErrorCode::ConfigInvalid, what + ": cannot parse '" + text + "' as a number");
    }
    return v;
}

std::string render_matrix_csv(const Matrix& m) {
    std::string out;
    out.reserve(m.rows() * m.cols() * 12);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += format_g17(m(i, j));
        }
        out += '\n';
    }
    return out;
}

Matrix parse_matrix_csv(const std::string& text, const std::string& origin) {
    std::vector<std::vector<double>> rows;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        // skip blank lines (trailing newline etc.)
        bool blank = true;
        for (char c : line)
            if (c != ' ' && c != '\t') { blank = false; break; }
        if (blank) continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            std::size_t comma = line.find(',', start);
            std::string field = line.substr(start, comma == std::string::npos
                                                       ? std::string::npos
                                                       : comma - start);
            // trim surrounding spaces
            std::size_t b = field.find_first_not_of(" \t");
            std::size_t e = field.find_last_not_of(" \t");
            field = (b == std::string::npos) ? std::string() : field.substr(b, e - b + 1);
            row.push_back(parse_double(field, origin + ":" + std::to_string(lineno)));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw Error(ErrorCode::RaggedDimensions,
                        origin + ":" + std::to_string(lineno) + ": row has " +
                            std::to_string(row.size()) + " fields, expected " +
                            std::to_string(rows.front().size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) {
        throw Error(ErrorCode::EmptyInput, origin + ": no data rows");
    }
    std::vector<double> flat;
    flat.reserve(rows.size() * rows.front().size());
    for (const auto& r : rows) flat.insert(flat.end(), r.begin(), r.end());
    return Matrix(rows.size(), rows.front().size(), std::move(flat));
}

void write_matrix_csv(const std::string& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
    }
    out << render_matrix_csv(m);
    if (!out.flush()) {
        throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
    }
}

Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorCode::IoError, "cannot open '" + path + "' for reading");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_matrix_csv(buf.str(), path);
}

} // namespace spherelab
