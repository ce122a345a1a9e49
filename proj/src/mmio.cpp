#include "mmio.hpp"

#include <cinttypes>
#include <cstdio>
#include <sstream>

#include "geometry.hpp"  // file helpers
#include "units.hpp"

namespace mems {

namespace {

std::string value17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

void write_matrix_market_coordinate(const std::string& path, const Eigen::MatrixXd& m) {
    std::ostringstream os;
    os << "%%MatrixMarket matrix coordinate real general\n";
    Eigen::Index nnz = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (m(i, j) != 0.0) ++nnz;
    os << m.rows() << " " << m.cols() << " " << nnz << "\n";
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            if (m(i, j) != 0.0)
                os << (i + 1) << " " << (j + 1) << " " << value17(m(i, j)) << "\n";
    write_text_file_atomic(path, os.str());
}

void write_matrix_market_array(const std::string& path, const Eigen::MatrixXd& m) {
    std::ostringstream os;
    os << "%%MatrixMarket matrix array real general\n";
    os << m.rows() << " " << m.cols() << "\n";
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            os << value17(m(i, j)) << "\n";
    write_text_file_atomic(path, os.str());
}

Eigen::MatrixXd read_matrix_market(const std::string& path) {
    std::istringstream is(read_text_file(path));
    std::string line;
    if (!std::getline(is, line)) throw ParseError(path + ": empty Matrix Market file");
    bool coordinate;
    if (line.rfind("%%MatrixMarket matrix coordinate real general", 0) == 0)
        coordinate = true;
    else if (line.rfind("%%MatrixMarket matrix array real general", 0) == 0)
        coordinate = false;
    else
        throw ParseError(path + ": unsupported Matrix Market header '" + line + "'");

    auto next_data_line = [&](std::string* out) {
        while (std::getline(is, line)) {
            if (!line.empty() && line[0] == '%') continue;
            bool blank = true;
            for (char ch : line)
                if (ch != ' ' && ch != '\t' && ch != '\r') blank = false;
            if (blank) continue;
            *out = line;
            return true;
        }
        return false;
    };

    std::string sizes;
    if (!next_data_line(&sizes)) throw ParseError(path + ": missing size line");
    std::istringstream ss(sizes);

    if (coordinate) {
        Eigen::Index rows, cols;
        long long nnz;
        if (!(ss >> rows >> cols >> nnz)) throw ParseError(path + ": bad coordinate size line");
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(rows, cols);
        std::string entry;
        for (long long k = 0; k < nnz; ++k) {
            if (!next_data_line(&entry)) throw ParseError(path + ": truncated coordinate data");
            std::istringstream es(entry);
            Eigen::Index i, j;
            double v;
            if (!(es >> i >> j >> v)) throw ParseError(path + ": bad coordinate entry '" + entry + "'");
            if (i < 1 || i > rows || j < 1 || j > cols)
                throw ParseError(path + ": coordinate entry out of range");
            m(i - 1, j - 1) = v;
        }
        return m;
    }

    Eigen::Index rows, cols;
    if (!(ss >> rows >> cols)) throw ParseError(path + ": bad array size line");
    Eigen::MatrixXd m(rows, cols);
    std::string entry;
    for (Eigen::Index j = 0; j < cols; ++j) {
        for (Eigen::Index i = 0; i < rows; ++i) {
            if (!next_data_line(&entry)) throw ParseError(path + ": truncated array data");
            std::istringstream es(entry);
            double v;
            if (!(es >> v)) throw ParseError(path + ": bad array entry '" + entry + "'");
            m(i, j) = v;
        }
    }
    return m;
}

}  // namespace mems
