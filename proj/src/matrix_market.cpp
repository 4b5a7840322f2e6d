#include "biharm/matrix_market.hpp"

#include "biharm/errors.hpp"

#include <cstdio>
#include <fstream>
#include <memory>
#include <sstream>

namespace biharm {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const { std::fclose(f); }
};
using File = std::unique_ptr<std::FILE, FileCloser>;

File open_for_writing(const std::string& path) {
    File f(std::fopen(path.c_str(), "w"));
    if (!f) throw IoError("cannot write '" + path + "'");
    return f;
}

void finish(File f, const std::string& path) {
    if (std::ferror(f.get()) || std::fclose(f.release()) != 0) throw IoError("error writing '" + path + "'");
}

// Returns the banner line and leaves the stream at the size line.
std::string read_header(std::ifstream& in, const std::string& path, int& line_no) {
    std::string banner;
    if (!std::getline(in, banner)) throw IoError("'" + path + "' is empty");
    line_no = 1;
    if (banner.rfind("%%MatrixMarket", 0) != 0) throw ParseError("missing MatrixMarket banner in " + path, 1);
    return banner;
}

bool next_data_line(std::ifstream& in, std::string& line, int& line_no) {
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line[0] != '%') return true;
    }
    return false;
}

} // namespace

void write_matrix_market(const std::string& path, const SparseMatrix& A) {
    File f = open_for_writing(path);
    std::fprintf(f.get(), "%%%%MatrixMarket matrix coordinate real general\n");
    std::fprintf(f.get(), "%ld %ld %ld\n", static_cast<long>(A.rows()), static_cast<long>(A.cols()),
                 static_cast<long>(A.nonZeros()));
    for (Eigen::Index j = 0; j < A.outerSize(); ++j) {
        for (SparseMatrix::InnerIterator it(A, j); it; ++it) {
            std::fprintf(f.get(), "%ld %ld %.17g\n", static_cast<long>(it.row() + 1),
                         static_cast<long>(it.col() + 1), it.value());
        }
    }
    finish(std::move(f), path);
}

void write_matrix_market(const std::string& path, const Vector& v) {
    File f = open_for_writing(path);
    std::fprintf(f.get(), "%%%%MatrixMarket matrix array real general\n");
    std::fprintf(f.get(), "%ld 1\n", static_cast<long>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) std::fprintf(f.get(), "%.17g\n", v[i]);
    finish(std::move(f), path);
}

SparseMatrix read_matrix_market_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    int line_no = 0;
    const std::string banner = read_header(in, path, line_no);
    if (banner.find("coordinate") == std::string::npos || banner.find("real") == std::string::npos) {
        throw ParseError("only coordinate real matrices are supported", 1);
    }
    std::string line;
    if (!next_data_line(in, line, line_no)) throw ParseError("missing size line", line_no);
    long rows = 0, cols = 0, nnz = 0;
    if (std::sscanf(line.c_str(), "%ld %ld %ld", &rows, &cols, &nnz) != 3 || rows < 0 || cols < 0 || nnz < 0) {
        throw ParseError("bad size line", line_no);
    }
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(nnz));
    for (long k = 0; k < nnz; ++k) {
        if (!next_data_line(in, line, line_no)) throw ParseError("too few entries", line_no);
        long i = 0, j = 0;
        double v = 0.0;
        if (std::sscanf(line.c_str(), "%ld %ld %lf", &i, &j, &v) != 3 || i < 1 || i > rows || j < 1 || j > cols) {
            throw ParseError("bad entry", line_no);
        }
        t.emplace_back(static_cast<int>(i - 1), static_cast<int>(j - 1), v);
    }
    SparseMatrix A(rows, cols);
    A.setFromTriplets(t.begin(), t.end());
    A.makeCompressed();
    return A;
}

Vector read_matrix_market_vector(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "'");
    int line_no = 0;
    const std::string banner = read_header(in, path, line_no);
    if (banner.find("array") == std::string::npos) throw ParseError("expected array format", 1);
    std::string line;
    if (!next_data_line(in, line, line_no)) throw ParseError("missing size line", line_no);
    long rows = 0, cols = 0;
    if (std::sscanf(line.c_str(), "%ld %ld", &rows, &cols) != 2 || cols != 1 || rows < 0) {
        throw ParseError("expected a column vector", line_no);
    }
    Vector v(rows);
    for (long i = 0; i < rows; ++i) {
        if (!next_data_line(in, line, line_no)) throw ParseError("too few entries", line_no);
        if (std::sscanf(line.c_str(), "%lf", &v[i]) != 1) throw ParseError("bad value", line_no);
    }
    return v;
}

} // namespace biharm
