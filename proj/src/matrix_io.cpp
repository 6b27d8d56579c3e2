#include "l4dec/matrix_io.hpp"

#include <cinttypes>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "l4dec/common.hpp"

namespace l4dec {

namespace {

constexpr char kMagic[4] = {'L', '4', 'M', 'X'};
constexpr std::uint32_t kVersion = 1;

[[noreturn]] void fail_io(const std::filesystem::path& path, const std::string& what) {
    throw IoError(path.string() + ": " + what);
}

}  // namespace

void save_matrix_bin(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail_io(path, "cannot open for writing");
    const std::uint64_t rows = static_cast<std::uint64_t>(m.rows());
    const std::uint64_t cols = static_cast<std::uint64_t>(m.cols());
    out.write(kMagic, 4);
    out.write(reinterpret_cast<const char*>(&kVersion), sizeof kVersion);
    out.write(reinterpret_cast<const char*>(&rows), sizeof rows);
    out.write(reinterpret_cast<const char*>(&cols), sizeof cols);
    // Eigen default storage is column-major; the payload is the raw buffer.
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double) * rows * cols));
    if (!out) fail_io(path, "short write");
}

Eigen::MatrixXd load_matrix_bin(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail_io(path, "cannot open");
    char magic[4];
    std::uint32_t version = 0;
    std::uint64_t rows = 0, cols = 0;
    in.read(magic, 4);
    in.read(reinterpret_cast<char*>(&version), sizeof version);
    in.read(reinterpret_cast<char*>(&rows), sizeof rows);
    in.read(reinterpret_cast<char*>(&cols), sizeof cols);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        fail_io(path, "not a matrix container (bad magic)");
    if (version != kVersion)
        fail_io(path, "unsupported container version " + std::to_string(version));
    if (rows > (1u << 24) || cols > (1u << 28))
        fail_io(path, "implausible dimensions in header");
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double) * rows * cols));
    if (!in) fail_io(path, "truncated payload");
    return m;
}

void save_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    std::FILE* f = std::fopen(path.string().c_str(), "w");
    if (!f) fail_io(path, "cannot open for writing");
    std::fprintf(f, "# %" PRId64 ",%" PRId64 "\n",
                 static_cast<std::int64_t>(m.rows()), static_cast<std::int64_t>(m.cols()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            std::fprintf(f, j == 0 ? "%.17g" : ",%.17g", m(i, j));
        }
        std::fputc('\n', f);
    }
    if (std::fclose(f) != 0) fail_io(path, "close failed");
}

Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail_io(path, "cannot open");
    std::string line;
    if (!std::getline(in, line)) fail_io(path, "empty file");
    std::int64_t rows = 0, cols = 0;
    if (std::sscanf(line.c_str(), "# %" SCNd64 ",%" SCNd64, &rows, &cols) != 2)
        fail_io(path, "missing '# rows,cols' header");
    if (rows < 0 || cols < 0) fail_io(path, "negative dimensions in header");
    Eigen::MatrixXd m(rows, cols);
    for (std::int64_t i = 0; i < rows; ++i) {
        if (!std::getline(in, line)) fail_io(path, "fewer rows than header declares");
        std::stringstream ss(line);
        std::string cell;
        for (std::int64_t j = 0; j < cols; ++j) {
            if (!std::getline(ss, cell, ',')) fail_io(path, "short row " + std::to_string(i));
            try {
                m(i, j) = std::stod(cell);
            } catch (const std::exception&) {
                fail_io(path, "bad number '" + cell + "' at row " + std::to_string(i));
            }
        }
    }
    return m;
}

void save_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m) {
    if (path.extension() == ".csv") {
        save_matrix_csv(path, m);
    } else {
        save_matrix_bin(path, m);
    }
}

Eigen::MatrixXd load_matrix(const std::filesystem::path& path) {
    if (path.extension() == ".csv") return load_matrix_csv(path);
    return load_matrix_bin(path);
}

}  // namespace l4dec
