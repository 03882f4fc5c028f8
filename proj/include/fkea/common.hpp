#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace fkea {

inline constexpr const char* kVersion = "0.1.0";

// Dense double-precision matrices. Sample sets are row-major (one row per
// sample, matching the on-disk layout); square work matrices use Eigen's
// default column-major layout.
using Mat = Eigen::MatrixXd;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vec = Eigen::VectorXd;

enum class errc {
    invalid_input,     // bad arguments, dimension mismatches, invalid config
    data_error,        // non-finite payload values, inconsistent content
    format_error,      // unparseable file structure (magic/version/truncation)
    io_error,          // filesystem failures
    basis_mismatch,    // accumulators built from different Fourier bases
    numeric_error,     // eigensolver non-convergence and similar
    capacity_error,    // exact path refused above the configured cap
    generation_error,  // synthetic-data constraints infeasible
};

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
    throw Error(code, message);
}

// Process exit codes: 0 ok, 2 usage, 3 data/format, 4 numeric, 5 capacity.
inline int exit_code_for(errc code) {
    switch (code) {
        case errc::invalid_input:
        case errc::generation_error:
            return 2;
        case errc::data_error:
        case errc::format_error:
        case errc::io_error:
        case errc::basis_mismatch:
            return 3;
        case errc::numeric_error:
            return 4;
        case errc::capacity_error:
            return 5;
    }
    return 4;
}

}  // namespace fkea
