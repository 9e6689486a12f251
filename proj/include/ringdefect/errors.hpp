// errors.hpp — exception taxonomy for the ring-defect solver.

#pragma once

#include <stdexcept>
#include <string>

namespace ringdefect {

struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct invalid_parameter_error : error {
    using error::error;
};

// Newton failed to reach the residual tolerance; carries the last iterate.
struct convergence_error : error {
    double k1, k2, residual;
    convergence_error(const std::string& msg, double k1_, double k2_, double res)
        : error(msg), k1(k1_), k2(k2_), residual(res) {}
};

struct singular_step_error : error {
    using error::error;
};

struct enumeration_error : error {
    int i, j;
    enumeration_error(const std::string& msg, int i_, int j_) : error(msg), i(i_), j(j_) {}
};

struct path_error : error {
    double alpha;
    path_error(const std::string& msg, double alpha_) : error(msg), alpha(alpha_) {}
};

struct degenerate_momenta_error : error {
    using error::error;
};

struct not_a_spectral_root_error : error {
    double sigma_ratio;
    not_a_spectral_root_error(const std::string& msg, double ratio)
        : error(msg), sigma_ratio(ratio) {}
};

struct domain_error : error {
    using error::error;
};

struct config_error : error {
    using error::error;
};

struct path_too_coarse_error : error {
    double overlap_mag;
    path_too_coarse_error(const std::string& msg, double mag) : error(msg), overlap_mag(mag) {}
};

struct ill_defined_phase_error : error {
    double overlap_mag;
    ill_defined_phase_error(const std::string& msg, double mag) : error(msg), overlap_mag(mag) {}
};

struct oracle_unreliable_error : error {
    double rel_change;
    oracle_unreliable_error(const std::string& msg, double rel) : error(msg), rel_change(rel) {}
};

struct out_of_range_error : error {
    using error::error;
};

struct io_error : error {
    using error::error;
};

}  // namespace ringdefect
