#ifndef QRPF_ERRORS_HPP
#define QRPF_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace qrpf {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct NonPositiveDeterminant : Error {
    explicit NonPositiveDeterminant(double det)
        : Error("deformation gradient has non-positive determinant: det = " + std::to_string(det)) {}
};

struct DegenerateFrame : Error {
    using Error::Error;
};

struct NotUnit : Error {
    explicit NotUnit(double norm)
        : Error("vector is not unit length: |n| = " + std::to_string(norm)) {}
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct NonPositive : Error {
    using Error::Error;
};

struct InvalidMaterial : Error {
    using Error::Error;
};

struct RelaxationDiverged : Error {
    using Error::Error;
};

struct NotPositiveDefinite : Error {
    using Error::Error;
};

struct SingularSystem : Error {
    using Error::Error;
};

struct ElementInverted : Error {
    int element;
    explicit ElementInverted(int elem, double det)
        : Error("element " + std::to_string(elem) + " inverted: det F = " + std::to_string(det)),
          element(elem) {}
};

struct LineSearchFailed : Error {
    using Error::Error;
};

struct NotConverged : Error {
    double residual;
    NotConverged(const std::string& what, double res) : Error(what), residual(res) {}
};

struct EmptyMesh : Error {
    using Error::Error;
};

struct MeshError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct IoError : Error {
    using Error::Error;
};

}  // namespace qrpf

#endif
