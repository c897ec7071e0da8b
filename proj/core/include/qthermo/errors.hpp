// Error taxonomy shared by all modules.

#pragma once

#include <stdexcept>

namespace qthermo {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Construction / input contract violations.
struct DimensionMismatch : Error { using Error::Error; };
struct NonHermitianInput : Error { using Error::Error; };
struct DomainError : Error { using Error::Error; };
struct Unsupported : Error { using Error::Error; };
struct FrequencyOutOfRange : Error { using Error::Error; };
struct FrequencyMismatch : Error { using Error::Error; };
struct MissingSpectralValue : Error { using Error::Error; };
struct GaugeError : Error { using Error::Error; };
struct SingularReference : Error { using Error::Error; };
struct VanishingGap : Error { using Error::Error; };
struct InsufficientSpan : Error { using Error::Error; };
struct SchemaError : Error { using Error::Error; };

// Numerical failures.
struct NotConverged : Error { using Error::Error; };
struct StepSizeUnderflow : Error { using Error::Error; };
struct PositivityLoss : Error { using Error::Error; };
struct TruncationError : Error { using Error::Error; };
struct TruncationLeak : Error { using Error::Error; };
struct DegenerateKernel : Error { using Error::Error; };
struct NoKernel : Error { using Error::Error; };
struct OptimizationFailed : Error { using Error::Error; };
struct MaxItersExceeded : Error { using Error::Error; };

}  // namespace qthermo
