#ifndef KATOKLAB_ERRORS_HPP
#define KATOKLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace katoklab {

struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Parameter set rejected at construction (chart too large, blend not monotone, ...).
struct InvalidParams : Error { using Error::Error; };

// Point cannot be lifted unambiguously to the eigen-chart.
struct ChartDomainError : Error { using Error::Error; };

// Trajectory left the chart during integration.
struct ChartExitError : Error { using Error::Error; };

// Adaptive integrator could not meet the requested tolerance.
struct StepFailure : Error { using Error::Error; };

// Radial inverse failed to bracket a root.
struct RootBracketError : Error { using Error::Error; };

struct QuadratureError : Error { using Error::Error; };

// Slope variable left the admissible range during tangent integration.
struct BlowupError : Error { using Error::Error; };

// A conditional check was fed a sample violating its hypotheses.
struct HypothesisViolation : Error { using Error::Error; };

struct ReturnCapExceeded : Error { using Error::Error; };

struct CurveGrowthFailure : Error { using Error::Error; };

struct ConvergenceError : Error { using Error::Error; };

struct NewtonDivergence : Error { using Error::Error; };

struct InsufficientData : Error { using Error::Error; };

// No partition element satisfies the forward-avoidance condition.
struct NoValidElement : Error { using Error::Error; };

struct ConfigError : Error { using Error::Error; };

} // namespace katoklab

#endif
